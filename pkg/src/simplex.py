"""
Linear programming backend for the complements revenue lab.

Solves::

    maximize    c @ x
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                x >= 0

with the HiGHS dual simplex in scipy.optimize.linprog. The run is
deterministic for a fixed input. Anti-cycling and presolve are left to HiGHS;
callers recheck the returned point (see optrev.verify_solution).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from scipy.optimize import linprog

from .errors import SolverError

logger = logging.getLogger(__name__)

LP_METHOD: str = "highs-ds"  # HiGHS dual simplex
LP_FEASIBILITY_TOL: float = 1e-9  # Primal and dual; verify_solution accepts 1e-6

STATUS_MESSAGES = {
    0: "Optimization terminated successfully.",
    1: "Iteration limit reached.",
    2: "The problem appears to be infeasible.",
    3: "The problem appears to be unbounded.",
    4: "Serious numerical difficulties encountered.",
}


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    status: int
    iterations: int
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    @property
    def message(self) -> str:
        return STATUS_MESSAGES[self.status]


def _diagnostics(res: Any, A_ub: np.ndarray, A_eq: np.ndarray, b: np.ndarray) -> Dict[str, Any]:
    entries = np.concatenate([np.abs(A_ub).ravel(), np.abs(A_eq).ravel()])
    nonzero = entries[entries > 0.0]
    return {
        "iterations": int(getattr(res, "nit", 0) or 0),
        "rows": int(A_ub.shape[0] + A_eq.shape[0]),
        "columns": int(A_ub.shape[1]),
        "largest_entry": float(nonzero.max()) if nonzero.size else 0.0,
        "smallest_entry": float(nonzero.min()) if nonzero.size else 0.0,
        "largest_rhs": float(np.abs(b).max(initial=0.0)),
        "solver_message": str(getattr(res, "message", "")),
    }


def solve_lp(
    c: np.ndarray,
    A_ub: Optional[np.ndarray] = None,
    b_ub: Optional[np.ndarray] = None,
    A_eq: Optional[np.ndarray] = None,
    b_eq: Optional[np.ndarray] = None,
    max_iter: Optional[int] = None,
) -> LPResult:
    """
    Maximize c @ x over the polyhedron, x >= 0.

    Raises:
        SolverError: If the problem is infeasible, unbounded, the iteration
            limit is hit or HiGHS reports numerical trouble; diagnostics carry
            the iteration count and the magnitude range of the matrix
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.asarray(A_ub, dtype=float).reshape(-1, n)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, n)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    if A_ub.shape[0] != b_ub.size or A_eq.shape[0] != b_eq.size:
        raise SolverError("constraint matrix and right-hand side sizes differ")

    options: Dict[str, Any] = {
        "primal_feasibility_tolerance": LP_FEASIBILITY_TOL,
        "dual_feasibility_tolerance": LP_FEASIBILITY_TOL,
    }
    if max_iter is not None:
        options["maxiter"] = int(max_iter)
    res = linprog(
        -c,
        A_ub=A_ub if A_ub.shape[0] else None,
        b_ub=b_ub if b_ub.size else None,
        A_eq=A_eq if A_eq.shape[0] else None,
        b_eq=b_eq if b_eq.size else None,
        bounds=(0, None),
        method=LP_METHOD,
        options=options,
    )
    diagnostics = _diagnostics(res, A_ub, A_eq, np.concatenate([b_ub, b_eq]))
    status = int(res.status)
    if status != 0 or res.x is None:
        raise SolverError(STATUS_MESSAGES.get(status, STATUS_MESSAGES[4]), diagnostics)

    x = np.clip(np.asarray(res.x, dtype=float), 0.0, None)
    logger.debug("HiGHS solved %d x %d in %d iterations", diagnostics["rows"], n, diagnostics["iterations"])
    return LPResult(x=x, objective=float(c @ x), status=0, iterations=diagnostics["iterations"], diagnostics=diagnostics)
