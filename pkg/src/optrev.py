"""
Optimal revenue oracle for the complements revenue lab.

The optimal truthful mechanism for one buyer over an enumerated type space is
the solution of a linear program over menus of lotteries: every type v gets a
distribution x_v over bundles and a payment p_v, subject to incentive
compatibility between every ordered pair of types and individual rationality.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .config import EXACT_TOL, FEASIBILITY_TOL, OPTIMALITY_TOL, RunConfig
from .errors import CapacityError, DomainError
from .model import HypergraphPrior, ProfileTable, WeightProfile, mask_items, profile_table, valuation_table
from .simplex import solve_lp

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class RevenueLP:
    """
    The revenue LP in the form solve_lp expects.

    Variables are x[v, S] for every type v and bundle bitmask S (row-major),
    then p[v]. Inequality rows are IC rows for ordered pairs (v, v'), v != v',
    followed by one IR row per type; equality rows make each lottery sum to one.
    """

    table: ProfileTable
    c: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray
    A_eq: np.ndarray
    b_eq: np.ndarray
    ic_rows: int
    ir_rows: int

    @property
    def n_types(self) -> int:
        return self.table.size

    @property
    def n_bundles(self) -> int:
        return 1 << self.table.m

    @property
    def n_variables(self) -> int:
        return self.c.size

    @property
    def lottery_rows(self) -> int:
        return self.A_eq.shape[0]


def build_lp(
    prior: HypergraphPrior, table: Optional[ProfileTable] = None, config: Optional[RunConfig] = None
) -> RevenueLP:
    """
    Build the revenue LP over the exact type space of `prior`.

    Types with identical valuations stay distinct.

    Raises:
        CapacityError: If the variable or row count exceeds the LP caps
        DomainError: If the table is sampled or sparse rather than exact
    """
    config = config or RunConfig()
    t = table if table is not None else profile_table(prior, config)
    if not t.exact:
        raise DomainError("the revenue LP needs an exact type space")
    n_types, n_bundles = t.size, 1 << t.m
    n_vars = n_types * n_bundles + n_types
    if n_vars > config.max_lp_variables:
        raise CapacityError(
            f"revenue LP needs {n_vars} variables, cap is {config.max_lp_variables}; raise --cap-lp-vars",
            cap_name="max_lp_variables",
            requested=n_vars,
            limit=config.max_lp_variables,
        )
    n_ic = n_types * (n_types - 1)
    if n_ic + n_types > config.max_lp_rows:
        raise CapacityError(
            f"revenue LP needs {n_ic + n_types} inequality rows, cap is {config.max_lp_rows}",
            cap_name="max_lp_rows",
            requested=n_ic + n_types,
            limit=config.max_lp_rows,
        )

    V = t.values
    pay = n_types * n_bundles
    A_ub = np.zeros((n_ic + n_types, n_vars))
    row = 0
    for v in range(n_types):
        own = slice(v * n_bundles, (v + 1) * n_bundles)
        for w in range(n_types):
            if w == v:
                continue
            # v's utility from w's entry minus v's own utility <= 0
            A_ub[row, w * n_bundles : (w + 1) * n_bundles] += V[v]
            A_ub[row, pay + w] -= 1.0
            A_ub[row, own] -= V[v]
            A_ub[row, pay + v] += 1.0
            row += 1
    for v in range(n_types):
        A_ub[row, v * n_bundles : (v + 1) * n_bundles] = -V[v]
        A_ub[row, pay + v] = 1.0
        row += 1
    A_eq = np.zeros((n_types, n_vars))
    for v in range(n_types):
        A_eq[v, v * n_bundles : (v + 1) * n_bundles] = 1.0
    c = np.concatenate([np.zeros(n_types * n_bundles), t.probs])
    logger.debug("Revenue LP: %d types, %d variables, %d IC rows", n_types, n_vars, n_ic)
    return RevenueLP(t, c, A_ub, np.zeros(n_ic + n_types), A_eq, np.ones(n_types), n_ic, n_types)


@dataclass(frozen=True, eq=False)
class MechanismSolution:
    """Per-type allocation lotteries and payments of a mechanism over an enumerated type space."""

    m: int
    profiles: Tuple[WeightProfile, ...]
    probs: np.ndarray
    lotteries: np.ndarray
    payments: np.ndarray
    objective: float
    iterations: int = 0

    def lottery_for(self, v: int) -> Dict[Tuple[int, ...], float]:
        return {mask_items(s): float(p) for s, p in enumerate(self.lotteries[v]) if p > EXACT_TOL}

    def to_dict(self) -> Dict[str, Any]:
        types = []
        for v, profile in enumerate(self.profiles):
            types.append(
                {
                    "weights": [{"items": list(e), "value": w} for e, w in zip(profile.edges, profile.values)],
                    "prob": float(self.probs[v]),
                    "payment": float(self.payments[v]),
                    "lottery": [{"items": list(s), "prob": p} for s, p in sorted(self.lottery_for(v).items())],
                }
            )
        return {"m": self.m, "objective": self.objective, "types": types}

    @classmethod
    def zero(cls, table: ProfileTable) -> "MechanismSolution":
        """The mechanism that never sells and never charges."""
        lotteries = np.zeros((table.size, 1 << table.m))
        lotteries[:, 0] = 1.0
        return cls(table.m, table.profiles, table.probs.copy(), lotteries, np.zeros(table.size), 0.0)


def solve(lp: RevenueLP) -> MechanismSolution:
    """
    Optimal mechanism of the revenue LP.

    Raises:
        SolverError: When HiGHS cannot certify an optimum
    """
    result = solve_lp(lp.c, lp.A_ub, lp.b_ub, lp.A_eq, lp.b_eq)
    split = lp.n_types * lp.n_bundles
    lotteries = result.x[:split].reshape(lp.n_types, lp.n_bundles)
    payments = result.x[split:]
    t = lp.table
    return MechanismSolution(
        t.m, t.profiles, t.probs.copy(), lotteries, payments, float(t.probs @ payments), result.iterations
    )


def optimal_revenue(
    prior: HypergraphPrior, table: Optional[ProfileTable] = None, config: Optional[RunConfig] = None
) -> MechanismSolution:
    return solve(build_lp(prior, table, config))


@dataclass(frozen=True)
class SolutionCheck:
    ok: bool
    max_residual: float
    objective_error: float
    violations: Tuple[str, ...] = ()


def _profile_probability(prior: HypergraphPrior, profile: WeightProfile) -> float:
    return math.prod(prior.dist(e).pmf_at(w) for e, w in zip(profile.edges, profile.values))


def verify_solution(prior: HypergraphPrior, sol: MechanismSolution) -> SolutionCheck:
    """
    Recheck a mechanism from scratch.

    Valuations and type probabilities are recomputed from the prior. Passes
    when every IC and IR residual and every lottery defect is within the
    feasibility tolerance and the objective matches the recomputed expected
    payment within the optimality tolerance.
    """
    V = np.vstack([valuation_table(p, prior.feasibility, prior.m) for p in sol.profiles]) if sol.profiles else np.zeros((0, 1 << prior.m))
    probs = np.array([_profile_probability(prior, p) for p in sol.profiles])
    violations: List[str] = []
    lottery_defect = float(
        max(np.abs(sol.lotteries.sum(axis=1) - 1.0).max(initial=0.0), (-sol.lotteries).max(initial=0.0))
    )
    if lottery_defect > FEASIBILITY_TOL:
        violations.append(f"lottery defect {lottery_defect:.3g}")
    if sol.payments.size and (-sol.payments).max() > FEASIBILITY_TOL:
        violations.append("negative payment")
    # utility[v, w]: type v reporting w
    utility = V @ sol.lotteries.T - sol.payments[None, :]
    own = np.diag(utility)
    ir = float((-own).max(initial=0.0))
    ic = float((utility - own[:, None]).max(initial=0.0))
    if ir > FEASIBILITY_TOL:
        violations.append(f"IR residual {ir:.3g}")
    if ic > FEASIBILITY_TOL:
        violations.append(f"IC residual {ic:.3g}")
    objective_error = abs(float(probs @ sol.payments) - sol.objective) if sol.profiles else abs(sol.objective)
    if objective_error > OPTIMALITY_TOL * max(1.0, abs(sol.objective)):
        violations.append(f"objective mismatch {objective_error:.3g}")
    residual = max(ir, ic, lottery_defect)
    return SolutionCheck(not violations, residual, objective_error, tuple(violations))
