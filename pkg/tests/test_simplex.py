"""
Unit tests for the simplex module.

Validates:
- Objectives and feasibility on random bounded LPs, checked against an independent interior-point run
- Rows with negative right-hand sides and redundant equality rows
- Infeasible and unbounded problems raise SolverError with diagnostics
"""

import unittest

import numpy as np
from scipy.optimize import linprog

from src.errors import SolverError
from src.simplex import solve_lp


class TestSolveLP(unittest.TestCase):
    """Tests for solve_lp."""

    def test_matches_scipy_on_random_packing_lps(self) -> None:
        """max c x s.t. A x <= b, x >= 0 agrees with linprog."""
        rng = np.random.default_rng(7)
        for _ in range(40):
            n, k = int(rng.integers(2, 9)), int(rng.integers(1, 9))
            c = rng.uniform(-1.0, 3.0, size=n)
            A = rng.uniform(0.1, 2.0, size=(k, n))
            b = rng.uniform(1.0, 5.0, size=k)
            ours = solve_lp(c, A, b)
            ref = linprog(-c, A_ub=A, b_ub=b, bounds=(0, None), method="highs-ipm")
            self.assertEqual(ref.status, 0)
            self.assertAlmostEqual(ours.objective, -ref.fun, places=7)
            self.assertTrue(np.all(A @ ours.x <= b + 1e-8))

    def test_matches_scipy_with_equalities(self) -> None:
        """A simplex-shaped equality row plus inequalities agrees with linprog."""
        rng = np.random.default_rng(11)
        for _ in range(30):
            n, k = int(rng.integers(2, 7)), int(rng.integers(1, 6))
            c = rng.uniform(-2.0, 2.0, size=n)
            A = rng.uniform(-1.0, 1.0, size=(k, n))
            b = np.abs(A).max(axis=1) + rng.uniform(0.0, 1.0, size=k)
            A_eq, b_eq = np.ones((1, n)), np.ones(1)
            ours = solve_lp(c, A, b, A_eq, b_eq)
            ref = linprog(-c, A_ub=A, b_ub=b, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs-ipm")
            self.assertEqual(ref.status, 0)
            self.assertAlmostEqual(ours.objective, -ref.fun, places=7)
            self.assertAlmostEqual(float(ours.x.sum()), 1.0, places=8)

    def test_negative_right_hand_side(self) -> None:
        """x + y >= 1 minimizing x + 2y puts everything on x."""
        result = solve_lp(np.array([-1.0, -2.0]), np.array([[-1.0, -1.0]]), np.array([-1.0]))
        self.assertAlmostEqual(result.objective, -1.0)
        self.assertTrue(np.allclose(result.x, [1.0, 0.0]))
        self.assertEqual(result.message, "Optimization terminated successfully.")

    def test_redundant_equalities(self) -> None:
        """A repeated equality row is dropped after phase 1."""
        A_eq = np.array([[1.0, 1.0], [1.0, 1.0]])
        result = solve_lp(np.array([1.0, 2.0]), A_eq=A_eq, b_eq=np.array([1.0, 1.0]))
        self.assertAlmostEqual(result.objective, 2.0)

    def test_infeasible_raises(self) -> None:
        """x <= 1 and x >= 2 cannot both hold."""
        with self.assertRaises(SolverError) as ctx:
            solve_lp(np.array([1.0]), np.array([[1.0], [-1.0]]), np.array([1.0, -2.0]))
        self.assertIn("infeasible", str(ctx.exception))
        self.assertIn("iterations", ctx.exception.diagnostics)

    def test_unbounded_raises(self) -> None:
        """x - y <= 1 lets x grow without limit."""
        with self.assertRaises(SolverError) as ctx:
            solve_lp(np.array([1.0, 0.0]), np.array([[1.0, -1.0]]), np.array([1.0]))
        self.assertIn("solver_message", ctx.exception.diagnostics)

    def test_diagnostics_on_success(self) -> None:
        """A solved LP reports its size and matrix magnitude range."""
        result = solve_lp(np.array([1.0, 1.0]), np.array([[2.0, 0.5]]), np.array([4.0]))
        self.assertAlmostEqual(result.objective, 8.0)
        self.assertEqual(result.diagnostics["rows"], 1)
        self.assertEqual(result.diagnostics["largest_entry"], 2.0)
        self.assertEqual(result.diagnostics["smallest_entry"], 0.5)

    def test_mismatched_sizes_raise(self) -> None:
        """Row counts of A and b must agree."""
        with self.assertRaises(SolverError):
            solve_lp(np.array([1.0]), np.array([[1.0]]), np.array([1.0, 2.0]))


if __name__ == "__main__":
    unittest.main()
