"""
Unit tests for the optrev module.

Validates:
- LP dimensions for small type spaces and the capacity caps
- Single-item optimal revenue equals the best posted price
- Simple mechanisms never beat the LP optimum, which never beats E[v(M)]
- verify_solution accepts optimal and zero mechanisms and rejects corrupted payments
"""

import unittest

import numpy as np
from scipy.optimize import linprog

from src.config import RunConfig
from src.errors import CapacityError, DomainError
from src.mechanisms import brev, edge_menu_revenue, srev_star_opt
from src.model import HypergraphPrior, profile_table
from src.myerson import optimal_posted_price
from src.optrev import MechanismSolution, build_lp, optimal_revenue, solve, verify_solution
from src.random_priors import random_prior


def two_edge_prior() -> HypergraphPrior:
    return HypergraphPrior.create(
        2,
        [((0,), {0.0: 0.5, 1.0: 0.5}), ((0, 1), {0.0: 0.5, 2.0: 0.5})],
    )


class TestBuildLP(unittest.TestCase):
    """Tests for the LP layout."""

    def test_single_item_two_types(self) -> None:
        """2 types x 2 bundles + 2 payments; 2 IC and 2 IR rows."""
        prior = HypergraphPrior.create(1, [((0,), {1.0: 0.5, 2.0: 0.5})])
        lp = build_lp(prior)
        self.assertEqual(lp.n_variables, 6)
        self.assertEqual(lp.ic_rows, 2)
        self.assertEqual(lp.ir_rows, 2)
        self.assertEqual(lp.lottery_rows, 2)

    def test_one_type_has_no_ic_rows(self) -> None:
        """A single type only has its IR row."""
        prior = HypergraphPrior.create(1, [((0,), {3.0: 1.0})])
        self.assertEqual(build_lp(prior).ic_rows, 0)

    def test_two_items_four_types(self) -> None:
        """4 types x 4 bundles + 4 payments."""
        self.assertEqual(build_lp(two_edge_prior()).n_variables, 20)

    def test_variable_cap(self) -> None:
        """Too many variables is a capacity error."""
        with self.assertRaises(CapacityError) as ctx:
            build_lp(two_edge_prior(), config=RunConfig(max_lp_variables=10))
        self.assertEqual(ctx.exception.cap_name, "max_lp_variables")

    def test_row_cap(self) -> None:
        """Too many rows is a capacity error."""
        with self.assertRaises(CapacityError):
            build_lp(two_edge_prior(), config=RunConfig(max_lp_rows=5))

    def test_sampled_table_rejected(self) -> None:
        """The LP needs the exact type space."""
        config = RunConfig(max_profiles=2, mode="mc", mc_samples=50)
        table = profile_table(two_edge_prior(), config)
        with self.assertRaises(DomainError):
            build_lp(two_edge_prior(), table)


class TestOptimalRevenue(unittest.TestCase):
    """Tests for optimal_revenue and verify_solution."""

    def test_point_mass_extracts_full_surplus(self) -> None:
        """One type pays its whole value."""
        prior = HypergraphPrior.create(1, [((0,), {2.5: 1.0})])
        self.assertAlmostEqual(optimal_revenue(prior).objective, 2.5, places=7)

    def test_single_item_is_posted_price(self) -> None:
        """For one item the LP optimum is the best posted price."""
        prior = HypergraphPrior.create(1, [((0,), {1.0: 0.5, 2.0: 0.5})])
        self.assertAlmostEqual(optimal_revenue(prior).objective, 1.0, places=7)
        for seed in range(50):
            rand = random_prior(seed, m=1, max_edges=1, max_support=4, max_value=9)
            if not rand.active_edges:
                continue
            expected = optimal_posted_price(rand.dist((0,)))[1]
            self.assertAlmostEqual(optimal_revenue(rand).objective, expected, places=6)

    def test_two_edge_prior_bounds(self) -> None:
        """BREV = 1 <= REV <= SINGLE + NONFAV = 1.5."""
        sol = optimal_revenue(two_edge_prior())
        self.assertGreaterEqual(sol.objective, 1.0 - 1e-7)
        self.assertLessEqual(sol.objective, 1.5 + 1e-7)
        self.assertTrue(verify_solution(two_edge_prior(), sol).ok)

    def test_simple_mechanisms_are_lower_bounds(self) -> None:
        """REV >= BREV, the SREV* search and an edge menu; REV <= E[v(M)]."""
        for seed in range(20):
            prior = random_prior(seed)
            table = profile_table(prior)
            sol = optimal_revenue(prior, table)
            check = verify_solution(prior, sol)
            self.assertTrue(check.ok, (seed, check.violations))
            slack = 1e-6 * max(1.0, sol.objective)
            self.assertGreaterEqual(sol.objective + slack, brev(prior, table)[1])
            self.assertGreaterEqual(sol.objective + slack, srev_star_opt(prior, table=table)[1])
            menu = {e: prior.dist(e).max_value for e in prior.active_edges}
            self.assertGreaterEqual(sol.objective + slack, edge_menu_revenue(prior, menu, table))
            self.assertLessEqual(sol.objective, table.expectation(table.grand_values) + slack)

    def test_hundred_random_priors_verify(self) -> None:
        """Every optimum passes IC/IR and matches an interior-point solve of the same LP."""
        for seed in range(100):
            prior = random_prior(seed)
            lp = build_lp(prior)
            sol = solve(lp)
            check = verify_solution(prior, sol)
            self.assertTrue(check.ok, (seed, check.violations))
            ref = linprog(
                -lp.c, A_ub=lp.A_ub, b_ub=lp.b_ub, A_eq=lp.A_eq, b_eq=lp.b_eq, bounds=(0, None), method="highs-ipm"
            )
            self.assertEqual(ref.status, 0, seed)
            self.assertAlmostEqual(sol.objective, -ref.fun, delta=1e-6 * max(1.0, sol.objective), msg=seed)

    def test_zero_mechanism_verifies(self) -> None:
        """Never selling is feasible with objective 0."""
        table = profile_table(two_edge_prior())
        check = verify_solution(two_edge_prior(), MechanismSolution.zero(table))
        self.assertTrue(check.ok)

    def test_corrupted_payment_fails(self) -> None:
        """Raising one type's payment by 0.1 breaks the certificate."""
        prior = two_edge_prior()
        sol = optimal_revenue(prior)
        payments = sol.payments.copy()
        payments[-1] += 0.1
        bad = MechanismSolution(sol.m, sol.profiles, sol.probs, sol.lotteries, payments, sol.objective)
        check = verify_solution(prior, bad)
        self.assertFalse(check.ok)
        self.assertTrue(check.violations)

    def test_solution_serializes(self) -> None:
        """to_dict lists every type with its lottery and payment."""
        sol = optimal_revenue(two_edge_prior())
        data = sol.to_dict()
        self.assertEqual(len(data["types"]), 4)
        self.assertAlmostEqual(sum(t["prob"] for t in data["types"]), 1.0)
        for entry in data["types"]:
            self.assertAlmostEqual(sum(p["prob"] for p in entry["lottery"]), 1.0, places=6)
        self.assertTrue(np.isfinite(data["objective"]))


if __name__ == "__main__":
    unittest.main()
