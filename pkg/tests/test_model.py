"""
Unit tests for the model module.

Validates:
- Distribution and prior validation (supports, probabilities, duplicate and infeasible edges)
- v(S) by enumeration and by the transform-based valuation table agree
- Region assignment and its lexicographic tie-break
- Exact, Monte Carlo and sparse profile tables
"""

import math
import unittest

import numpy as np

from src.config import RunConfig
from src.errors import CapacityError, DomainError
from src.model import (
    DiscreteDist,
    FeasibilityFamily,
    HypergraphPrior,
    WeightProfile,
    complementarity_degree,
    count_distribution,
    enumerate_profiles,
    monte_carlo_profiles,
    profile_table,
    region,
    sample_profile,
    sparse_profile_table,
    valuation_table,
    value,
)
from src.random_priors import random_prior


def two_edge_prior() -> HypergraphPrior:
    return HypergraphPrior.create(
        2,
        [((0,), {0.0: 0.5, 1.0: 0.5}), ((0, 1), {0.0: 0.5, 2.0: 0.5})],
    )


class TestDiscreteDist(unittest.TestCase):
    """Tests for DiscreteDist validation and queries."""

    def test_from_pairs_sorts_support(self) -> None:
        """from_pairs accepts unordered pairs and sorts by value."""
        dist = DiscreteDist.from_pairs([(2.0, 0.25), (1.0, 0.75)])
        self.assertEqual(dist.support, (1.0, 2.0))
        self.assertEqual(dist.pmf, (0.75, 0.25))

    def test_rejects_bad_distributions(self) -> None:
        """Negative values, zero masses, repeats and bad totals are domain errors."""
        with self.assertRaises(DomainError):
            DiscreteDist((-1.0,), (1.0,))
        with self.assertRaises(DomainError):
            DiscreteDist((0.0, 1.0), (1.0, 0.0))
        with self.assertRaises(DomainError):
            DiscreteDist((1.0, 1.0), (0.5, 0.5))
        with self.assertRaises(DomainError):
            DiscreteDist((0.0, 1.0), (0.5, 0.4))
        with self.assertRaises(DomainError):
            DiscreteDist((), ())

    def test_tail_probabilities(self) -> None:
        """prob_greater is strict and prob_at_least is weak."""
        dist = DiscreteDist((0.0, 1.0, 2.0), (0.5, 0.25, 0.25))
        self.assertAlmostEqual(dist.prob_greater(1.0), 0.25)
        self.assertAlmostEqual(dist.prob_at_least(1.0), 0.5)
        self.assertEqual(dist.next_support(1.0), 2.0)
        self.assertIsNone(dist.next_support(2.0))
        self.assertAlmostEqual(dist.mean(), 0.75)

    def test_index_of_unknown_value_raises(self) -> None:
        """index_of raises a domain error off the support."""
        with self.assertRaises(DomainError):
            DiscreteDist.point_mass(1.0).index_of(2.0)

    def test_from_weighted_values_merges_and_drops(self) -> None:
        """Equal values merge, zero weights vanish and masses renormalize."""
        dist = DiscreteDist.from_weighted_values([3.0, 1.0, 3.0, 5.0], [0.25, 0.25, 0.25, 0.0])
        self.assertEqual(dist.support, (1.0, 3.0))
        self.assertAlmostEqual(dist.pmf[1], 2.0 / 3.0)


class TestHypergraphPrior(unittest.TestCase):
    """Tests for prior construction."""

    def test_infeasible_edges_are_dropped(self) -> None:
        """Edges outside the feasibility family never enter the prior."""
        prior = HypergraphPrior.create(
            2,
            [((0,), {1.0: 1.0}), ((0, 1), {2.0: 1.0})],
            FeasibilityFamily.cardinality(1),
        )
        self.assertEqual(prior.active_edges, ((0,),))

    def test_duplicate_edge_raises(self) -> None:
        """Listing the same hyperedge twice is a domain error."""
        with self.assertRaises(DomainError):
            HypergraphPrior(2, (((0, 1), DiscreteDist.point_mass(1.0)), ((1, 0), DiscreteDist.point_mass(1.0))))

    def test_item_out_of_range_raises(self) -> None:
        """Edges may only use items 0..m-1."""
        with self.assertRaises(DomainError):
            HypergraphPrior.create(2, [((0, 2), {1.0: 1.0})])

    def test_trivial_edges_are_inactive(self) -> None:
        """An edge whose weight is identically zero is not active."""
        prior = HypergraphPrior.create(2, [((0,), {0.0: 1.0}), ((1,), {0.0: 0.5, 1.0: 0.5})])
        self.assertEqual(prior.active_edges, ((1,),))
        self.assertEqual(prior.profile_count, 2)

    def test_complementarity_degree(self) -> None:
        """Degree counts the active edges through the busiest item."""
        self.assertEqual(complementarity_degree(two_edge_prior()), 2)
        empty = HypergraphPrior.create(3, [])
        self.assertEqual(complementarity_degree(empty), 0)
        every = HypergraphPrior.create(
            3, [(edge, {1.0: 1.0}) for edge in [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]]
        )
        self.assertEqual(complementarity_degree(every), 4)


class TestValue(unittest.TestCase):
    """Tests for v(S)."""

    def test_value_sums_contained_edges(self) -> None:
        """With every bundle feasible, v(S) sums the edges inside S."""
        profile = WeightProfile.from_dict({(0,): 1.0, (0, 1): 2.0})
        self.assertEqual(value(profile, FeasibilityFamily.all_sets(), (0, 1)), 3.0)
        self.assertEqual(value(profile, FeasibilityFamily.all_sets(), (1,)), 0.0)

    def test_empty_bundle_is_worth_zero(self) -> None:
        """v(empty set) = 0."""
        profile = WeightProfile.from_dict({(0,): 5.0})
        self.assertEqual(value(profile, FeasibilityFamily.all_sets(), ()), 0.0)

    def test_value_respects_feasibility(self) -> None:
        """Only feasible subsets of S count."""
        profile = WeightProfile.from_dict({(0,): 1.0, (0, 1): 2.0})
        family = FeasibilityFamily.explicit([(0,), (1,)])
        self.assertEqual(value(profile, family, (0, 1)), 1.0)

    def test_subset_cap(self) -> None:
        """Bundles with too many subsets raise a capacity error naming the setting."""
        profile = WeightProfile.from_dict({(0,): 1.0})
        with self.assertRaises(CapacityError) as ctx:
            value(profile, FeasibilityFamily.all_sets(), (0, 1, 2), max_subsets=4)
        self.assertEqual(ctx.exception.cap_name, "max_subsets")
        self.assertIn("MAX_SUBSETS in src/config.py", str(ctx.exception))
        self.assertNotIn("--cap", str(ctx.exception))

    def test_valuation_table_matches_enumeration(self) -> None:
        """The transform-based table equals per-bundle enumeration on random priors."""
        for seed in range(25):
            prior = random_prior(seed, m=3)
            rng = np.random.default_rng(seed)
            profile = sample_profile(prior, rng)
            table = valuation_table(profile, prior.feasibility, prior.m)
            for mask in range(1 << prior.m):
                self.assertAlmostEqual(table[mask], value(profile, prior.feasibility, mask), places=12)

    def test_value_is_monotone(self) -> None:
        """v(S) <= v(S') whenever S is a subset of S'."""
        prior = random_prior(11, m=3)
        profile = sample_profile(prior, 4)
        table = valuation_table(profile, prior.feasibility, prior.m)
        for small in range(8):
            for big in range(8):
                if small & ~big == 0:
                    self.assertLessEqual(table[small], table[big] + 1e-12)


class TestRegion(unittest.TestCase):
    """Tests for region assignment."""

    def test_heaviest_edge_wins(self) -> None:
        """The favorite is the heaviest edge."""
        profile = WeightProfile.from_dict({(0,): 1.0, (0, 1): 2.0})
        self.assertEqual(region(profile), (0, 1))

    def test_tie_goes_to_lexicographic_first(self) -> None:
        """Equal weights go to the lexicographically smaller edge."""
        profile = WeightProfile.from_dict({(0,): 1.0, (1,): 1.0})
        self.assertEqual(region(profile), (0,))
        prefix = WeightProfile.from_dict({(0,): 1.0, (0, 1): 1.0})
        self.assertEqual(region(prefix), (0,))

    def test_all_zero_profile(self) -> None:
        """With every weight zero the favorite is the first singleton."""
        profile = WeightProfile.from_dict({(1,): 0.0, (0, 1): 0.0})
        self.assertEqual(region(profile), (0,))


class TestProfileTables(unittest.TestCase):
    """Tests for exact, Monte Carlo and sparse type spaces."""

    def test_enumeration_product_structure(self) -> None:
        """Profile count is the product of support sizes and masses sum to one."""
        prior = HypergraphPrior.create(
            3,
            [
                ((0,), {0.0: 0.5, 1.0: 0.5}),
                ((1,), {0.0: 0.2, 1.0: 0.3, 2.0: 0.5}),
                ((2,), {1.0: 0.5, 3.0: 0.5}),
            ],
        )
        weighted = enumerate_profiles(prior)
        self.assertEqual(len(weighted), 12)
        self.assertAlmostEqual(math.fsum(p for _, p in weighted), 1.0)

    def test_single_edge_enumeration(self) -> None:
        """One edge enumerates to its own distribution."""
        prior = HypergraphPrior.create(1, [((0,), {0.0: 0.5, 1.0: 0.5})])
        weighted = enumerate_profiles(prior)
        self.assertEqual([(p.values, w) for p, w in weighted], [((0.0,), 0.5), ((1.0,), 0.5)])

    def test_exact_mode_over_cap_raises(self) -> None:
        """Exact mode refuses priors above the profile cap."""
        with self.assertRaises(CapacityError) as ctx:
            profile_table(two_edge_prior(), RunConfig(max_profiles=3))
        self.assertEqual(ctx.exception.cap_name, "max_profiles")
        self.assertEqual(ctx.exception.requested, 4)

    def test_monte_carlo_mode_over_cap_samples(self) -> None:
        """Monte Carlo mode samples when the prior is over the cap."""
        config = RunConfig(max_profiles=3, mode="mc", mc_samples=2000, seed=5)
        table = profile_table(two_edge_prior(), config)
        self.assertEqual(table.mode, "monte-carlo")
        self.assertAlmostEqual(float(table.probs.sum()), 1.0)
        mean, se = table.estimate(table.grand_values)
        self.assertGreater(se, 0.0)
        self.assertLess(abs(mean - 1.5), 5 * se + 1e-12)

    def test_sampling_is_deterministic(self) -> None:
        """A fixed seed gives the same profile twice."""
        prior = random_prior(3)
        self.assertEqual(sample_profile(prior, 17), sample_profile(prior, 17))

    def test_point_mass_prior_has_one_profile(self) -> None:
        """All point masses give the unique profile."""
        prior = HypergraphPrior.create(2, [((0,), {2.0: 1.0}), ((1,), {3.0: 1.0})])
        self.assertEqual(sample_profile(prior, 0).values, (2.0, 3.0))
        self.assertEqual(len(enumerate_profiles(prior)), 1)

    def test_sampled_marginals_match_pmf(self) -> None:
        """Empirical edge marginals over 10^5 samples are within four standard errors."""
        prior = two_edge_prior()
        n = 100_000
        weighted = monte_carlo_profiles(prior, n, seed=42)
        for j, edge in enumerate(prior.active_edges):
            dist = prior.dist(edge)
            for x, p in zip(dist.support, dist.pmf):
                freq = math.fsum(w for profile, w in weighted if profile.values[j] == x)
                self.assertLess(abs(freq - p), 4 * math.sqrt(p * (1 - p) / n))

    def test_sparse_table_mass_and_value_bound(self) -> None:
        """Sparse enumeration keeps exact probabilities and reports what it leaves out."""
        prior = HypergraphPrior.create(3, [((i,), {0.0: 0.5, 1.0: 0.5}) for i in range(3)])
        table = sparse_profile_table(prior, max_nonzero=1)
        self.assertEqual(table.size, 4)
        self.assertTrue(np.allclose(table.probs, 0.125))
        self.assertAlmostEqual(table.omitted_mass, 0.5)
        self.assertAlmostEqual(table.omitted_value_bound, 1.125)

    def test_sparse_table_needs_zero_atoms(self) -> None:
        """Every edge must have an atom at zero."""
        prior = HypergraphPrior.create(1, [((0,), {1.0: 0.5, 2.0: 0.5})])
        with self.assertRaises(DomainError):
            sparse_profile_table(prior, 1)

    def test_count_distribution(self) -> None:
        """Counts of independent successes follow the Poisson-binomial law."""
        dist = count_distribution([0.5, 0.5])
        self.assertTrue(np.allclose(dist, [0.25, 0.5, 0.25]))


if __name__ == "__main__":
    unittest.main()
