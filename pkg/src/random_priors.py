"""
Seeded random priors for the complements revenue lab.

Used by `gen random` and by sweeps. The same (seed, parameters) always yields
the same prior.
"""

import logging
from typing import List, Optional

import numpy as np

from .model import DiscreteDist, FeasibilityFamily, Hyperedge, HypergraphPrior, mask_items

logger = logging.getLogger(__name__)

DEFAULT_M: int = 3
DEFAULT_MAX_EDGES: int = 3
DEFAULT_MAX_SUPPORT: int = 3
DEFAULT_MAX_VALUE: int = 6
MAX_PMF_WEIGHT: int = 9


def _random_feasibility(rng: np.random.Generator, m: int) -> FeasibilityFamily:
    """All sets w.p. 1/2, a cardinality bound w.p. 1/4, one or two random maximal sets w.p. 1/4."""
    draw = rng.random()
    if draw < 0.5:
        return FeasibilityFamily.all_sets()
    if draw < 0.75:
        return FeasibilityFamily.cardinality(int(rng.integers(1, m + 1)))
    count = int(rng.integers(1, 3))
    masks = rng.integers(1, 1 << m, size=count)
    return FeasibilityFamily.explicit([mask_items(int(mask)) for mask in masks])


def _random_dist(rng: np.random.Generator, max_support: int, max_value: int) -> DiscreteDist:
    size = int(rng.integers(1, min(max_support, max_value + 1) + 1))
    support = np.sort(rng.choice(max_value + 1, size=size, replace=False))
    weights = rng.integers(1, MAX_PMF_WEIGHT + 1, size=size).astype(float)
    return DiscreteDist(tuple(float(x) for x in support), tuple(weights / weights.sum()))


def random_prior(
    seed: int,
    m: int = DEFAULT_M,
    max_edges: int = DEFAULT_MAX_EDGES,
    max_support: int = DEFAULT_MAX_SUPPORT,
    max_value: int = DEFAULT_MAX_VALUE,
) -> HypergraphPrior:
    """
    Draw a random prior.

    Args:
        seed: Seed for numpy's default generator
        m: Number of items
        max_edges: Edge count is uniform in [1, max_edges], capped by the feasible sets
        max_support: Support size is uniform in [1, max_support]
        max_value: Support values are distinct integers in [0, max_value]

    Returns:
        HypergraphPrior: May have no active edges when every drawn
        distribution is the point mass at zero
    """
    rng = np.random.default_rng(int(seed))
    feasibility = _random_feasibility(rng, m)
    feasible = [mask for mask in range(1, 1 << m) if feasibility.contains_mask(mask)]
    count = min(int(rng.integers(1, max_edges + 1)), len(feasible))
    picked = sorted(int(mask) for mask in rng.choice(feasible, size=count, replace=False))
    edges = [(mask_items(mask), _random_dist(rng, max_support, max_value)) for mask in picked]
    logger.debug("Random prior seed=%d: m=%d, %d edges, %s feasibility", seed, m, count, feasibility.kind)
    return HypergraphPrior(m, tuple(edges), feasibility)


def random_edges(m: int, count: int, seed: int, max_size: Optional[int] = None) -> List[Hyperedge]:
    """Up to `count` distinct random hyperedges on m items, each of size at most max_size."""
    rng = np.random.default_rng(int(seed))
    limit = m if max_size is None else max(1, min(m, max_size))
    out = set()
    attempts = 0
    while len(out) < count and attempts < 20 * max(1, count):
        size = int(rng.integers(1, limit + 1))
        out.add(tuple(sorted(int(i) for i in rng.choice(m, size=size, replace=False))))
        attempts += 1
    return sorted(out)
