"""
Simple selling mechanisms for the complements revenue lab.

This module evaluates, exactly over a ProfileTable:
- Grand-bundle pricing (BREV)
- Item pricing under pessimistic sale accounting (SREV*) and a grid search for it
- Item pricing under optimistic accounting, the quantity the lower-bound
  constructions bound
- A menu of priced hyperedges, a truthful mechanism used as a revenue lower bound

Buyer utilities are computed for all 2^m bundles at once: U[p, S] = v_p(S) - price(S).
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .config import (
    DEFAULT_GRID_DENSITY,
    SREV_ASCENT_MAX_ROUNDS,
    SREV_EXHAUSTIVE_MAX_ITEMS,
    SREV_EXHAUSTIVE_MAX_VECTORS,
    UTILITY_TOL,
    RunConfig,
)
from .errors import DomainError
from .model import DiscreteDist, Hyperedge, HypergraphPrior, ProfileTable, edge_mask, profile_table
from .myerson import optimal_posted_price

logger = logging.getLogger(__name__)

# Upper bound on price vectors x profiles x bundles evaluated in one numpy batch
BATCH_CELLS: int = 2_000_000


@dataclass(frozen=True)
class ItemPricing:
    """Per-item prices; inf means the item is not offered."""

    prices: Tuple[float, ...]

    def __post_init__(self) -> None:
        prices = tuple(float(p) for p in self.prices)
        if any(math.isnan(p) or p < 0.0 for p in prices):
            raise DomainError(f"item prices must be non-negative, got {prices}")
        object.__setattr__(self, "prices", prices)

    @classmethod
    def not_offered(cls, m: int) -> "ItemPricing":
        return cls((math.inf,) * m)

    @property
    def m(self) -> int:
        return len(self.prices)

    def bundle_prices(self) -> np.ndarray:
        return bundle_price_matrix(np.asarray([self.prices]))[0]


def _table(prior: HypergraphPrior, table: Optional[ProfileTable], config: Optional[RunConfig]) -> ProfileTable:
    return table if table is not None else profile_table(prior, config)


@lru_cache(maxsize=32)
def item_membership(m: int) -> np.ndarray:
    """Boolean (m, 2^m) array: row i marks the bundles containing item i."""
    idx = np.arange(1 << m)
    out = np.stack([((idx >> i) & 1).astype(bool) for i in range(m)])
    out.flags.writeable = False
    return out


def bundle_price_matrix(prices: np.ndarray) -> np.ndarray:
    """(B, m) item prices to (B, 2^m) bundle prices; any inf item makes the bundle inf."""
    prices = np.atleast_2d(np.asarray(prices, dtype=float))
    b, m = prices.shape
    out = np.zeros((b, 1 << m))
    idx = np.arange(1 << m)
    for i in range(m):
        bit = 1 << i
        upper = idx[(idx & bit) != 0]
        out[:, upper] = out[:, upper ^ bit] + prices[:, i : i + 1]
    return out


def brev(
    prior: HypergraphPrior, table: Optional[ProfileTable] = None, config: Optional[RunConfig] = None
) -> Tuple[float, float]:
    """
    Optimal grand-bundle price and its revenue, max_p p * Pr[v(M) >= p].

    Searched over the support of v(M); ties go to the lower price. Mass a
    sparse table leaves out is placed at value 0, so the result is exact for
    the enumerated part.
    """
    t = _table(prior, table, config)
    return optimal_posted_price(grand_value_distribution(t))


def grand_value_distribution(table: ProfileTable) -> DiscreteDist:
    values = np.append(table.grand_values, 0.0)
    weights = np.append(table.probs, table.omitted_mass)
    return DiscreteDist.from_weighted_values(values, weights)


def _sales(utility: np.ndarray, member: np.ndarray, optimistic: bool, limit: bool) -> np.ndarray:
    """
    Per (vector, profile, item) sale indicator from a (B, P, 2^m) utility array.

    Verbatim pessimistic rule: some bundle with the item has utility > 0 and
    no bundle without it does. The limit rule is the same as prices approach
    the candidate from below. Optimistic: some bundle with the item has
    utility >= 0.
    """
    m = member.shape[0]
    sold = np.zeros(utility.shape[:2] + (m,), dtype=bool)
    nonempty = np.arange(member.shape[1]) != 0
    for i in range(m):
        inside = utility[:, :, member[i]]
        if optimistic:
            sold[:, :, i] = (inside >= -UTILITY_TOL).any(axis=2)
            continue
        outside = utility[:, :, ~member[i] & nonempty]
        if limit:
            wants = (inside >= -UTILITY_TOL).any(axis=2)
            clear = (outside < -UTILITY_TOL).all(axis=2) if outside.shape[2] else np.ones_like(wants)
        else:
            wants = (inside > UTILITY_TOL).any(axis=2)
            clear = (outside <= UTILITY_TOL).all(axis=2) if outside.shape[2] else np.ones_like(wants)
        sold[:, :, i] = wants & clear
    return sold


def _per_profile_revenue(
    table: ProfileTable, price_vectors: np.ndarray, optimistic: bool = False, limit: bool = False
) -> np.ndarray:
    """(B, P) revenue of each price vector on each profile."""
    price_vectors = np.atleast_2d(np.asarray(price_vectors, dtype=float))
    utility = table.values[None, :, :] - bundle_price_matrix(price_vectors)[:, None, :]
    sold = _sales(utility, item_membership(table.m), optimistic, limit)
    paid = np.where(sold, price_vectors[:, None, :], 0.0)
    return paid.sum(axis=2)


def _batched_revenue(table: ProfileTable, price_vectors: np.ndarray, **rule) -> np.ndarray:
    vectors = np.atleast_2d(np.asarray(price_vectors, dtype=float))
    if table.size == 0:
        return np.zeros(len(vectors))
    step = max(1, BATCH_CELLS // max(1, table.size * (1 << table.m)))
    out = np.empty(len(vectors))
    for start in range(0, len(vectors), step):
        chunk = vectors[start : start + step]
        out[start : start + step] = _per_profile_revenue(table, chunk, **rule) @ table.probs
    return out


def srev_star_values(table: ProfileTable, pricing: ItemPricing) -> np.ndarray:
    """Per-profile pessimistic item-pricing revenue."""
    return _per_profile_revenue(table, np.asarray([pricing.prices]))[0]


def srev_star_eval(
    prior: HypergraphPrior,
    pricing: ItemPricing,
    table: Optional[ProfileTable] = None,
    config: Optional[RunConfig] = None,
) -> float:
    """
    E[sum_i P_i * p_i] with P_i the pessimistic sale indicator.

    P_i holds when some bundle containing i gives positive utility and no
    bundle without i does.
    """
    t = _table(prior, table, config)
    if pricing.m != t.m:
        raise DomainError(f"pricing has {pricing.m} items, instance has {t.m}")
    return t.expectation(srev_star_values(t, pricing))


def srev_upper_eval(
    prior: HypergraphPrior,
    pricing: ItemPricing,
    table: Optional[ProfileTable] = None,
    config: Optional[RunConfig] = None,
) -> float:
    """Optimistic item-pricing revenue, sum_i p_i * Pr[some S containing i has v(S) >= price(S)]."""
    t = _table(prior, table, config)
    if pricing.m != t.m:
        raise DomainError(f"pricing has {pricing.m} items, instance has {t.m}")
    return float(_batched_revenue(t, np.asarray([pricing.prices]), optimistic=True)[0])


def _thin(values: Sequence[float], density: int) -> List[float]:
    if len(values) <= density:
        return list(values)
    picks = np.unique(np.round(np.linspace(0, len(values) - 1, density)).astype(int))
    return [values[i] for i in picks]


def candidate_prices(
    table: ProfileTable,
    grid_density: int = DEFAULT_GRID_DENSITY,
    extra: Optional[Mapping[int, Iterable[float]]] = None,
) -> Tuple[Tuple[float, ...], ...]:
    """
    Per-item SREV* search grid.

    Candidates are average values v(S)/|S| and marginal values v(S) - v(S - i)
    over bundles of at most two items on every profile, thinned to
    `grid_density` evenly spaced picks. Prices in `extra` are always kept; 0
    and inf (not offered) are always present.
    """
    m = table.m
    extra = extra or {}
    small = [mask for mask in range(1, 1 << m) if bin(mask).count("1") <= 2]
    averages = np.concatenate(
        [table.values[:, mask] / bin(mask).count("1") for mask in small]
    ) if table.size else np.zeros(0)
    grids = []
    for i in range(m):
        bit = 1 << i
        marginal = [table.values[:, mask] - table.values[:, mask ^ bit] for mask in small if mask & bit]
        pool = np.concatenate([averages] + marginal) if table.size else np.zeros(0)
        pool = np.unique(pool[np.isfinite(pool) & (pool > 0.0)])
        picked = set(_thin(pool.tolist(), grid_density))
        picked.update(float(p) for p in extra.get(i, ()) if p > 0.0 and math.isfinite(p))
        grids.append((0.0,) + tuple(sorted(picked)) + (math.inf,))
    return tuple(grids)


def _search_grid(
    table: ProfileTable, grids: Sequence[Sequence[float]]
) -> Tuple[Tuple[float, ...], float, bool]:
    m = table.m
    sizes = [len(g) for g in grids]
    if m <= SREV_EXHAUSTIVE_MAX_ITEMS and math.prod(sizes) <= SREV_EXHAUSTIVE_MAX_VECTORS:
        vectors = np.array(list(itertools.product(*grids)), dtype=float).reshape(-1, m)
        scores = _batched_revenue(table, vectors, limit=True)
        best = 0
        for j in range(1, len(scores)):
            if scores[j] > scores[best] + UTILITY_TOL * max(1.0, scores[best]):
                best = j
        return tuple(vectors[best]), float(scores[best]), True
    current = np.full(m, math.inf)
    best_score = 0.0
    for round_no in range(SREV_ASCENT_MAX_ROUNDS):
        improved = False
        for i in range(m):
            trial = np.tile(current, (len(grids[i]), 1))
            trial[:, i] = grids[i]
            scores = _batched_revenue(table, trial, limit=True)
            j = int(np.argmax(scores))
            if scores[j] > best_score + UTILITY_TOL * max(1.0, best_score):
                current, best_score, improved = trial[j].copy(), float(scores[j]), True
        if not improved:
            logger.debug("SREV* coordinate ascent converged after %d rounds", round_no + 1)
            break
    return tuple(current), best_score, False


def srev_star_opt(
    prior: HypergraphPrior,
    grid: Optional[Sequence] = None,
    grid_density: Optional[int] = None,
    table: Optional[ProfileTable] = None,
    config: Optional[RunConfig] = None,
    extra: Optional[Mapping[int, Iterable[float]]] = None,
) -> Tuple[ItemPricing, float]:
    """
    Best item pricing over a finite grid; a lower bound on SREV*.

    `grid` is either one price list shared by all items or one list per item;
    inf is always added. Without it the grid comes from candidate_prices.
    Candidates are scored by the pessimistic revenue in the limit of prices
    approaching them from below, which is a supremum of attainable revenues.
    The search is exhaustive for small instances and coordinate ascent
    otherwise.
    """
    t = _table(prior, table, config)
    if grid is None:
        density = grid_density or (config.grid_density if config else DEFAULT_GRID_DENSITY)
        grids = candidate_prices(t, density, extra)
    else:
        per_item = list(grid) if grid and isinstance(grid[0], (list, tuple, np.ndarray)) else [grid] * t.m
        if len(per_item) != t.m:
            raise DomainError(f"grid lists {len(per_item)} items, instance has {t.m}")
        grids = tuple(tuple(sorted({float(p) for p in g} | {math.inf})) for g in per_item)
    prices, revenue, exhaustive = _search_grid(t, grids)
    logger.debug(
        "SREV* search over %s candidates (%s): revenue %.6g",
        [len(g) for g in grids],
        "exhaustive" if exhaustive else "coordinate ascent",
        revenue,
    )
    return ItemPricing(prices), revenue


def edge_menu_values(table: ProfileTable, edge_prices: Mapping[Hyperedge, float]) -> np.ndarray:
    """Per-profile payment when the buyer picks from the menu of priced sets."""
    entries = sorted(
        ((float(p), edge_mask(e)) for e, p in edge_prices.items() if not math.isinf(float(p))),
        key=lambda entry: entry[0],
    )
    if not entries or table.size == 0:
        return np.zeros(table.size)
    prices = np.array([0.0] + [p for p, _ in entries])
    masks = [0] + [mask for _, mask in entries]
    utility = table.values[:, masks] - prices[None, :]
    best = utility.max(axis=1, keepdims=True)
    # First entry within tolerance of the best is the cheapest, so ties go low.
    choice = np.argmax(utility >= best - UTILITY_TOL, axis=1)
    return prices[choice]


def edge_menu_revenue(
    prior: HypergraphPrior,
    edge_prices: Mapping[Iterable[int], float],
    table: Optional[ProfileTable] = None,
    config: Optional[RunConfig] = None,
) -> float:
    """
    Expected payment of the menu {(S, price_S)} plus the free no-purchase option.

    The buyer takes a utility-maximizing entry and indifference goes to the
    lower price. A menu is a truthful mechanism, so this is a lower bound on
    the optimal revenue.
    """
    t = _table(prior, table, config)
    menu: Dict[Hyperedge, float] = {tuple(sorted(e)): float(p) for e, p in edge_prices.items()}
    for e in menu:
        if not e or e[-1] >= t.m:
            raise DomainError(f"menu set {e} is not a bundle of the instance")
    return t.expectation(edge_menu_values(t, menu))
