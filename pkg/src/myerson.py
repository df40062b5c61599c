"""
Single-dimensional revenue machinery for the complements revenue lab.

Discrete virtual values, ironing by the concave envelope of the revenue curve,
optimal posted prices, the copies-environment benchmark and the randomized
per-edge prices that trade revenue against total sale probability.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .config import EXACT_TOL, PMF_TOL
from .errors import DomainError
from .model import DiscreteDist, Hyperedge, HypergraphPrior

logger = logging.getLogger(__name__)

PRICE_TIE_TOL: float = 1e-12


@dataclass(frozen=True)
class VirtualValueTable:
    """Virtual and ironed virtual values at every support point of a distribution."""

    dist: DiscreteDist
    phi: Tuple[float, ...]
    phi_bar: Tuple[float, ...]

    def phi_at(self, x: float) -> float:
        return self.phi[self.dist.index_of(x)]

    def phi_bar_at(self, x: float) -> float:
        return self.phi_bar[self.dist.index_of(x)]

    def clipped(self) -> DiscreteDist:
        """Distribution of max(0, phi_bar(X)), with an atom at 0 when phi_bar can be negative."""
        return DiscreteDist.from_weighted_values([max(0.0, v) for v in self.phi_bar], self.dist.pmf)

    def least_value_reaching(self, level: float) -> float:
        """Least support value x with phi_bar(x) >= level; inf if there is none."""
        if math.isinf(level):
            return math.inf
        for x, v in zip(self.dist.support, self.phi_bar):
            if v >= level - PMF_TOL * max(1.0, abs(level)):
                return x
        return math.inf


def virtual_value(dist: DiscreteDist, x: float) -> float:
    """
    Discrete virtual value phi(x) = x - (x+ - x) * Pr[X > x] / f(x).

    x+ is the next support point; at the top of the support phi(x) = x.

    Raises:
        DomainError: If x is not a support point
    """
    j = dist.index_of(x)
    if j == dist.size - 1:
        return dist.support[j]
    upper = math.fsum(dist.pmf[j + 1 :])
    return dist.support[j] - (dist.support[j + 1] - dist.support[j]) * upper / dist.pmf[j]


def _upper_hull(points: Sequence[Tuple[float, float]]) -> List[Tuple[float, float]]:
    hull: List[Tuple[float, float]] = []
    for p in points:
        while len(hull) >= 2:
            (ox, oy), (ax, ay) = hull[-2], hull[-1]
            if (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox) >= 0.0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


@lru_cache(maxsize=4096)
def iron(dist: DiscreteDist) -> VirtualValueTable:
    """
    Virtual values and their ironed version.

    The revenue curve in quantile space has points (q_j, x_j * q_j) with
    q_j = Pr[X >= x_j], plus the origin. phi_bar at x_j is the slope of its
    upper concave envelope between q_{j+1} and q_j, so phi_bar is
    non-decreasing and agrees with phi wherever phi already is.
    """
    n = dist.size
    pmf = np.asarray(dist.pmf)
    quantiles = np.append(np.cumsum(pmf[::-1])[::-1], 0.0)
    quantiles[0] = 1.0
    revenue = np.append(np.asarray(dist.support) * quantiles[:n], 0.0)
    points = sorted(zip(quantiles.tolist(), revenue.tolist()))
    hull = _upper_hull(points)
    hull_q = np.array([p[0] for p in hull])
    hull_r = np.array([p[1] for p in hull])
    envelope = np.interp(quantiles, hull_q, hull_r)
    phi_bar = (envelope[:n] - envelope[1:]) / (quantiles[:n] - quantiles[1:])
    phi = tuple(virtual_value(dist, x) for x in dist.support)
    # Rounding in the interpolation must not break monotonicity.
    phi_bar_t = tuple(float(v) for v in np.maximum.accumulate(phi_bar))
    return VirtualValueTable(dist, phi, phi_bar_t)


def posted_price_revenue(dist: DiscreteDist, price: float) -> float:
    if math.isinf(price):
        return 0.0
    return price * dist.prob_at_least(price)


def optimal_posted_price(dist: DiscreteDist) -> Tuple[float, float]:
    """
    Revenue-maximizing take-it-or-leave-it price, searched over the support.

    Ties go to the lower price.
    """
    pmf = np.asarray(dist.pmf)
    survival = np.cumsum(pmf[::-1])[::-1]
    best_price, best_rev = dist.support[0], dist.support[0] * 1.0
    for x, s in zip(dist.support, survival.tolist()):
        rev = x * min(1.0, s)
        if rev > best_rev + PRICE_TIE_TOL * max(1.0, best_rev):
            best_price, best_rev = x, rev
    return best_price, best_rev


def max_distribution_mean(dists: Sequence[DiscreteDist]) -> float:
    """E[max(0, X_1, ..., X_n)] for independent non-negative variables, via the product of CDFs."""
    if not dists:
        return 0.0
    points = sorted({0.0} | {x for d in dists for x in d.support})
    cdf = np.ones(len(points))
    for d in dists:
        cum = np.cumsum(d.pmf)
        idx = np.searchsorted(np.asarray(d.support), np.asarray(points), side="right") - 1
        cdf *= np.where(idx >= 0, cum[np.clip(idx, 0, None)], 0.0)
    mass = np.diff(np.concatenate(([0.0], cdf)))
    return float(np.dot(np.asarray(points), mass))


def copies_distributions(prior: HypergraphPrior) -> List[DiscreteDist]:
    """max(0, phi_bar_T(w(T))) for every active edge, in lexicographic edge order."""
    return [iron(prior.dist(e)).clipped() for e in prior.active_edges]


def opt_copies(prior: HypergraphPrior) -> float:
    """
    Optimal revenue of the copies environment, E[max_T max(0, phi_bar_T(w(T)))].

    Edges are independent, so the expectation is computed exactly from the
    product of per-edge CDFs without enumerating profiles.
    """
    return max_distribution_mean(copies_distributions(prior))


def win_probabilities(dists: Sequence[DiscreteDist]) -> List[float]:
    """
    Pr[X_i is the maximum] under the first-wins tie-break.

    X_i wins at y when every earlier variable is strictly below y and every
    later one is at most y. The probabilities sum to one.
    """
    out = []
    for i, di in enumerate(dists):
        total = 0.0
        for y, p in zip(di.support, di.pmf):
            prob = p
            for j, dj in enumerate(dists):
                if j == i:
                    continue
                prob *= (1.0 - dj.prob_at_least(y)) if j < i else (1.0 - dj.prob_greater(y))
                if prob == 0.0:
                    break
            total += prob
        out.append(total)
    return out


@dataclass(frozen=True)
class EdgePriceLottery:
    """
    Two-point randomized price for one hyperedge.

    With probability prob_high the threshold is threshold_high and the price
    price_high; otherwise threshold_low and price_low. A price of inf means the
    edge is not offered on that branch.
    """

    edge: Hyperedge
    win_prob: float
    target: float
    threshold_low: float
    threshold_high: float
    prob_high: float
    price_low: float
    price_high: float

    @property
    def is_deterministic(self) -> bool:
        return self.prob_high in (0.0, 1.0) or self.price_low == self.price_high

    def branches(self) -> List[Tuple[float, float]]:
        """(price, probability) pairs with positive probability."""
        out = []
        if self.prob_high < 1.0:
            out.append((self.price_low, 1.0 - self.prob_high))
        if self.prob_high > 0.0:
            out.append((self.price_high, self.prob_high))
        return out

    def expected_revenue(self, dist: DiscreteDist) -> float:
        return math.fsum(w * posted_price_revenue(dist, p) for p, w in self.branches())

    def sale_probability(self, dist: DiscreteDist) -> float:
        return math.fsum(w * (0.0 if math.isinf(p) else dist.prob_at_least(p)) for p, w in self.branches())


@dataclass(frozen=True)
class RandomizedEdgePricing:
    q: float
    lotteries: Tuple[EdgePriceLottery, ...]

    def lottery(self, edge: Hyperedge) -> EdgePriceLottery:
        for lot in self.lotteries:
            if lot.edge == tuple(edge):
                return lot
        raise DomainError(f"no price lottery for hyperedge {edge}")


def _threshold_mix(dist: DiscreteDist, target: float) -> Tuple[float, float, float]:
    """
    Thresholds (low, high) and Pr[high] with Pr[X >= threshold] = target exactly.

    The high threshold may be inf (never met). Returns a single threshold
    (low == high) when the target is achieved exactly by one support point.
    """
    levels = list(dist.support) + [math.inf]
    survival = [dist.prob_at_least(y) for y in dist.support] + [0.0]
    j = max(i for i, s in enumerate(survival) if s >= target - EXACT_TOL)
    if abs(survival[j] - target) <= EXACT_TOL or j == len(levels) - 1:
        return levels[j], levels[j], 0.0
    theta = (target - survival[j + 1]) / (survival[j] - survival[j + 1])
    return levels[j], levels[j + 1], min(1.0, max(0.0, 1.0 - theta))


def cpp_prices(prior: HypergraphPrior, q: float) -> RandomizedEdgePricing:
    """
    Randomized per-edge prices whose revenue covers OPTcopies at sale budget q.

    For each active edge T with X_T = max(0, phi_bar_T(w(T))), q_T is the
    probability that X_T is the maximum under the first-wins tie-break. The
    threshold t_T mixes two adjacent support points of X_T so that
    Pr[X_T >= t_T] = q * q_T, and p_T is the least value whose ironed virtual
    value reaches t_T.

    Raises:
        DomainError: If q is not in (0, 1]
    """
    if not 0.0 < q <= 1.0:
        raise DomainError(f"q must lie in (0, 1], got {q}")
    tables = [iron(prior.dist(e)) for e in prior.active_edges]
    clipped = [t.clipped() for t in tables]
    wins = win_probabilities(clipped)
    lotteries = []
    for edge, table, xdist, qt in zip(prior.active_edges, tables, clipped, wins):
        target = q * qt
        t_lo, t_hi, prob_high = _threshold_mix(xdist, target)
        lotteries.append(
            EdgePriceLottery(
                edge=edge,
                win_prob=qt,
                target=target,
                threshold_low=t_lo,
                threshold_high=t_hi,
                prob_high=prob_high,
                price_low=table.least_value_reaching(t_lo),
                price_high=table.least_value_reaching(t_hi),
            )
        )
    logger.debug("Copies prices built for %d edges at q=%.4g", len(lotteries), q)
    return RandomizedEdgePricing(q, tuple(lotteries))


@dataclass(frozen=True)
class PricingConditions:
    """Both sides of the revenue and sale-probability guarantees of a copies pricing."""

    q: float
    opt_copies: float
    revenue: float
    sale_probability: float

    @property
    def revenue_bound(self) -> float:
        return self.revenue / self.q

    @property
    def revenue_holds(self) -> bool:
        return self.opt_copies <= self.revenue_bound + EXACT_TOL * max(1.0, self.opt_copies)

    @property
    def sale_probability_holds(self) -> bool:
        return self.sale_probability <= self.q + EXACT_TOL


def check_pricing_conditions(prior: HypergraphPrior, pricing: RandomizedEdgePricing) -> PricingConditions:
    revenue = math.fsum(lot.expected_revenue(prior.dist(lot.edge)) for lot in pricing.lotteries)
    sale = math.fsum(lot.sale_probability(prior.dist(lot.edge)) for lot in pricing.lotteries)
    return PricingConditions(pricing.q, opt_copies(prior), revenue, sale)


def best_branch_price(lottery: EdgePriceLottery, dist: DiscreteDist, floor: float) -> Optional[float]:
    """
    The price used for an edge in the partition pricing argument.

    Only branches priced strictly above `floor` count; the one with the larger
    posted-price revenue wins (the high branch on ties). None when no finite
    branch lies above the floor.
    """
    candidates = [p for p in (lottery.price_high, lottery.price_low) if p > floor and not math.isinf(p)]
    if not candidates:
        return None
    return max(candidates, key=lambda p: posted_price_revenue(dist, p))
