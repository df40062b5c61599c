"""
Lower-bound instances for the complements revenue lab.

This module builds the instances on which simple mechanisms lose a factor
growing with the complementarity degree, and verifies the gap:
- Edge e (indexed 1 + a, ..., |E| + a in list order) has weight 2^e with
  probability 2^-e and 0 otherwise
- Generators for d-regular graphs, all sets of size at most k, and
  all subsets of disjoint blocks of size k + 1
- verify_lb bounds BREV and SREV from above and the edge-menu revenue from
  below, exactly or over the sparse profile table
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .config import (
    DEFAULT_LB_OFFSET,
    EXACT_TOL,
    LB_GRID_POINTS,
    LB_MAX_EXPONENT,
    MAX_GENERATED_EDGES,
    MENU_DISCOUNT,
    SPARSE_MAX_NONZERO,
    RunConfig,
)
from .errors import CapacityError, DomainError, InstanceFormatError
from .mechanisms import ItemPricing, brev, edge_menu_revenue, item_membership, srev_upper_eval
from .model import (
    DiscreteDist,
    FeasibilityFamily,
    Hyperedge,
    HypergraphPrior,
    ProfileTable,
    complementarity_degree,
    make_edge,
    profile_table,
    sparse_profile_table,
)
from .reporting import InequalityCheck, overall_status

logger = logging.getLogger(__name__)


def _edge_dist(index: int) -> DiscreteDist:
    tail = 2.0**-index
    return DiscreteDist((0.0, 2.0**index), (1.0 - tail, tail))


@dataclass(frozen=True)
class LowerBoundInstance:
    """A prior over all bundles whose edge weights are indexed powers of two."""

    prior: HypergraphPrior
    offset: int
    edges: Tuple[Hyperedge, ...]
    family: str = "lb"
    params: Dict[str, Any] = field(default_factory=dict, compare=False, hash=False)

    @property
    def m(self) -> int:
        return self.prior.m

    def index_of(self, edge: Iterable[int]) -> int:
        return self.edges.index(make_edge(edge)) + self.offset + 1

    def edge_prices(self, discount: float = MENU_DISCOUNT) -> Dict[Hyperedge, float]:
        """Price 2^e (1 - discount) on edge e."""
        return {e: 2.0 ** self.index_of(e) * (1.0 - discount) for e in self.edges}

    def meta(self) -> Dict[str, Any]:
        return {
            "kind": self.family,
            "params": dict(self.params),
            "lower_bound": {"offset": self.offset, "edge_order": [list(e) for e in self.edges]},
        }


def gen_lb_instance(
    edges: Sequence[Iterable[int]],
    a: int = DEFAULT_LB_OFFSET,
    m: Optional[int] = None,
    family: str = "lb",
    params: Optional[Dict[str, Any]] = None,
) -> LowerBoundInstance:
    """
    Build the lower-bound prior for an edge list.

    Args:
        edges: Hyperedges in index order
        a: Index offset, at least 1
        m: Item count; defaults to one past the largest item used (at least 1)

    Raises:
        CapacityError: If 2^(|E| + a) would exceed the exponent cap
        DomainError: If a < 1, an edge repeats or uses an item outside [0, m)
    """
    ordered = [make_edge(e) for e in edges]
    a = int(a)
    if a < 1:
        raise DomainError(f"edge index offset must be at least 1, got {a}")
    if len(ordered) + a > LB_MAX_EXPONENT:
        raise CapacityError(
            f"{len(ordered)} edges with offset {a} need weights up to 2^{len(ordered) + a}, cap is 2^{LB_MAX_EXPONENT}",
            cap_name="lb_max_exponent",
            requested=len(ordered) + a,
            limit=LB_MAX_EXPONENT,
        )
    if m is None:
        m = max((e[-1] + 1 for e in ordered), default=1)
    weighted = [(e, _edge_dist(a + 1 + j)) for j, e in enumerate(ordered)]
    prior = HypergraphPrior(int(m), tuple(weighted), FeasibilityFamily.all_sets())
    return LowerBoundInstance(prior, a, tuple(ordered), family, dict(params or {}))


def _check_edge_count(count: int) -> None:
    if count > MAX_GENERATED_EDGES:
        raise CapacityError(
            f"generator would emit {count} edges, cap is {MAX_GENERATED_EDGES}",
            cap_name="max_generated_edges",
            requested=count,
            limit=MAX_GENERATED_EDGES,
        )


def gen_regular_graph(m: int, d: int) -> List[Hyperedge]:
    """
    Circulant d-regular graph on m items.

    Item i is joined to i +- 1, ..., i +- floor(d/2) mod m, and to i + m/2
    when d is odd.

    Raises:
        DomainError: If m * d is odd or d is not in [0, m)
    """
    if m < 1 or not 0 <= d < m:
        raise DomainError(f"need 0 <= d < m, got m={m}, d={d}")
    if (m * d) % 2:
        raise DomainError(f"no {d}-regular graph on {m} nodes: m * d must be even")
    _check_edge_count(m * d // 2)
    out = set()
    for i in range(m):
        for step in range(1, d // 2 + 1):
            out.add(make_edge((i, (i + step) % m)))
        if d % 2:
            out.add(make_edge((i, (i + m // 2) % m)))
    return sorted(out)


def gen_ph_k(m: int, k: int) -> List[Hyperedge]:
    """All nonempty item sets of size at most k, by size then lexicographically."""
    if m < 1 or not 1 <= k <= m:
        raise DomainError(f"need 1 <= k <= m, got m={m}, k={k}")
    _check_edge_count(sum(math.comb(m, i) for i in range(1, k + 1)))
    return [c for size in range(1, k + 1) for c in itertools.combinations(range(m), size)]


def gen_ps_k(m: int, k: int) -> List[Hyperedge]:
    """
    All nonempty subsets of each block of k + 1 consecutive items.

    Blocks come in item order; within a block, by size then lexicographically.

    Raises:
        DomainError: If k + 1 does not divide m
    """
    if m < 1 or k < 0:
        raise DomainError(f"need m >= 1 and k >= 0, got m={m}, k={k}")
    if m % (k + 1):
        raise DomainError(f"block size {k + 1} does not divide m={m}")
    _check_edge_count((m // (k + 1)) * (2 ** (k + 1) - 1))
    out: List[Hyperedge] = []
    for start in range(0, m, k + 1):
        block = range(start, start + k + 1)
        out.extend(c for size in range(1, k + 2) for c in itertools.combinations(block, size))
    return out


class DegreeClass(NamedTuple):
    degree: int
    ph_degree: int
    ps_degree: int


def classify(prior: HypergraphPrior) -> DegreeClass:
    """Complementarity degree, largest active edge, and largest item neighborhood."""
    edges = prior.active_edges
    neighbors: Dict[int, set] = {i: set() for i in range(prior.m)}
    for e in edges:
        for i in e:
            neighbors[i].update(j for j in e if j != i)
    return DegreeClass(
        complementarity_degree(prior),
        max((len(e) for e in edges), default=0),
        max((len(n) for n in neighbors.values()), default=0),
    )


def predicted_ratio(instance: LowerBoundInstance) -> float:
    """|E| / (2m) * (1 - 2^(1-a)): the guaranteed edge-menu to simple-mechanism ratio."""
    return len(instance.edges) / (2.0 * instance.m) * (1.0 - 2.0 ** (1 - instance.offset))


def family_ratio(kind: str, m: int, k: int) -> float:
    """Closed-form |E| / (2m) of a generator family, before the 2^-a correction."""
    if kind == "regular":
        return k / 4.0
    if kind == "ph":
        return sum(math.comb(m, i) for i in range(1, k + 1)) / (2.0 * m)
    if kind == "ps":
        return (2 ** (k + 1) - 1) / (2.0 * (k + 1))
    raise DomainError(f"unknown generator family {kind!r}")


def lb_table(instance: LowerBoundInstance, config: Optional[RunConfig] = None) -> ProfileTable:
    """Exact table when the instance is enumerable, else the sparse table."""
    config = config or RunConfig()
    prior = instance.prior
    if prior.profile_count <= config.max_profiles:
        return profile_table(prior, config.with_overrides(mode="exact"))
    return sparse_profile_table(prior, SPARSE_MAX_NONZERO, config.max_profiles, config.max_subsets)


def default_price_grid(instance: LowerBoundInstance) -> np.ndarray:
    lo = instance.offset
    hi = len(instance.edges) + instance.offset + 1
    return np.geomspace(2.0**lo, 2.0**hi, LB_GRID_POINTS)


def per_item_srev_bound(table: ProfileTable, grid: Sequence[float]) -> Tuple[float, ...]:
    """
    Per item, max over p in the grid of p * Pr[some bundle containing the item is worth >= p].

    Their sum bounds the optimistic item-pricing revenue of every price vector
    on the grid, since each item sells only if that event happens.
    """
    grid = np.asarray(grid, dtype=float)
    if table.size == 0 or grid.size == 0:
        return (0.0,) * table.m
    member = item_membership(table.m)
    out = []
    for i in range(table.m):
        best_with = table.values[:, member[i]].max(axis=1)
        order = np.argsort(best_with)
        sorted_vals = best_with[order]
        survival = np.concatenate([np.cumsum(table.probs[order][::-1])[::-1], [0.0]])
        first = np.searchsorted(sorted_vals, grid * (1.0 - EXACT_TOL), side="left")
        out.append(float((grid * survival[first]).max()))
    return tuple(out)


@dataclass
class LowerBoundReport:
    instance: LowerBoundInstance
    mode: str
    menu_revenue: float
    brev_upper: float
    brev_price: float
    srev_upper: float
    srev_uniform: float
    omitted_mass: float
    omitted_value_bound: float
    predicted: float
    checks: Tuple[InequalityCheck, ...] = ()

    @property
    def ratio(self) -> float:
        denom = max(self.brev_upper, self.srev_upper)
        return self.menu_revenue / denom if denom > 0.0 else 0.0

    @property
    def status(self) -> str:
        return overall_status(self.checks)

    def scalars(self) -> Dict[str, Any]:
        prior = self.instance.prior
        return {
            "mode": self.mode,
            "m": prior.m,
            "active_edges": len(prior.active_edges),
            "d": complementarity_degree(prior),
            "lb_menu_revenue": self.menu_revenue,
            "lb_brev_upper": self.brev_upper,
            "lb_srev_upper": self.srev_upper,
            "lb_ratio_value": self.ratio,
        }

    def to_dict(self) -> Dict[str, Any]:
        data = dict(self.scalars())
        data.update(
            offset=self.instance.offset,
            edges=[list(e) for e in self.instance.edges],
            brev_price=self.brev_price,
            srev_uniform=self.srev_uniform,
            omitted_mass=self.omitted_mass,
            omitted_value_bound=self.omitted_value_bound,
            predicted_ratio=self.predicted,
            checks=[c.to_dict() for c in self.checks],
            status=self.status,
        )
        return data


def verify_lb(
    instance: LowerBoundInstance,
    price_grid: Optional[Sequence[float]] = None,
    config: Optional[RunConfig] = None,
    table: Optional[ProfileTable] = None,
) -> LowerBoundReport:
    """
    Check BREV <= 2, SREV <= 2m and edge-menu revenue >= |E| (1 - 2^-a).

    BREV and SREV are upper bounds padded by the value a sparse table leaves
    out; the menu revenue is a lower bound since omitted profiles pay at least
    zero. The SREV bound holds for every price vector on the grid, not off it.

    Raises:
        CapacityError: If even the sparse table exceeds the profile cap
    """
    tab = table if table is not None else lb_table(instance, config)
    prior = instance.prior
    grid = default_price_grid(instance) if price_grid is None else np.asarray(price_grid, dtype=float)
    pad = tab.omitted_value_bound

    price, revenue = brev(prior, tab)
    brev_upper = revenue + pad
    per_item = per_item_srev_bound(tab, grid)
    srev_upper = math.fsum(b + pad for b in per_item)
    srev_uniform = max(
        (srev_upper_eval(prior, ItemPricing((float(p),) * prior.m), tab) for p in grid), default=0.0
    )
    menu = edge_menu_revenue(prior, instance.edge_prices(), tab)

    n_edges = len(instance.edges)
    report = LowerBoundReport(
        instance=instance,
        mode=tab.mode,
        menu_revenue=menu,
        brev_upper=brev_upper,
        brev_price=price,
        srev_upper=srev_upper,
        srev_uniform=srev_uniform,
        omitted_mass=tab.omitted_mass,
        omitted_value_bound=pad,
        predicted=predicted_ratio(instance),
    )
    report.checks = (
        InequalityCheck.evaluate("lb_brev", brev_upper, 2.0, EXACT_TOL),
        InequalityCheck.evaluate("lb_srev", srev_upper, 2.0 * prior.m, EXACT_TOL, "certified on the price grid only"),
        InequalityCheck.evaluate("lb_edge_menu", n_edges * (1.0 - 2.0**-instance.offset), menu, EXACT_TOL),
        InequalityCheck.evaluate("lb_ratio", report.predicted, report.ratio, EXACT_TOL),
    )
    logger.debug(
        "Lower-bound instance with %d edges (%s): menu %.6g, ratio %.4g", n_edges, tab.mode, menu, report.ratio
    )
    return report


def instance_from_meta(prior: HypergraphPrior, meta: Mapping[str, Any]) -> Optional[LowerBoundInstance]:
    """
    Rebuild the lower-bound view of a loaded prior from its "lower_bound" metadata.

    Returns None when the metadata has no lower-bound block.

    Raises:
        InstanceFormatError: If the block is malformed or does not match the prior
    """
    block = meta.get("lower_bound") if meta else None
    if block is None:
        return None
    try:
        offset = block["offset"]
        order = [make_edge(e) for e in block["edge_order"]]
        rebuilt = gen_lb_instance(order, offset, prior.m, meta.get("kind", "lb"), meta.get("params") or {})
    except (KeyError, TypeError, DomainError, CapacityError) as exc:
        raise InstanceFormatError(f"meta.lower_bound: {exc}") from exc
    if rebuilt.prior != prior:
        raise InstanceFormatError("meta.lower_bound: edge order and offset do not reproduce the instance")
    return rebuilt
