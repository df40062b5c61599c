"""
Valuation model for the complements revenue lab.

This module holds the buyer model every other module builds on:
- Hyperedges, discrete weight distributions and downward-closed feasibility families
- HypergraphPrior, the product prior over hyperedge weights
- WeightProfile, one realized weight assignment, and its valuation v(S)
- Region assignment (which hyperedge is the buyer's favorite)
- ProfileTable, the weighted type space (exact, Monte Carlo or sparse) that
  every expectation in the lab is taken over

Bundles of items are handled internally as bitmasks over item indices; the
public types use sorted index tuples.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .config import MAX_PROFILES, MAX_SUBSETS, PMF_TOL, RunConfig
from .errors import CapacityError, DomainError

logger = logging.getLogger(__name__)

Hyperedge = Tuple[int, ...]
ItemsLike = Union[int, Iterable[int]]


def make_edge(items: Iterable[int]) -> Hyperedge:
    """
    Canonical hyperedge from an iterable of item indices.

    Raises:
        DomainError: If the set is empty, holds duplicates or negative indices
    """
    values = [int(i) for i in items]
    edge = tuple(sorted(set(values)))
    if not edge:
        raise DomainError("a hyperedge must contain at least one item")
    if len(edge) != len(values):
        raise DomainError(f"duplicate item indices in hyperedge {values}")
    if edge[0] < 0:
        raise DomainError(f"item indices must be non-negative, got {values}")
    return edge


def edge_mask(items: Iterable[int]) -> int:
    mask = 0
    for i in items:
        mask |= 1 << int(i)
    return mask


def mask_items(mask: int) -> Hyperedge:
    items = []
    i = 0
    while mask:
        if mask & 1:
            items.append(i)
        mask >>= 1
        i += 1
    return tuple(items)


def as_mask(items: ItemsLike) -> int:
    """Accept either a bitmask or an iterable of item indices."""
    if isinstance(items, (int, np.integer)):
        return int(items)
    return edge_mask(items)


def submasks(mask: int) -> Iterable[int]:
    """All submasks of `mask`, including 0 and `mask` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


@dataclass(frozen=True)
class DiscreteDist:
    """
    Finite-support distribution of one non-negative value.

    Support is strictly increasing, every listed atom has positive mass, and
    the masses sum to one within PMF_TOL.
    """

    support: Tuple[float, ...]
    pmf: Tuple[float, ...]
    _index: Dict[float, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        support = tuple(float(x) for x in self.support)
        pmf = tuple(float(p) for p in self.pmf)
        if not support:
            raise DomainError("a distribution needs at least one support point")
        if len(support) != len(pmf):
            raise DomainError("support and pmf lengths differ")
        if any(not math.isfinite(x) or x < 0.0 for x in support):
            raise DomainError(f"support values must be finite and non-negative: {support}")
        if any(b <= a for a, b in zip(support, support[1:])):
            raise DomainError(f"support must be strictly increasing: {support}")
        if any(not p > 0.0 for p in pmf):
            raise DomainError(f"probabilities must be positive: {pmf}")
        if abs(math.fsum(pmf) - 1.0) > PMF_TOL:
            raise DomainError(f"probabilities sum to {math.fsum(pmf)!r}, not 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(self, "_index", {x: j for j, x in enumerate(support)})

    @classmethod
    def point_mass(cls, value: float) -> "DiscreteDist":
        return cls((float(value),), (1.0,))

    @classmethod
    def from_pairs(cls, pairs: Union[Mapping[float, float], Iterable[Tuple[float, float]]]) -> "DiscreteDist":
        """Build from (value, probability) pairs in any order."""
        items = pairs.items() if isinstance(pairs, Mapping) else pairs
        ordered = sorted((float(v), float(p)) for v, p in items)
        return cls(tuple(v for v, _ in ordered), tuple(p for _, p in ordered))

    @classmethod
    def from_weighted_values(
        cls, values: Sequence[float], weights: Sequence[float], merge_tol: float = 1e-12
    ) -> "DiscreteDist":
        """
        Distribution of a random variable given per-outcome values and weights.

        Values closer than merge_tol (relative to their size) are merged into the
        smaller one, zero weights are dropped and the result is renormalized.
        """
        vals = np.asarray(values, dtype=float)
        wts = np.asarray(weights, dtype=float)
        keep = wts > 0.0
        vals, wts = vals[keep], wts[keep]
        if vals.size == 0:
            return cls.point_mass(0.0)
        order = np.argsort(vals, kind="stable")
        support: List[float] = []
        pmf: List[float] = []
        for v, w in zip(vals[order], wts[order]):
            if support and v - support[-1] <= merge_tol * max(1.0, abs(v)):
                pmf[-1] += float(w)
            else:
                support.append(float(v))
                pmf.append(float(w))
        total = math.fsum(pmf)
        return cls(tuple(support), tuple(p / total for p in pmf))

    @property
    def size(self) -> int:
        return len(self.support)

    @property
    def is_point_mass(self) -> bool:
        return len(self.support) == 1

    @property
    def max_value(self) -> float:
        return self.support[-1]

    def contains(self, x: float) -> bool:
        return float(x) in self._index

    def index_of(self, x: float) -> int:
        try:
            return self._index[float(x)]
        except KeyError:
            raise DomainError(f"{x!r} is not a support point of {self.support}") from None

    def pmf_at(self, x: float) -> float:
        j = self._index.get(float(x))
        return 0.0 if j is None else self.pmf[j]

    def next_support(self, x: float) -> Optional[float]:
        """The next support point above x (x must be in the support), None at the top."""
        j = self.index_of(x)
        return self.support[j + 1] if j + 1 < len(self.support) else None

    def prob_greater(self, x: float) -> float:
        return math.fsum(p for v, p in zip(self.support, self.pmf) if v > x)

    def prob_at_least(self, x: float) -> float:
        return math.fsum(p for v, p in zip(self.support, self.pmf) if v >= x)

    def mean(self) -> float:
        return math.fsum(v * p for v, p in zip(self.support, self.pmf))

    def scaled(self, alpha: float) -> "DiscreteDist":
        if not alpha > 0.0:
            raise DomainError(f"scale factor must be positive, got {alpha}")
        return DiscreteDist(tuple(alpha * v for v in self.support), self.pmf)

    @property
    def zero_mass(self) -> float:
        return self.pmf_at(0.0)

    @property
    def is_trivial(self) -> bool:
        """True when the weight is identically zero."""
        return self.support == (0.0,)


@dataclass(frozen=True)
class FeasibilityFamily:
    """
    Downward-closed family of bundles the buyer can use.

    kind is "all", "cardinality" (bundles of at most k items) or "explicit"
    (the downward closure of the listed maximal sets).
    """

    kind: str = "all"
    k: int = 0
    maximal_sets: Tuple[Hyperedge, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in ("all", "cardinality", "explicit"):
            raise DomainError(f"unknown feasibility kind {self.kind!r}")
        if self.kind == "cardinality" and int(self.k) < 0:
            raise DomainError(f"cardinality bound must be non-negative, got {self.k}")
        if self.kind == "explicit":
            sets = {tuple(sorted(set(int(i) for i in s))) for s in self.maximal_sets}
            # Keep only maximal members; the family is their downward closure.
            maximal = [s for s in sets if not any(set(s) < set(o) for o in sets)]
            object.__setattr__(self, "maximal_sets", tuple(sorted(maximal)))
        else:
            object.__setattr__(self, "maximal_sets", ())
        object.__setattr__(self, "k", int(self.k) if self.kind == "cardinality" else 0)

    @classmethod
    def all_sets(cls) -> "FeasibilityFamily":
        return cls("all")

    @classmethod
    def cardinality(cls, k: int) -> "FeasibilityFamily":
        return cls("cardinality", k=k)

    @classmethod
    def explicit(cls, maximal_sets: Iterable[Iterable[int]]) -> "FeasibilityFamily":
        return cls("explicit", maximal_sets=tuple(tuple(s) for s in maximal_sets))

    def contains_mask(self, mask: int) -> bool:
        if self.kind == "all":
            return True
        if self.kind == "cardinality":
            return bin(mask).count("1") <= self.k
        return mask == 0 or any(mask & ~edge_mask(s) == 0 for s in self.maximal_sets)

    def contains(self, items: ItemsLike) -> bool:
        return self.contains_mask(as_mask(items))

    def indicator(self, m: int) -> np.ndarray:
        """Read-only boolean array over all 2^m bundles."""
        return _feasible_indicator(self, int(m))


@lru_cache(maxsize=256)
def _feasible_indicator(family: FeasibilityFamily, m: int) -> np.ndarray:
    size = 1 << m
    if family.kind == "all":
        out = np.ones(size, dtype=bool)
    elif family.kind == "cardinality":
        counts = np.zeros(size, dtype=np.int64)
        idx = np.arange(size)
        for i in range(m):
            counts += (idx >> i) & 1
        out = counts <= family.k
    else:
        out = np.zeros(size, dtype=bool)
        out[0] = True
        idx = np.arange(size)
        for s in family.maximal_sets:
            out |= (idx & ~edge_mask(s)) == 0
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class HypergraphPrior:
    """
    Product prior over hyperedge weights plus the fixed feasibility family.

    Edges absent from the map have weight identically zero. Edges that are not
    feasible are dropped on construction, since the buyer can never use them.
    """

    m: int
    edges: Tuple[Tuple[Hyperedge, DiscreteDist], ...] = ()
    feasibility: FeasibilityFamily = field(default_factory=FeasibilityFamily.all_sets)
    _active: Tuple[Hyperedge, ...] = field(init=False, repr=False, compare=False, hash=False)
    _dists: Dict[Hyperedge, DiscreteDist] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        m = int(self.m)
        if m < 1:
            raise DomainError(f"an instance needs at least one item, got m={self.m}")
        raw = self.edges.items() if isinstance(self.edges, Mapping) else self.edges
        normalized: Dict[Hyperedge, DiscreteDist] = {}
        for items, dist in raw:
            edge = make_edge(items)
            if edge[-1] >= m:
                raise DomainError(f"hyperedge {edge} uses an item outside [0, {m})")
            if edge in normalized:
                raise DomainError(f"hyperedge {edge} listed twice")
            if not isinstance(dist, DiscreteDist):
                dist = DiscreteDist.from_pairs(dist)
            if not self.feasibility.contains(edge):
                logger.debug("Dropping infeasible hyperedge %s", edge)
                continue
            normalized[edge] = dist
        ordered = tuple(sorted(normalized.items()))
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "edges", ordered)
        object.__setattr__(self, "_dists", dict(ordered))
        object.__setattr__(self, "_active", tuple(e for e, d in ordered if not d.is_trivial))

    @classmethod
    def create(
        cls,
        m: int,
        edges: Union[Mapping, Iterable],
        feasibility: Optional[FeasibilityFamily] = None,
    ) -> "HypergraphPrior":
        return cls(m, edges, feasibility or FeasibilityFamily.all_sets())

    @property
    def active_edges(self) -> Tuple[Hyperedge, ...]:
        """Edges T with Pr[w(T) = 0] < 1, in lexicographic order."""
        return self._active

    def dist(self, edge: Iterable[int]) -> DiscreteDist:
        edge = tuple(sorted(edge))
        d = self._dists.get(edge)
        return d if d is not None else DiscreteDist.point_mass(0.0)

    def edge_map(self) -> Dict[Hyperedge, DiscreteDist]:
        return dict(self._dists)

    @property
    def full_mask(self) -> int:
        return (1 << self.m) - 1

    @property
    def profile_count(self) -> int:
        return math.prod(self._dists[e].size for e in self._active)

    def scaled(self, alpha: float) -> "HypergraphPrior":
        return HypergraphPrior(self.m, tuple((e, d.scaled(alpha)) for e, d in self.edges), self.feasibility)


@dataclass(frozen=True)
class WeightProfile:
    """One realized weight assignment w(.) over a fixed tuple of hyperedges."""

    edges: Tuple[Hyperedge, ...]
    values: Tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.edges) != len(self.values):
            raise DomainError("profile edges and values differ in length")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def from_dict(cls, weights: Mapping[Iterable[int], float]) -> "WeightProfile":
        pairs = sorted((make_edge(e), float(w)) for e, w in weights.items())
        return cls(tuple(e for e, _ in pairs), tuple(w for _, w in pairs))

    def weight(self, edge: Iterable[int]) -> float:
        edge = tuple(sorted(edge))
        for e, w in zip(self.edges, self.values):
            if e == edge:
                return w
        return 0.0

    def as_dict(self) -> Dict[Hyperedge, float]:
        return dict(zip(self.edges, self.values))

    def with_weight(self, edge: Hyperedge, value: float) -> "WeightProfile":
        if edge not in self.edges:
            raise DomainError(f"hyperedge {edge} is not part of this profile")
        return WeightProfile(self.edges, tuple(value if e == edge else w for e, w in zip(self.edges, self.values)))

    def truncated(self, cutoff: float) -> "WeightProfile":
        """Weights w(T)·1[w(T) <= cutoff]."""
        return WeightProfile(self.edges, tuple(w if w <= cutoff else 0.0 for w in self.values))

    def masked_items(self) -> List[Tuple[int, float]]:
        return [(edge_mask(e), w) for e, w in zip(self.edges, self.values) if w != 0.0]


def _check_subset_cap(size_bits: int, max_subsets: int) -> None:
    if (1 << size_bits) > max_subsets:
        raise CapacityError(
            f"2^{size_bits} bundles exceed the subset cap {max_subsets} (MAX_SUBSETS in src/config.py)",
            cap_name="max_subsets",
            requested=1 << size_bits,
            limit=max_subsets,
        )


def value(
    profile: WeightProfile,
    feasibility: FeasibilityFamily,
    items: ItemsLike,
    max_subsets: int = MAX_SUBSETS,
) -> float:
    """
    v(S) = max over feasible T ⊆ S of the total weight of edges inside T.

    Computed by exhaustive enumeration of the feasible subsets of S.

    Raises:
        CapacityError: If S has more subsets than max_subsets
    """
    mask = as_mask(items)
    if mask == 0:
        return 0.0
    _check_subset_cap(bin(mask).count("1"), max_subsets)
    weighted = profile.masked_items()
    best = 0.0
    for sub in submasks(mask):
        if not feasibility.contains_mask(sub):
            continue
        total = math.fsum(w for em, w in weighted if em & ~sub == 0)
        if total > best:
            best = total
    return best


def valuation_table(
    profile: WeightProfile,
    feasibility: FeasibilityFamily,
    m: int,
    max_subsets: int = MAX_SUBSETS,
) -> np.ndarray:
    """
    v(S) for every bundle S, indexed by bitmask.

    A subset-sum transform gives the unconstrained sums, infeasible bundles are
    masked out and a subset-max transform takes the best feasible subset.
    """
    _check_subset_cap(m, max_subsets)
    size = 1 << m
    table = np.zeros(size, dtype=float)
    for em, w in profile.masked_items():
        table[em] += w
    idx = np.arange(size)
    for i in range(m):
        bit = 1 << i
        upper = idx[(idx & bit) != 0]
        table[upper] += table[upper ^ bit]
    table = np.where(feasibility.indicator(m), table, -np.inf)
    table[0] = 0.0
    for i in range(m):
        bit = 1 << i
        upper = idx[(idx & bit) != 0]
        table[upper] = np.maximum(table[upper], table[upper ^ bit])
    return table


def complementarity_degree(prior: HypergraphPrior) -> int:
    """Largest number of active edges sharing one item; 0 without active edges."""
    counts = [0] * prior.m
    for edge in prior.active_edges:
        for i in edge:
            counts[i] += 1
    return max(counts, default=0)


def enumerate_profiles(
    prior: HypergraphPrior, max_profiles: int = MAX_PROFILES
) -> List[Tuple[WeightProfile, float]]:
    """
    Every weight profile of the prior with its probability.

    Raises:
        CapacityError: If the product of support sizes exceeds max_profiles
    """
    count = prior.profile_count
    if count > max_profiles:
        raise CapacityError(
            f"{count} weight profiles exceed the enumeration cap {max_profiles}; "
            "use --mode mc:N for a Monte Carlo estimate or raise --cap-profiles",
            cap_name="max_profiles",
            requested=count,
            limit=max_profiles,
        )
    edges = prior.active_edges
    dists = [prior.dist(e) for e in edges]
    out: List[Tuple[WeightProfile, float]] = []
    for combo in itertools.product(*[range(d.size) for d in dists]):
        prob = math.prod(d.pmf[j] for d, j in zip(dists, combo))
        out.append((WeightProfile(edges, tuple(d.support[j] for d, j in zip(dists, combo))), prob))
    return out


def sample_profile(prior: HypergraphPrior, rng: Union[np.random.Generator, int]) -> WeightProfile:
    """Draw every active edge's weight independently; deterministic given the generator state."""
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(int(rng))
    edges = prior.active_edges
    values = []
    for e in edges:
        d = prior.dist(e)
        j = 0 if d.is_point_mass else int(gen.choice(d.size, p=np.asarray(d.pmf)))
        values.append(d.support[j])
    return WeightProfile(edges, tuple(values))


def region(profile: WeightProfile) -> Hyperedge:
    """
    The favorite hyperedge: argmax of w(T) over nonempty T.

    Ties go to the lexicographically smallest sorted index tuple, so a strict
    prefix beats its extensions. When every weight is zero all nonempty sets
    tie and the answer is the first singleton (0,).
    """
    best = max(profile.values, default=0.0)
    if best <= 0.0:
        return (0,)
    return min(e for e, w in zip(profile.edges, profile.values) if w == best)


@dataclass(frozen=True, eq=False)
class ProfileTable:
    """
    Weighted type space shared by every expectation in the lab.

    values[p, S] is v_p(S) for profile p and bundle bitmask S. In "sparse"
    mode the probabilities sum to 1 - omitted_mass and omitted_value_bound
    bounds E[v(M) * 1[profile omitted]].
    """

    m: int
    feasibility: FeasibilityFamily
    profiles: Tuple[WeightProfile, ...]
    probs: np.ndarray
    values: np.ndarray
    mode: str = "exact"
    samples: int = 0
    omitted_mass: float = 0.0
    omitted_value_bound: float = 0.0

    @property
    def size(self) -> int:
        return len(self.profiles)

    @property
    def exact(self) -> bool:
        return self.mode == "exact"

    @property
    def grand_values(self) -> np.ndarray:
        return self.values[:, (1 << self.m) - 1]

    def expectation(self, per_profile: Sequence[float]) -> float:
        return float(np.dot(self.probs, np.asarray(per_profile, dtype=float)))

    def estimate(self, per_profile: Sequence[float]) -> Tuple[float, float]:
        """Mean and standard error; the error is zero unless the table is sampled."""
        x = np.asarray(per_profile, dtype=float)
        mean = float(np.dot(self.probs, x))
        if self.mode != "monte-carlo" or self.samples < 2:
            return mean, 0.0
        n = self.samples
        var = float(np.dot(self.probs, (x - mean) ** 2)) * n / (n - 1)
        return mean, math.sqrt(var / n)


def table_from_profiles(
    prior: HypergraphPrior,
    weighted: Sequence[Tuple[WeightProfile, float]],
    mode: str = "exact",
    samples: int = 0,
    max_subsets: int = MAX_SUBSETS,
    omitted_mass: float = 0.0,
    omitted_value_bound: float = 0.0,
) -> ProfileTable:
    _check_subset_cap(prior.m, max_subsets)
    profiles = tuple(p for p, _ in weighted)
    probs = np.array([w for _, w in weighted], dtype=float)
    if profiles:
        values = np.vstack([valuation_table(p, prior.feasibility, prior.m, max_subsets) for p in profiles])
    else:
        values = np.zeros((0, 1 << prior.m))
    return ProfileTable(
        m=prior.m,
        feasibility=prior.feasibility,
        profiles=profiles,
        probs=probs,
        values=values,
        mode=mode,
        samples=samples,
        omitted_mass=omitted_mass,
        omitted_value_bound=omitted_value_bound,
    )


def monte_carlo_profiles(
    prior: HypergraphPrior, samples: int, seed: int
) -> List[Tuple[WeightProfile, float]]:
    """Sampled profiles with identical draws merged, in a seed-determined order."""
    rng = np.random.default_rng(int(seed))
    edges = prior.active_edges
    dists = [prior.dist(e) for e in edges]
    if not edges:
        return [(WeightProfile((), ()), 1.0)]
    draws = np.column_stack([rng.choice(d.size, size=samples, p=np.asarray(d.pmf)) for d in dists])
    rows, counts = np.unique(draws, axis=0, return_counts=True)
    return [
        (WeightProfile(edges, tuple(d.support[int(j)] for d, j in zip(dists, row))), float(c) / samples)
        for row, c in zip(rows, counts)
    ]


def profile_table(prior: HypergraphPrior, config: Optional[RunConfig] = None) -> ProfileTable:
    """
    The type space for `prior` under `config`.

    Exact enumeration whenever the prior fits under the profile cap; a seeded
    Monte Carlo sample when it does not and the config asks for Monte Carlo.

    Raises:
        CapacityError: If the prior is too large and the mode is exact
    """
    config = config or RunConfig()
    if prior.profile_count <= config.max_profiles or not config.monte_carlo:
        weighted = enumerate_profiles(prior, config.max_profiles)
        logger.debug("Exact profile table: %d profiles, m=%d", len(weighted), prior.m)
        return table_from_profiles(prior, weighted, "exact", 0, config.max_subsets)
    weighted = monte_carlo_profiles(prior, config.mc_samples, config.seed)
    logger.debug("Monte Carlo profile table: %d samples, %d distinct", config.mc_samples, len(weighted))
    return table_from_profiles(prior, weighted, "monte-carlo", config.mc_samples, config.max_subsets)


def count_distribution(probs: Sequence[float]) -> np.ndarray:
    """Distribution of the number of successes among independent events."""
    dist = np.zeros(len(probs) + 1)
    dist[0] = 1.0
    for n, p in enumerate(probs, start=1):
        dist[1 : n + 1] = dist[1 : n + 1] * (1.0 - p) + dist[0:n] * p
        dist[0] *= 1.0 - p
    return dist


def sparse_profile_table(
    prior: HypergraphPrior,
    max_nonzero: int,
    max_profiles: int = MAX_PROFILES,
    max_subsets: int = MAX_SUBSETS,
) -> ProfileTable:
    """
    Profiles with at most `max_nonzero` non-zero edges, with exact probabilities.

    The remaining mass is reported together with an upper bound on the value
    it carries, E[v(M) * 1[omitted]] <= sum over T of E[w(T) 1[w(T) > 0]] times
    Pr[at least max_nonzero other edges are non-zero].

    Raises:
        DomainError: If some active edge has no atom at zero
        CapacityError: If the sparse enumeration exceeds max_profiles
    """
    edges = prior.active_edges
    dists = [prior.dist(e) for e in edges]
    for e, d in zip(edges, dists):
        if not d.contains(0.0):
            raise DomainError(f"sparse enumeration needs an atom at zero on every edge; {e} has none")
    zero = [d.pmf_at(0.0) for d in dists]
    nonzero_probs = [1.0 - z for z in zero]
    r = max(0, int(max_nonzero))
    count = sum(
        math.prod(dists[j].size - 1 for j in combo)
        for k in range(min(r, len(edges)) + 1)
        for combo in itertools.combinations(range(len(edges)), k)
    )
    if count > max_profiles:
        raise CapacityError(
            f"{count} sparse profiles exceed the enumeration cap {max_profiles}",
            cap_name="max_profiles",
            requested=count,
            limit=max_profiles,
        )
    base = math.prod(zero)
    weighted: List[Tuple[WeightProfile, float]] = []
    for k in range(min(r, len(edges)) + 1):
        for combo in itertools.combinations(range(len(edges)), k):
            scale = base / math.prod(zero[j] for j in combo) if combo else base
            choices = [[(x, p) for x, p in zip(dists[j].support, dists[j].pmf) if x != 0.0] for j in combo]
            for picked in itertools.product(*choices):
                vals = [0.0] * len(edges)
                prob = scale
                for j, (x, p) in zip(combo, picked):
                    vals[j] = x
                    prob *= p
                weighted.append((WeightProfile(edges, tuple(vals)), prob))
    omitted = float(count_distribution(nonzero_probs)[r + 1 :].sum())
    value_bound = 0.0
    for j, d in enumerate(dists):
        others = count_distribution(nonzero_probs[:j] + nonzero_probs[j + 1 :])
        value_bound += d.mean() * float(others[r:].sum())
    logger.debug("Sparse profile table: %d profiles, omitted mass %.3g", len(weighted), omitted)
    return table_from_profiles(
        prior, weighted, "sparse", 0, max_subsets, omitted_mass=omitted, omitted_value_bound=value_bound
    )
