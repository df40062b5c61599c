"""
Edge partitioning for the complements revenue lab.

Splits a hypergraph's edges into parts in which every edge owns an item no
other edge of its part covers. The number of parts never exceeds the largest
number of edges sharing one item.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import DomainError
from .model import Hyperedge, edge_mask, make_edge, mask_items

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EdgePartition:
    parts: Tuple[Tuple[Hyperedge, ...], ...]

    def __len__(self) -> int:
        return len(self.parts)

    def edges(self) -> List[Hyperedge]:
        return [e for part in self.parts for e in part]

    def part_index(self, edge: Hyperedge) -> int:
        for i, part in enumerate(self.parts):
            if tuple(edge) in part:
                return i
        raise DomainError(f"hyperedge {edge} is not in the partition")


@dataclass(frozen=True)
class PartitionCheck:
    """Result of verify_partition; part and edge name the first violation."""

    ok: bool
    part: Optional[int] = None
    edge: Optional[Hyperedge] = None
    reason: str = ""


def _canonical(edges: Iterable[Iterable[int]]) -> List[Hyperedge]:
    out = [make_edge(e) for e in edges]
    dupes = sorted(e for e, n in Counter(out).items() if n > 1)
    if dupes:
        raise DomainError(f"duplicate hyperedges: {dupes}")
    return out


def _cover(edges: Iterable[Hyperedge]) -> int:
    mask = 0
    for e in edges:
        mask |= edge_mask(e)
    return mask


def unique_items(part: Sequence[Hyperedge], edge: Hyperedge) -> Hyperedge:
    """Items of `edge` that no other edge of `part` contains."""
    others = _cover(e for e in part if e != tuple(edge))
    return mask_items(edge_mask(edge) & ~others)


def representative_item(part: Sequence[Hyperedge], edge: Hyperedge) -> int:
    """Lowest-index item owned by `edge` alone within its part."""
    owned = unique_items(part, edge)
    if not owned:
        raise DomainError(f"hyperedge {edge} has no private item in its part")
    return owned[0]


def partition_edges(edges: Iterable[Iterable[int]]) -> EdgePartition:
    """
    Partition the edges so each edge has a private item within its part.

    Each round starts from all remaining edges and, in ascending lexicographic
    order, drops every edge covered by the union of the other edges still in
    the round. What survives is the next part.

    Raises:
        DomainError: If an edge is listed twice
    """
    remaining = sorted(_canonical(edges))
    parts: List[Tuple[Hyperedge, ...]] = []
    while remaining:
        current = list(remaining)
        for edge in sorted(remaining):
            others = _cover(e for e in current if e != edge)
            if edge_mask(edge) & ~others == 0:
                current.remove(edge)
        parts.append(tuple(current))
        kept = set(current)
        remaining = [e for e in remaining if e not in kept]
    logger.debug("Partitioned %d edges into %d parts", sum(len(p) for p in parts), len(parts))
    return EdgePartition(tuple(parts))


def verify_partition(edges: Iterable[Iterable[int]], partition: EdgePartition) -> PartitionCheck:
    """True iff the parts are a disjoint cover of `edges` and every edge has a private item in its part."""
    expected = sorted(make_edge(e) for e in edges)
    placed = sorted(partition.edges())
    if placed != expected:
        return PartitionCheck(False, reason="parts are not a disjoint cover of the edge set")
    for i, part in enumerate(partition.parts):
        if not part:
            return PartitionCheck(False, part=i, reason="empty part")
        for edge in part:
            if not unique_items(part, edge):
                return PartitionCheck(False, part=i, edge=edge, reason="edge is covered by the rest of its part")
    return PartitionCheck(True)


def max_degree(edges: Iterable[Iterable[int]]) -> int:
    """Largest number of edges containing one item; 0 for no edges."""
    counts: dict = {}
    for e in edges:
        for i in set(e):
            counts[i] = counts.get(i, 0) + 1
    return max(counts.values(), default=0)
