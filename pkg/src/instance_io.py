"""
Instance file format for the complements revenue lab.

An instance is a JSON object::

    {
      "edges": [
        {"items": [0], "support": [{"prob": 0.5, "value": 0.0}, {"prob": 0.5, "value": 1.0}]},
        ...
      ],
      "feasibility": {"kind": "all"},
      "m": 2,
      "meta": {"kind": "random", "params": {"seed": 7}}
    }

Items are 0-based. "support" lists the edge weight's values with their
probabilities. Feasibility kinds are "all", "cardinality" (with "k") and
"explicit" (with "maximal_sets"). "meta" is optional. Files are written with
sorted keys and a trailing newline so they are byte-reproducible.
"""

import hashlib
import json
import logging
import re
from typing import Any, Dict, List, Mapping, Optional, Tuple

from .errors import DomainError, InstanceFormatError
from .model import DiscreteDist, FeasibilityFamily, Hyperedge, HypergraphPrior, make_edge
from .reporting import json_text, write_text

logger = logging.getLogger(__name__)


def feasibility_to_dict(family: FeasibilityFamily) -> Dict[str, Any]:
    if family.kind == "cardinality":
        return {"kind": "cardinality", "k": family.k}
    if family.kind == "explicit":
        return {"kind": "explicit", "maximal_sets": [list(s) for s in family.maximal_sets]}
    return {"kind": "all"}


def prior_to_dict(prior: HypergraphPrior, meta: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "m": prior.m,
        "feasibility": feasibility_to_dict(prior.feasibility),
        "edges": [
            {"items": list(edge), "support": [{"value": x, "prob": p} for x, p in zip(dist.support, dist.pmf)]}
            for edge, dist in prior.edges
        ],
    }
    if meta:
        data["meta"] = dict(meta)
    return data


def _require(data: Mapping[str, Any], key: str, path: str) -> Any:
    if not isinstance(data, Mapping):
        raise InstanceFormatError(f"{path}: expected an object")
    if key not in data:
        raise InstanceFormatError(f"{path}.{key}: missing")
    return data[key]


def _feasibility_from_dict(data: Any) -> FeasibilityFamily:
    kind = _require(data, "kind", "feasibility")
    if kind == "all":
        return FeasibilityFamily.all_sets()
    if kind == "cardinality":
        k = _require(data, "k", "feasibility")
        if not isinstance(k, int) or isinstance(k, bool):
            raise InstanceFormatError("feasibility.k: expected an integer")
        return FeasibilityFamily.cardinality(k)
    if kind == "explicit":
        sets = _require(data, "maximal_sets", "feasibility")
        if not isinstance(sets, list) or not all(isinstance(s, list) for s in sets):
            raise InstanceFormatError("feasibility.maximal_sets: expected a list of item lists")
        return FeasibilityFamily.explicit(sets)
    raise InstanceFormatError(f"feasibility.kind: unknown kind {kind!r}")


def _is_number(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _dist_from_support(raw: Any, path: str) -> DiscreteDist:
    if not isinstance(raw, list) or not raw:
        raise InstanceFormatError(f"{path}: expected a non-empty list of {{value, prob}} objects")
    pairs = []
    for j, point in enumerate(raw):
        value = _require(point, "value", f"{path}[{j}]")
        prob = _require(point, "prob", f"{path}[{j}]")
        if not _is_number(value):
            raise InstanceFormatError(f"{path}[{j}].value: expected a number")
        if not _is_number(prob):
            raise InstanceFormatError(f"{path}[{j}].prob: expected a number")
        pairs.append((float(value), float(prob)))
    try:
        return DiscreteDist.from_pairs(pairs)
    except DomainError as exc:
        raise InstanceFormatError(f"{path}: {exc}") from exc


def prior_from_dict(data: Any) -> Tuple[HypergraphPrior, Dict[str, Any]]:
    """
    Parse an instance object.

    Raises:
        InstanceFormatError: Naming the key path of the first problem
    """
    m = _require(data, "m", "instance")
    if not isinstance(m, int) or isinstance(m, bool):
        raise InstanceFormatError("instance.m: expected an integer")
    family = _feasibility_from_dict(_require(data, "feasibility", "instance"))
    raw_edges = _require(data, "edges", "instance")
    if not isinstance(raw_edges, list):
        raise InstanceFormatError("instance.edges: expected a list")
    edges = []
    for j, entry in enumerate(raw_edges):
        path = f"instance.edges[{j}]"
        items = _require(entry, "items", path)
        if not isinstance(items, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in items):
            raise InstanceFormatError(f"{path}.items: expected a list of integers")
        edges.append((tuple(items), _dist_from_support(_require(entry, "support", path), f"{path}.support")))
    meta = data.get("meta") or {}
    if not isinstance(meta, Mapping):
        raise InstanceFormatError("instance.meta: expected an object")
    try:
        prior = HypergraphPrior(m, tuple(edges), family)
    except DomainError as exc:
        raise InstanceFormatError(f"instance: {exc}") from exc
    return prior, dict(meta)


def instance_text(prior: HypergraphPrior, meta: Optional[Mapping[str, Any]] = None) -> str:
    return json_text(prior_to_dict(prior, meta))


def dump_instance(prior: HypergraphPrior, path: str, meta: Optional[Mapping[str, Any]] = None) -> str:
    written = write_text(path, instance_text(prior, meta))
    logger.debug("Wrote instance with %d edges to %s", len(prior.edges), path)
    return written


def load_instance(path: str) -> Tuple[HypergraphPrior, Dict[str, Any]]:
    """
    Read an instance file.

    Raises:
        InstanceFormatError: If the file is missing, is not JSON or fails validation
    """
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise InstanceFormatError(f"cannot read instance file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"{path}: not valid JSON ({exc.msg} at line {exc.lineno})") from exc
    return prior_from_dict(data)


def instance_hash(prior: HypergraphPrior, meta: Optional[Mapping[str, Any]] = None) -> str:
    """sha256 of the canonical instance JSON, first 16 hex digits."""
    text = json.dumps(prior_to_dict(prior, meta), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


_EDGE_RE = re.compile(r"\{([^{}]*)\}")


def parse_edge_list(text: str) -> List[Hyperedge]:
    """
    Parse "{0};{0,1}" (braces optional, ";" between edges) into hyperedges.

    Raises:
        InstanceFormatError: If an edge is empty or holds a non-integer
    """
    text = (text or "").strip()
    if not text:
        return []
    chunks = _EDGE_RE.findall(text) if "{" in text else text.split(";")
    out = []
    for chunk in chunks:
        try:
            out.append(make_edge(int(tok) for tok in chunk.replace(" ", "").split(",") if tok))
        except (ValueError, DomainError) as exc:
            raise InstanceFormatError(f"bad hyperedge {{{chunk}}} in {text!r}: {exc}") from exc
    return out
