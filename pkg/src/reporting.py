"""
Report records for the complements revenue lab.

InequalityCheck is the unit every verifier produces. A report (benchmark chain
or lower-bound instance) flattens into one CSV row with a frozen column order,
and serializes in full as JSON.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

CHECK_NAMES = (
    "benchmark_decomposition",
    "main_bound",
    "single_vs_copies",
    "single_degree_bound",
    "single_partition_bound",
    "copies_price_revenue",
    "copies_price_sale_prob",
    "nonfav_core_tail",
    "core_bound",
    "core_median",
    "core_dominance",
    "tail_bound",
    "tail_price",
    "tail_union",
    "cutoff_revenue",
    "nonfav_bound",
    "duality_bound",
    "flow_pointwise",
    "rev_lower_simple",
    "rev_upper_value",
    "lb_brev",
    "lb_srev",
    "lb_edge_menu",
    "lb_ratio",
)

SCALAR_COLUMNS = (
    "instance_id",
    "instance_hash",
    "seed",
    "config_hash",
    "mode",
    "m",
    "active_edges",
    "d",
    "parts",
    "rev_lp",
    "single",
    "nonfav",
    "core",
    "tail",
    "opt_copies",
    "brev",
    "brev_price",
    "srev_star_lb",
    "phi_bound",
    "cutoff_t_lo",
    "cutoff_t_hi",
    "cutoff_theta",
    "cutoff_degenerate",
    "lb_menu_revenue",
    "lb_brev_upper",
    "lb_srev_upper",
    "lb_ratio_value",
)

CSV_COLUMNS = (
    SCALAR_COLUMNS
    + tuple(col for name in CHECK_NAMES for col in (f"{name}_slack", f"{name}_status"))
    + ("status", "error")
)

PASS = "pass"
FAIL = "fail"
NOT_FALSIFIABLE = "not_falsifiable"
SKIPPED = "skipped"


@dataclass(frozen=True)
class InequalityCheck:
    """
    One checked inequality lhs <= rhs.

    A soft check is one whose right-hand side uses a lower bound in place of
    the true quantity, so a violation does not refute anything and is recorded
    as not_falsifiable.
    """

    name: str
    lhs: float
    rhs: float
    tolerance: float
    status: str
    note: str = ""

    @property
    def slack(self) -> float:
        if self.status == SKIPPED:
            return math.nan
        return self.rhs - self.lhs

    @property
    def failed(self) -> bool:
        return self.status == FAIL

    @classmethod
    def evaluate(
        cls, name: str, lhs: float, rhs: float, tolerance: float, note: str = "", soft: bool = False
    ) -> "InequalityCheck":
        scale = max(1.0, abs(lhs), abs(rhs)) if math.isfinite(lhs) and math.isfinite(rhs) else 1.0
        holds = lhs <= rhs + tolerance * scale
        status = PASS if holds else (NOT_FALSIFIABLE if soft else FAIL)
        return cls(name, float(lhs), float(rhs), tolerance, status, note)

    @classmethod
    def skipped(cls, name: str, note: str) -> "InequalityCheck":
        return cls(name, math.nan, math.nan, 0.0, SKIPPED, note)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "tolerance": self.tolerance,
            "status": self.status,
            "note": self.note,
        }


def tightest(checks: Sequence[InequalityCheck]) -> InequalityCheck:
    """The check with the smallest slack; failures first."""
    live = [c for c in checks if c.status != SKIPPED]
    if not live:
        return checks[0]
    return min(live, key=lambda c: (c.status != FAIL, c.slack))


def overall_status(checks: Iterable[InequalityCheck]) -> str:
    return FAIL if any(c.failed for c in checks) else PASS


def format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return "" if math.isnan(value) else repr(float(value))
    return str(value)


def _plain(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, float) and math.isnan(value):
        return None
    return value


def build_record(
    instance_id: str,
    instance_hash: str,
    seed: int,
    config_hash: str,
    scalars: Mapping[str, Any],
    checks: Sequence[InequalityCheck],
    error: str = "",
    status: Optional[str] = None,
) -> Dict[str, str]:
    """One flat CSV row; columns absent from the report stay empty."""
    row = {col: "" for col in CSV_COLUMNS}
    row.update(instance_id=instance_id, instance_hash=instance_hash, seed=str(seed), config_hash=config_hash)
    for key, value in scalars.items():
        if key in row and key not in ("instance_id", "instance_hash", "seed", "config_hash"):
            row[key] = format_value(value)
    for check in checks:
        if check.name in CHECK_NAMES:
            row[f"{check.name}_slack"] = format_value(check.slack)
            row[f"{check.name}_status"] = check.status
    row["status"] = status or overall_status(checks)
    row["error"] = error
    return row


def csv_text(rows: Iterable[Mapping[str, str]], columns: Sequence[str] = CSV_COLUMNS) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()


def json_text(data: Any) -> str:
    return json.dumps(_plain(data), sort_keys=True, indent=2) + "\n"


def write_text(path: str, text: str) -> str:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    return path


def read_csv(path: str) -> List[Dict[str, str]]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))
