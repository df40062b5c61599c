"""
Configuration module for the complements revenue lab.

This module contains all configuration constants used throughout the lab.
It centralizes caps, tolerances and defaults in one place to eliminate magic
numbers, and provides RunConfig, the frozen settings object one run carries
through every computation.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, replace

from .errors import ConfigError

# Enumeration Caps
MAX_PROFILES: int = 10**6  # Largest exact profile enumeration (product of support sizes)
MAX_SUBSETS: int = 2**16  # Largest bundle space 2^m evaluated per profile
MAX_LP_VARIABLES: int = 5000  # |V| * 2^m + |V| variables in the revenue LP
MAX_LP_ROWS: int = 4000  # IC + IR + lottery rows in the revenue LP
MAX_GENERATED_EDGES: int = 4096  # Largest edge list a generator may emit

# Run Defaults
DEFAULT_SEED: int = 0
DEFAULT_Q: float = 1.0  # Sale-probability budget for the copies pricing
DEFAULT_CUTOFF_K: float = 1.66  # Expected tail count used for the CORE/TAIL cutoff
DEFAULT_GRID_DENSITY: int = 12  # Candidate prices per item in the SREV* search
DEFAULT_MC_SAMPLES: int = 20000
SREV_EXHAUSTIVE_MAX_ITEMS: int = 4  # Cross-product search up to this many items
SREV_EXHAUSTIVE_MAX_VECTORS: int = 50000  # ...and up to this many price vectors
SREV_ASCENT_MAX_ROUNDS: int = 25

# Lower-Bound Construction
DEFAULT_LB_OFFSET: int = 10  # Edge index offset a; 2^-a slack sits below every tolerance
LB_MAX_EXPONENT: int = 50  # |E| + a must stay below this so 2^e is exact
LB_GRID_POINTS: int = 100  # Price points per item when bounding SREV on lower-bound instances
SPARSE_MAX_NONZERO: int = 2  # Non-zero edges per profile in sparse enumeration
MENU_DISCOUNT: float = 2.0**-30  # Relative discount on edge-menu prices so buyers strictly prefer buying

# Tolerances
FEASIBILITY_TOL: float = 1e-6  # IC/IR residuals and LP-based inequality checks
OPTIMALITY_TOL: float = 1e-7  # LP objective agreement
EXACT_TOL: float = 1e-9  # Enumerated expectations
UTILITY_TOL: float = 1e-12  # Zero-utility band for buyer decisions
PMF_TOL: float = 1e-12  # Probability mass functions must sum to one within this

# Output Configuration
OUT_DIR_ENV_VAR: str = "CAL_LAB_OUT_DIR"
DEFAULT_OUT_DIR: str = "reports"
SWEEP_WORKERS: int = 4

# Debug Configuration
CONSOLE_OUTPUT_ENABLED: bool = False  # Set to True for DEBUG logging during development


def default_out_dir() -> str:
    """Output directory from the environment, falling back to ./reports."""
    return os.environ.get(OUT_DIR_ENV_VAR) or DEFAULT_OUT_DIR


@dataclass(frozen=True)
class RunConfig:
    """
    Settings for one run of the lab.

    Every computation that enumerates, samples or solves takes a RunConfig so
    caps and tolerances are never read from globals mid-computation.
    """

    seed: int = DEFAULT_SEED
    max_profiles: int = MAX_PROFILES
    max_subsets: int = MAX_SUBSETS
    max_lp_variables: int = MAX_LP_VARIABLES
    max_lp_rows: int = MAX_LP_ROWS
    grid_density: int = DEFAULT_GRID_DENSITY
    q: float = DEFAULT_Q
    cutoff_k: float = DEFAULT_CUTOFF_K
    mode: str = "exact"
    mc_samples: int = DEFAULT_MC_SAMPLES
    out_dir: str = ""
    record_timings: bool = False

    @classmethod
    def from_mode_string(cls, mode: str, **overrides) -> "RunConfig":
        """
        Build a config from a `--mode` value.

        Args:
            mode: "exact" or "mc:N" with N the Monte Carlo sample count

        Raises:
            ConfigError: If the mode string is malformed
        """
        text = (mode or "exact").strip().lower()
        if text == "exact":
            return cls(mode="exact", **overrides).validate()
        if text.startswith("mc:"):
            try:
                samples = int(text[3:])
            except ValueError:
                raise ConfigError(f"invalid Monte Carlo sample count in mode {mode!r}") from None
            return cls(mode="mc", mc_samples=samples, **overrides).validate()
        raise ConfigError(f"unknown mode {mode!r}; expected 'exact' or 'mc:N'")

    def validate(self) -> "RunConfig":
        caps = {
            "max_profiles": self.max_profiles,
            "max_subsets": self.max_subsets,
            "max_lp_variables": self.max_lp_variables,
            "max_lp_rows": self.max_lp_rows,
            "grid_density": self.grid_density,
            "mc_samples": self.mc_samples,
        }
        for name, value in caps.items():
            if int(value) <= 0:
                raise ConfigError(f"{name} must be positive, got {value}")
        if not 0.0 < float(self.q) <= 1.0:
            raise ConfigError(f"q must lie in (0, 1], got {self.q}")
        if float(self.cutoff_k) < 0.0:
            raise ConfigError(f"cutoff k must be non-negative, got {self.cutoff_k}")
        if self.mode not in ("exact", "mc"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        return self

    def with_overrides(self, **changes) -> "RunConfig":
        return replace(self, **changes).validate()

    def resolved_out_dir(self) -> str:
        return self.out_dir or default_out_dir()

    def config_hash(self) -> str:
        """Hash of every field that can change a result."""
        data = asdict(self)
        data.pop("out_dir", None)
        data.pop("record_timings", None)
        text = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]

    @property
    def monte_carlo(self) -> bool:
        return self.mode == "mc"
