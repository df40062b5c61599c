"""
Exception types for the complements revenue lab.

Library code raises these; only the command-line harness turns them into
exit codes.
"""

from typing import Any, Dict, Optional


class LabError(Exception):
    "Base class for every error the lab raises on purpose."
    pass


class CapacityError(LabError):
    "Raised when an instance is too large for exact enumeration or the LP caps."

    def __init__(self, message: str, cap_name: str = "", requested: float = 0, limit: float = 0) -> None:
        super().__init__(message)
        self.cap_name = cap_name
        self.requested = requested
        self.limit = limit


class InstanceFormatError(LabError):
    "Raised when an instance or report file cannot be parsed or validated."
    pass


class SolverError(LabError):
    "Raised when the LP solver cannot certify an optimum."

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message)
        self.diagnostics: Dict[str, Any] = dict(diagnostics or {})


class DomainError(LabError, ValueError):
    "Raised when an argument lies outside the domain an operation accepts."
    pass


class ConfigError(LabError, ValueError):
    "Raised when run settings are invalid."
    pass
