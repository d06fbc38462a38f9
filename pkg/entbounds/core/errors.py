"""
Error types raised by entbounds.

Every error carries an ErrorCategory so the CLI can map it to an exit
code: USAGE (bad input, exit 2) or CHECK (a numerical claim failed,
exit 1).
"""

from enum import Enum


class ErrorCategory(Enum):
    """Categories of errors, mapped to CLI exit codes."""

    USAGE = "usage"  # Invalid parameters or data
    CHECK = "check"  # Verification or convergence failure

    @property
    def exit_code(self) -> int:
        return 2 if self is ErrorCategory.USAGE else 1


class EntropyBoundsError(Exception):
    """Base class for all entbounds errors."""

    category: ErrorCategory = ErrorCategory.CHECK


class ConfigError(EntropyBoundsError, ValueError):
    """Configuration file or value is invalid."""

    category = ErrorCategory.USAGE


class DegreeOutOfRange(EntropyBoundsError, ValueError):
    """Polynomial degree or power index outside the supported range."""

    category = ErrorCategory.USAGE


class DomainError(EntropyBoundsError, ValueError):
    """Argument outside the function's domain."""

    category = ErrorCategory.USAGE


class InvalidTag(EntropyBoundsError, ValueError):
    category = ErrorCategory.USAGE


class InvalidDistribution(EntropyBoundsError, ValueError):
    """Probabilities negative or not summing to one."""

    category = ErrorCategory.USAGE


class InfeasibleIndex(EntropyBoundsError, ValueError):
    """Index of coincidence outside [L^(1-n), 1]."""

    category = ErrorCategory.USAGE


class UnknownDesign(EntropyBoundsError, ValueError):
    category = ErrorCategory.USAGE


class DimensionError(EntropyBoundsError, ValueError):
    """State and design (or matrix) dimensions disagree."""

    category = ErrorCategory.USAGE


class InsufficientMoments(EntropyBoundsError, ValueError):
    """Requested order exceeds the available power sums."""

    category = ErrorCategory.USAGE


class ConvergenceFailure(EntropyBoundsError):
    """An iterative solver or optimizer did not reach its tolerance."""

    category = ErrorCategory.CHECK

    def __init__(self, message: str, best_defect: float | None = None):
        super().__init__(message)
        self.best_defect = best_defect


class BoundViolation(EntropyBoundsError):
    """A computed bound failed its post-condition."""

    category = ErrorCategory.CHECK


__all__ = [
    "ErrorCategory",
    "EntropyBoundsError",
    "ConfigError",
    "DegreeOutOfRange",
    "DomainError",
    "InvalidTag",
    "InvalidDistribution",
    "InfeasibleIndex",
    "UnknownDesign",
    "DimensionError",
    "InsufficientMoments",
    "ConvergenceFailure",
    "BoundViolation",
]
