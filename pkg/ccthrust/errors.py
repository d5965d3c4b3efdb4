"""
Exception hierarchy for ccthrust.

Library code raises these; only the command handlers catch them and turn
them into process exit codes.
"""

from __future__ import annotations

from typing import Optional, Tuple


class CcthrustError(Exception):
    """Base class for every error raised by the package."""

    exit_code = 1


class DomainError(CcthrustError, ValueError):
    """Input outside the contract of an operation (non-finite, negative radius, ...)."""

    exit_code = 2


class PoleError(DomainError):
    """Evaluation hit an exact pole (quasi-static resonance, occupation at omega = 0)."""

    exit_code = 3


class MatrixSingularityError(CcthrustError):
    """The radiative-correction matrix cannot be inverted."""

    exit_code = 3


class NumericFailureError(CcthrustError):
    """A special-function or linear-algebra kernel failed for a given argument."""

    exit_code = 3

    def __init__(self, message: str, argument: Optional[complex] = None):
        super().__init__(message)
        self.argument = argument


class ConvergenceFailure(CcthrustError):
    """Adaptive quadrature exhausted its subdivision budget."""

    exit_code = 3

    def __init__(
        self,
        message: str,
        panel: Optional[Tuple[float, float]] = None,
        local_error: Optional[float] = None,
        subdivisions: int = 0,
    ):
        super().__init__(message)
        self.panel = panel
        self.local_error = local_error
        self.subdivisions = subdivisions


class ConfigurationError(CcthrustError):
    """Missing or malformed setting."""

    exit_code = 2

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


class OutputError(CcthrustError):
    """Table could not be written."""

    exit_code = 4


__all__ = [
    "CcthrustError",
    "DomainError",
    "PoleError",
    "MatrixSingularityError",
    "NumericFailureError",
    "ConvergenceFailure",
    "ConfigurationError",
    "OutputError",
]
