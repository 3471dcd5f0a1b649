"""
Exception hierarchy for the simulator.
Every error carries the process exit code the command line maps it to.
"""

from typing import Optional


class ArcSimError(Exception):
    """Base class for all simulator errors."""

    exit_code = 1


class ConfigError(ArcSimError):
    """Invalid, unknown or inconsistent configuration."""

    exit_code = 2


class ValidationError(ConfigError):
    """A non-physical input value."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class DomainError(ArcSimError):
    """A request outside the domain of a formula."""

    exit_code = 2


class NumericalBudgetError(ArcSimError):
    """A numerical budget (truncation, coverage, perturbative ratio) was exceeded."""

    exit_code = 3


class TruncationError(NumericalBudgetError):
    """Too much probability mass falls outside the Fock ladder or the momentum grid."""

    def __init__(self, message: str, required: Optional[int] = None):
        self.required = required
        if required is not None:
            message = f"{message} (required N_max >= {required})"
        super().__init__(message)


class CoverageError(NumericalBudgetError):
    """The momentum grid is too narrow or too coarse for the wavepacket."""

    def __init__(self, message: str, required_half_width: Optional[int] = None):
        self.required_half_width = required_half_width
        if required_half_width is not None:
            message = f"{message} (required half_width >= {required_half_width})"
        super().__init__(message)


class PerturbativeError(NumericalBudgetError):
    """The coupling is too strong for first-order perturbation theory."""


class MemoryBudgetError(NumericalBudgetError):
    """The joint electron-photon state would not fit in the working-memory budget."""

    def __init__(self, message: str, required_bytes: Optional[int] = None):
        self.required_bytes = required_bytes
        super().__init__(message)


class CheckFailure(ArcSimError):
    """One or more gated verification checks failed."""

    exit_code = 1
