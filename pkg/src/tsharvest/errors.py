"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto process exit codes (see ``tsharvest.cli``).
"""


class HarvestError(Exception):
    """Base class for all package errors."""


class DomainError(HarvestError, ValueError):
    """Invalid parameter values or arguments outside an operation's domain."""


class ConfigError(HarvestError):
    """Unreadable or inconsistent configuration."""


class NumericalError(HarvestError):
    """Base class for quadrature and root-finding failures."""


class QuadratureError(NumericalError):
    """Adaptive quadrature did not reach tolerance within the subdivision budget."""

    def __init__(self, message, estimate=float("nan"), error=float("nan")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class BracketError(NumericalError):
    """A sign-change bracket could not be found."""


class RegimeError(HarvestError):
    """The requested quantity does not exist in the current persistence regime."""


class NoPolicyError(RegimeError):
    """No optimal harvesting policy exists (capacity A <= 0)."""


class SamplerError(HarvestError):
    """Rejection sampling exceeded its iteration cap."""


class SimulationError(HarvestError):
    """The integrated state became non-finite."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step
