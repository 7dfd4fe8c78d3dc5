"""Exception hierarchy shared by every module of the package."""


class RoughDensError(Exception):
    """Base class for all package errors."""


class ParameterError(RoughDensError, ValueError):
    """An argument violates a documented precondition."""


class StateError(RoughDensError, RuntimeError):
    """An object lacks data required by the requested operation."""


class SimulationError(RoughDensError, RuntimeError):
    """A coefficient produced a non-finite value during time stepping."""

    def __init__(self, message, path=None, step=None):
        super().__init__(message)
        self.path = path
        self.step = step


class EstimationError(RoughDensError, RuntimeError):
    """A Monte Carlo functional could not be evaluated."""


class InsufficientDataError(RoughDensError, ValueError):
    """Too few usable points for a regression."""


class InfeasibleError(RoughDensError, ValueError):
    """Exponent hypotheses of a regularity statement are violated."""


class UsageError(RoughDensError, ValueError):
    """Bad CLI invocation, unknown scenario, or malformed config file."""
