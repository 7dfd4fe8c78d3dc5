"""Monte Carlo laboratory for the Besov regularity of densities of rough SDEs."""

from . import auxiliary, besov, drivers, estimators, models, scenarios
from .errors import (EstimationError, InfeasibleError, InsufficientDataError, ParameterError,
                     RoughDensError, SimulationError, StateError, UsageError)

__version__ = "0.1.0"

__all__ = [
    "auxiliary", "besov", "drivers", "estimators", "models", "scenarios",
    "EstimationError", "InfeasibleError", "InsufficientDataError", "ParameterError",
    "RoughDensError", "SimulationError", "StateError", "UsageError",
]
