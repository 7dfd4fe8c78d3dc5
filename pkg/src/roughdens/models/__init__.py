"""Coefficient specifications, built-in model families and Euler simulation."""

from .core import (
    CHUNK_PATHS,
    WORKERS_ENV,
    CoefficientSpec,
    ModelSpec,
    PathEnsemble,
    PathView,
    default_workers,
    euler_increment,
    read_ensemble_csv,
    reintegrate_window,
    simulate_ensemble,
    simulate_with_checkpoint,
    time_grid,
    write_ensemble_csv,
)
from .library import (
    BUILTIN_MODELS,
    Weierstrass,
    brownian_model,
    build_model,
    drift_lp_membership,
    holder_kink_model,
    hypoelliptic_model,
    linear_hypoelliptic_model,
    running_max_model,
    running_max_profile,
    singular_sigma_model,
    squared_bessel_model,
    stable_holder_model,
    stable_model,
    taylor_drift_model,
    truncated_singular_drift,
    truncated_singular_drift_model,
    weierstrass_drift_model,
    weierstrass_sigma_model,
)

__all__ = [
    "CHUNK_PATHS",
    "WORKERS_ENV",
    "CoefficientSpec",
    "ModelSpec",
    "PathEnsemble",
    "PathView",
    "default_workers",
    "euler_increment",
    "read_ensemble_csv",
    "reintegrate_window",
    "simulate_ensemble",
    "simulate_with_checkpoint",
    "time_grid",
    "write_ensemble_csv",
    "BUILTIN_MODELS",
    "Weierstrass",
    "brownian_model",
    "build_model",
    "truncated_singular_drift",
    "stable_holder_model",
    "running_max_profile",
    "drift_lp_membership",
    "holder_kink_model",
    "hypoelliptic_model",
    "linear_hypoelliptic_model",
    "running_max_model",
    "singular_sigma_model",
    "squared_bessel_model",
    "stable_model",
    "taylor_drift_model",
    "truncated_singular_drift_model",
    "weierstrass_drift_model",
    "weierstrass_sigma_model",
]
