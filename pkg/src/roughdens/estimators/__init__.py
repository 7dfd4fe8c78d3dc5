"""Monte Carlo functionals, scaling fits and exponent calculus."""

from .exponents import (
    ExponentParams,
    LevyFeasibility,
    RegularityPrediction,
    bulk_parameters_from_rates,
    epsilon_schedule,
    levy_feasibility,
    levy_kappa,
    predicted_regularity,
    rough_drift_exponent,
)
from .io import estimate_to_json, fit_to_json, read_sweep_csv, write_sweep_csv
from .montecarlo import (
    EstimateWithError,
    ae_pe_split,
    batch_means,
    coupling_error_moments,
    cutoff_weight,
    difference_values,
    inverse_sigma_weight,
    mc_weighted_difference,
)
from .scaling import ScalingFit, fit_scaling
from .testfunctions import TEST_FAMILIES, TestFunction, make_probe, make_test_function

__all__ = [
    "ExponentParams",
    "LevyFeasibility",
    "RegularityPrediction",
    "bulk_parameters_from_rates",
    "epsilon_schedule",
    "levy_feasibility",
    "levy_kappa",
    "predicted_regularity",
    "rough_drift_exponent",
    "estimate_to_json",
    "fit_to_json",
    "read_sweep_csv",
    "write_sweep_csv",
    "EstimateWithError",
    "ae_pe_split",
    "batch_means",
    "coupling_error_moments",
    "cutoff_weight",
    "difference_values",
    "inverse_sigma_weight",
    "mc_weighted_difference",
    "ScalingFit",
    "fit_scaling",
    "TEST_FAMILIES",
    "TestFunction",
    "make_probe",
    "make_test_function",
]
