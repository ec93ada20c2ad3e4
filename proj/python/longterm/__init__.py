"""Long-term treatment effect estimation from short A/B experiments."""

from longterm._core import (
    Dataset,
    LongtermError,
    alternate_minimize,
    default_reward_theta,
    estimate_effects,
    estimate_reward_coefficients,
    fit_stationary,
    gen_synthetic,
    ground_truth_delta,
    load_dataset,
    spectral_radius,
)

__all__ = [
    "Dataset",
    "LongtermError",
    "alternate_minimize",
    "default_reward_theta",
    "estimate_effects",
    "estimate_reward_coefficients",
    "fit_stationary",
    "gen_synthetic",
    "ground_truth_delta",
    "load_dataset",
    "spectral_radius",
]
