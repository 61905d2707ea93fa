"""Full and reduced models of a stochastic reaction-diffusion equation with slow/fast modes.

The full model is a cubic reaction-diffusion SPDE on ``(0, pi)`` with noise
on fast sine modes. The reduced models are the averaged (Landau) equation
with its Gaussian deviation correction, and a one-dimensional stochastic
slow-manifold SDE.
"""

from .errors import (
    CovarianceError,
    DegenerateDecayError,
    DivergenceError,
    EnsembleFailureError,
    GridMismatchError,
    InvalidCutoffError,
    InvalidStepError,
    NotForcedError,
    ScenarioError,
    SRDEError,
)
from .fullsim import SimConfig, Trajectory, simulate_batch, simulate_coupled, simulate_full, step_full
from .noise import SeededRng, ou_exact_step, stationary_variance, wiener_increment
from .params import ModelParams, NoiseSpectrum, example_params
from .reduced import (
    averaged_derivative_drift,
    averaged_drift,
    covariance_B_closed_example,
    covariance_B_quadrature,
    integrate_averaged,
    integrate_deviation,
    landau_equilibrium,
    reconstruct,
    simulate_manifold,
)
from .spectral import Basis, coupling_tensor, cubic_galerkin, project_fast, project_slow, sine_product_integral
from .stats import (
    EnsembleStats,
    FitResult,
    compare_models,
    convergence_order,
    fitnum_fit,
    linear_fit,
    run_ensemble,
    stationary_mean_var,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "CovarianceError",
    "DegenerateDecayError",
    "DivergenceError",
    "EnsembleFailureError",
    "EnsembleStats",
    "FitResult",
    "GridMismatchError",
    "InvalidCutoffError",
    "InvalidStepError",
    "ModelParams",
    "NoiseSpectrum",
    "NotForcedError",
    "SRDEError",
    "ScenarioError",
    "SeededRng",
    "SimConfig",
    "Trajectory",
    "averaged_derivative_drift",
    "averaged_drift",
    "compare_models",
    "convergence_order",
    "coupling_tensor",
    "covariance_B_closed_example",
    "covariance_B_quadrature",
    "cubic_galerkin",
    "example_params",
    "fitnum_fit",
    "integrate_averaged",
    "integrate_deviation",
    "landau_equilibrium",
    "linear_fit",
    "ou_exact_step",
    "project_fast",
    "project_slow",
    "reconstruct",
    "run_ensemble",
    "simulate_batch",
    "simulate_coupled",
    "simulate_full",
    "simulate_manifold",
    "sine_product_integral",
    "stationary_mean_var",
    "stationary_variance",
    "step_full",
    "sweep",
    "wiener_increment",
]
