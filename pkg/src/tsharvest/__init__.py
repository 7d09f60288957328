"""Harvesting of a logistic population under Gaussian and tempered-stable jump noise.

Analytic threshold, optimal-harvest and sensitivity formulas, a seeded
Monte Carlo engine, ensemble statistics and an experiment CLI.
"""

__version__ = "0.1.0"

from .analytics import (  # noqa: E402
    ModelParams,
    RegimeTag,
    capacity_A,
    classify,
    critical_sigma,
    expected_yield,
    mean_population,
    optimal_policy,
    sensitivities,
    threshold_phi,
)
from .engine import Scheme, SimConfig, simulate_ensemble, simulate_path  # noqa: E402
from .levy import LevyParams, phi_integral, sensitivity_integral  # noqa: E402
from .quadrature import QuadratureConfig  # noqa: E402
from .sampler import RngStream, SmallJumpMode  # noqa: E402

__all__ = [
    "LevyParams", "ModelParams", "QuadratureConfig", "RegimeTag", "RngStream", "Scheme",
    "SimConfig", "SmallJumpMode", "capacity_A", "classify", "critical_sigma", "expected_yield",
    "mean_population", "optimal_policy", "phi_integral", "sensitivities", "sensitivity_integral",
    "simulate_ensemble", "simulate_path", "threshold_phi",
]
