"""Isothermal self-gravitating gas rotation curves, one-parameter fits, and
crossed-beam wire-scan diffraction metrics."""

from .fitting import FitError, FitResult, ObservedCurve, chi_square, fit_t_over_m
from .gas_model import (
    DensityProfile,
    GasParameters,
    RotationCurve,
    euler_residual,
    gravitational_field,
    isentropic_wave_speed,
    pressure,
    rotation_curve,
    solve_density_profile,
)
from .numerics import (
    ConvergenceFailure,
    IntegrationFailure,
    Trajectory,
    cumulative_trapezoid,
    integrate_ivp,
    minimize_scalar,
)
from .optics import (
    BeamConfig,
    ComplementarityMetrics,
    WireScanResult,
    WireSpec,
    complementarity_check,
    detector_fraction,
    scan_wire,
    two_beam_intensity,
    visibility,
    which_way,
)
from .units import CONSTANTS, Constants

__version__ = "0.1.0"

__all__ = [
    "BeamConfig",
    "CONSTANTS",
    "ComplementarityMetrics",
    "Constants",
    "ConvergenceFailure",
    "DensityProfile",
    "FitError",
    "FitResult",
    "GasParameters",
    "IntegrationFailure",
    "ObservedCurve",
    "RotationCurve",
    "Trajectory",
    "WireScanResult",
    "WireSpec",
    "chi_square",
    "complementarity_check",
    "cumulative_trapezoid",
    "detector_fraction",
    "euler_residual",
    "fit_t_over_m",
    "gravitational_field",
    "integrate_ivp",
    "isentropic_wave_speed",
    "minimize_scalar",
    "pressure",
    "rotation_curve",
    "scan_wire",
    "solve_density_profile",
    "two_beam_intensity",
    "visibility",
    "which_way",
]
