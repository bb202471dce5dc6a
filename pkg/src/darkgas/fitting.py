"""Chi-square fit of the gas model's single free parameter T/m.

The objective rebuilds the full pipeline at every trial value: convert T/m
to internal units, solve the density profile, form the rotation curve, and
score it against the observations.  A trial whose solve fails is scored
with a large finite penalty so the search can continue around it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import units
from .gas_model import GasParameters, RotationCurve, rotation_curve, solve_density_profile
from .numerics import IntegrationFailure, minimize_scalar

__all__ = [
    "ObservedCurve",
    "FitResult",
    "FitError",
    "chi_square",
    "fit_t_over_m",
    "DEFAULT_BRACKET",
]

# Spans the expected Milky Way value of about 6 with wide margin.
DEFAULT_BRACKET = (0.5, 50.0)

_PENALTY = 1e300


class FitError(RuntimeError):
    """Every trial parameter failed to produce a scoreable model."""


@dataclass(frozen=True)
class ObservedCurve:
    """Measured rotation curve samples (r in kpc, v and sigma_v in km/s)."""

    r: np.ndarray
    v: np.ndarray
    sigma_v: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        v = np.asarray(self.v, dtype=float)
        s = np.asarray(self.sigma_v, dtype=float)
        if not (r.ndim == v.ndim == s.ndim == 1):
            raise ValueError("observed arrays must be 1-d")
        if not (r.size == v.size == s.size):
            raise ValueError("observed arrays must have equal length")
        if r.size == 0:
            raise ValueError("observed curve must contain at least one point")
        if np.any(np.diff(r) <= 0.0):
            raise ValueError("observed radii must be strictly increasing")
        if np.any(s <= 0.0):
            raise ValueError("velocity uncertainties must be positive")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v)) and np.all(np.isfinite(s))):
            raise ValueError("observed values must be finite")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "sigma_v", s)

    @classmethod
    def from_points(cls, points: Sequence[tuple]) -> "ObservedCurve":
        """Build from (r, v, sigma_v) tuples in any order; sorts by radius."""
        pts = sorted(points, key=lambda p: p[0])
        r = np.array([p[0] for p in pts], dtype=float)
        v = np.array([p[1] for p in pts], dtype=float)
        s = np.array([p[2] for p in pts], dtype=float)
        return cls(r=r, v=v, sigma_v=s)

    def __len__(self) -> int:
        return int(self.r.size)


@dataclass(frozen=True)
class FitResult:
    """Best-fit T/m in mK per 1e-36 kg with its goodness of fit.

    ``boundary_hit`` is set when the minimizer landed within the search
    tolerance of a bracket edge, meaning the data did not constrain the
    parameter inside the bracket.
    """

    t_over_m_best: float
    chi2: float
    reduced_chi2: float
    evaluations: int
    bracket: tuple
    boundary_hit: bool


def chi_square(model: RotationCurve, observed: ObservedCurve) -> float:
    """Sum of ((v_model(r_i) - v_i) / sigma_i)^2 over the observed points.

    The model curve is interpolated linearly at the observed radii; a point
    outside the model grid raises ``ValueError`` naming the radius.
    """
    for r_i in observed.r:
        if r_i < model.r[0] or r_i > model.r[-1]:
            raise ValueError(
                f"observed point at r={r_i:g} kpc lies outside the model "
                f"grid [{model.r[0]:g}, {model.r[-1]:g}]")
    v_model = np.interp(observed.r, model.r, model.v)
    return float(np.sum(((v_model - observed.v) / observed.sigma_v) ** 2))


def fit_t_over_m(
    observed: ObservedCurve,
    template: GasParameters,
    bracket=DEFAULT_BRACKET,
    tol: float = 1e-3,
    *,
    rel_tol: float = 1e-8,
    r_max: float | None = None,
) -> FitResult:
    """Minimize the chi-square over T/m inside ``bracket``.

    ``template`` supplies every parameter except kT_over_m, which is
    replaced at each trial.  ``r_max`` defaults to the outermost observed
    radius.  Raises :class:`FitError` if no trial value yields a model
    covering the data.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not 0.0 < lo < hi:
        raise ValueError("bracket must satisfy 0 < lo < hi")
    if r_max is None:
        r_max = float(observed.r[-1])
    if r_max <= template.r0:
        raise ValueError("outermost observed radius must exceed r0")
    if np.any(observed.r < template.r0):
        raise ValueError("observed radii must not fall inside r0")

    def objective(t: float) -> float:
        params = replace(template, kT_over_m=units.t_over_m_to_velocity_sq(t))
        try:
            with warnings.catch_warnings():
                # Truncation warnings are expected for hopeless trials.
                warnings.simplefilter("ignore", RuntimeWarning)
                profile = solve_density_profile(params, r_max=r_max, rel_tol=rel_tol)
            return chi_square(rotation_curve(profile, params), observed)
        except (IntegrationFailure, ValueError):
            # Truncated or failed solves score as a large finite penalty so
            # the bracketed search keeps going.
            return _PENALTY

    result = minimize_scalar(objective, (lo, hi), tol=tol)
    if result.fun >= _PENALTY:
        raise FitError("no trial value of T/m produced a model covering the data")

    dof = max(len(observed) - 1, 1)
    return FitResult(
        t_over_m_best=result.x,
        chi2=result.fun,
        reduced_chi2=result.fun / dof,
        evaluations=result.evaluations,
        bracket=(lo, hi),
        boundary_hit=(result.x - lo) <= tol or (hi - result.x) <= tol,
    )
