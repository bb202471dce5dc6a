"""Hydrostatic isothermal gas sphere around a central mass.

The gas obeys the ideal gas law P = (k_B T/m) rho at uniform temperature and
sits in hydrostatic equilibrium with the gravity of a central mass M0 plus
its own enclosed mass:

    (k_B T/m) / rho * drho/dr + g(r) = 0,
    g(r) = G * (M0 + M_dm(r)) / r^2,
    M_dm(r) = 4 pi * integral of rho(y) y^2 dy from r0 to r.

Differentiating the enclosed-mass integral turns this into the coupled
first-order system

    drho/dr = -(G / (k_B T/m)) * rho * (M0 + M_dm) / r^2,
    dM_dm/dr = 4 pi rho r^2,

with rho(r0) given and M_dm(r0) = 0, which the adaptive integrator solves
directly.  Circular-orbit speeds follow from v^2/r = g, i.e.
v = sqrt(G (M0 + M_dm) / r).  At large radii the solution approaches the
singular isothermal sphere, rho ~ 1/r^2 with a flat curve at
v = sqrt(2 k_B T/m).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import units
from .numerics import Trajectory, integrate_ivp

__all__ = [
    "GasParameters",
    "DensityProfile",
    "RotationCurve",
    "pressure",
    "solve_density_profile",
    "gravitational_field",
    "rotation_curve",
    "isentropic_wave_speed",
    "euler_residual",
    "DEFAULT_R_MAX_KPC",
    "DEFAULT_GRID_POINTS",
]

# Output grid covers published Milky Way rotation data ranges with margin.
DEFAULT_R_MAX_KPC = 250.0
DEFAULT_GRID_POINTS = 512

_FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class GasParameters:
    """Physical inputs of the gas model, in internal units.

    kT_over_m is the combination k_B*T/m in (km/s)^2; M0 the central mass in
    M_sun inside r0; r0 the inner boundary in kpc; rho0 the gas density at
    r0 in M_sun/kpc^3; gamma the adiabatic index.
    """

    kT_over_m: float
    M0: float
    r0: float
    rho0: float
    gamma: float = 5.0 / 3.0

    def __post_init__(self):
        if self.kT_over_m <= 0.0:
            raise ValueError("kT_over_m must be positive")
        if self.M0 <= 0.0:
            raise ValueError("M0 must be positive")
        if self.r0 <= 0.0:
            raise ValueError("r0 must be positive")
        if self.rho0 < 0.0:
            raise ValueError("rho0 must be non-negative")
        if self.gamma <= 1.0:
            raise ValueError("gamma must exceed 1")

    @classmethod
    def from_observational_units(cls, t_over_m: float, m0_msun: float, r0_kpc: float,
                                 rho0_msun_pc3: float, gamma: float = 5.0 / 3.0) -> "GasParameters":
        """Build parameters from T/m in mK per 1e-36 kg and rho0 in M_sun/pc^3."""
        return cls(
            kT_over_m=units.t_over_m_to_velocity_sq(t_over_m),
            M0=m0_msun,
            r0=r0_kpc,
            rho0=units.density_msun_pc3_to_internal(rho0_msun_pc3),
            gamma=gamma,
        )


@dataclass(frozen=True)
class DensityProfile:
    """Radial gas density and enclosed gas mass on a grid starting at r0.

    ``truncated`` flags a profile that was cut short because the density
    underflowed to zero before the requested outer radius.
    """

    r: np.ndarray
    rho: np.ndarray
    m_dm: np.ndarray
    truncated: bool = False

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        rho = np.asarray(self.rho, dtype=float)
        m = np.asarray(self.m_dm, dtype=float)
        if not (r.ndim == rho.ndim == m.ndim == 1):
            raise ValueError("profile arrays must be 1-d")
        if not (r.size == rho.size == m.size):
            raise ValueError("profile arrays must have equal length")
        if r.size < 2:
            raise ValueError("profile needs at least two grid points")
        if np.any(np.diff(r) <= 0.0):
            raise ValueError("radius grid must be strictly increasing")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(rho)) and np.all(np.isfinite(m))):
            raise ValueError("profile values must be finite")
        if np.any(rho < 0.0):
            raise ValueError("density must be non-negative")
        m_scale = max(1.0, float(np.max(np.abs(m))))
        if abs(m[0]) > 1e-9 * m_scale:
            raise ValueError("enclosed mass must start at zero")
        if np.any(np.diff(m) < -1e-9 * m_scale):
            raise ValueError("enclosed mass must be nondecreasing")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "m_dm", m)

    def __len__(self) -> int:
        return int(self.r.size)


@dataclass(frozen=True)
class RotationCurve:
    """Circular-orbit speed v (km/s) against galactocentric radius r (kpc)."""

    r: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if r.ndim != 1 or v.ndim != 1 or r.size != v.size:
            raise ValueError("curve arrays must be 1-d and of equal length")
        if np.any(np.diff(r) <= 0.0):
            raise ValueError("radius grid must be strictly increasing")
        if np.any(v <= 0.0) or not np.all(np.isfinite(v)):
            raise ValueError("speeds must be positive and finite")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "v", v)

    def __len__(self) -> int:
        return int(self.r.size)


def pressure(rho, params: GasParameters):
    """Ideal gas pressure (k_B T/m) * rho in M_sun (km/s)^2 / kpc^3."""
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(rho_arr < 0.0):
        raise ValueError("density must be non-negative")
    out = params.kT_over_m * rho_arr
    return float(out) if np.isscalar(rho) else out


def solve_density_profile(
    params: GasParameters,
    r_max: float = DEFAULT_R_MAX_KPC,
    rel_tol: float = 1e-8,
    *,
    grid_points: int = DEFAULT_GRID_POINTS,
    abs_tol: float = 1e-6,
) -> DensityProfile:
    """Solve the equilibrium system on a log-uniform grid over [r0, r_max].

    The integrator lands on every grid node exactly, so the returned samples
    carry solver accuracy.  If the density underflows to zero on the way out
    the profile is truncated at the last positive node and flagged.
    """
    if r_max <= params.r0:
        raise ValueError("r_max must exceed r0")
    if rel_tol <= 0.0:
        raise ValueError("rel_tol must be positive")
    if grid_points < 2:
        raise ValueError("grid_points must be at least 2")

    grid = np.geomspace(params.r0, r_max, grid_points)
    coef = units.CONSTANTS.G_gal / params.kT_over_m
    m0 = params.M0

    def rhs(r, y):
        rho_v, m_v = y
        r2 = r * r
        return np.array([-coef * rho_v * (m0 + m_v) / r2, _FOUR_PI * rho_v * r2])

    traj = integrate_ivp(rhs, np.array([params.rho0, 0.0]), (params.r0, r_max),
                         rel_tol=rel_tol, abs_tol=abs_tol, knots=grid)
    vals = traj.interpolate(grid)
    rho_g = vals[:, 0]
    m_g = np.maximum.accumulate(np.maximum(vals[:, 1], 0.0))

    truncated = False
    if params.rho0 > 0.0:
        bad = np.flatnonzero(rho_g <= 0.0)
        if bad.size:
            cut = int(bad[0])
            if cut < 2:
                raise ValueError("density vanished immediately inside the grid")
            grid, rho_g, m_g = grid[:cut], rho_g[:cut], m_g[:cut]
            truncated = True
            warnings.warn(
                f"density underflowed to zero at r={grid[-1]:.4g} kpc; "
                "profile truncated", RuntimeWarning, stacklevel=2)

    return DensityProfile(r=grid, rho=rho_g, m_dm=m_g, truncated=truncated)


def _enclosed_mass_at(profile: DensityProfile, r) -> np.ndarray:
    return np.interp(np.asarray(r, dtype=float), profile.r, profile.m_dm)


def gravitational_field(profile: DensityProfile, params: GasParameters, r):
    """g(r) = G (M0 + M_dm(r)) / r^2 in (km/s)^2/kpc, M_dm interpolated."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < profile.r[0]) or np.any(r_arr > profile.r[-1]):
        raise ValueError("radius outside the solved profile range")
    g = units.CONSTANTS.G_gal * (params.M0 + _enclosed_mass_at(profile, r_arr)) / r_arr**2
    return float(g) if np.isscalar(r) else g


def rotation_curve(profile: DensityProfile, params: GasParameters) -> RotationCurve:
    """Circular speed v = sqrt(G (M0 + M_dm) / r) on the profile grid."""
    v = np.sqrt(units.CONSTANTS.G_gal * (params.M0 + profile.m_dm) / profile.r)
    return RotationCurve(r=profile.r.copy(), v=v)


def isentropic_wave_speed(params: GasParameters) -> float:
    """Adiabatic sound speed sqrt(gamma * k_B T/m) in km/s."""
    return math.sqrt(params.gamma * params.kT_over_m)


def euler_residual(profile: DensityProfile, params: GasParameters, r: float) -> float:
    """Normalized hydrostatic-balance residual |(kT/m)/rho * drho/dr + g| / g.

    The density gradient is estimated from the profile samples alone with a
    local polynomial through up to five neighbouring nodes in log-radius, so
    this is an independent check on the solved profile, not a re-run of the
    solver.  ``r`` must lie strictly inside the grid; the residual is
    evaluated at the nearest interior node.
    """
    rg = profile.r
    n = rg.size
    if n < 3:
        raise ValueError("profile too short for a finite-difference residual")
    if not (rg[0] < r < rg[-1]):
        raise ValueError("r must lie strictly inside the profile range")

    i = int(np.clip(np.argmin(np.abs(rg - r)), 1, n - 2))
    lo = max(i - 2, 0)
    hi = min(i + 3, n)
    u = np.log(rg[lo:hi])
    du = u - u[i - lo]
    h = float(np.mean(np.abs(np.diff(u))))
    s = du / h
    # Exact interpolating polynomial through the window; its slope at the
    # centre node is the derivative estimate.
    vander = np.vander(s, N=s.size, increasing=True)
    coeffs = np.linalg.solve(vander, profile.rho[lo:hi])
    drho_du = coeffs[1] / h
    drho_dr = drho_du / rg[i]

    g = units.CONSTANTS.G_gal * (params.M0 + profile.m_dm[i]) / rg[i] ** 2
    rho_i = profile.rho[i]
    pressure_term = params.kT_over_m * drho_dr / rho_i if rho_i > 0.0 else 0.0
    return abs(pressure_term + g) / g
