"""Physical constants and unit conversions.

Internal unit system: length in kpc, mass in solar masses, velocity in km/s.
Densities then carry M_sun/kpc^3 and the thermal combination k_B*T/m carries
(km/s)^2, which keeps everything the solvers touch between O(1) and O(1e12).

Gas temperature over particle mass (``t_over_m``) is quoted in mK per
1e-36 kg throughout: T = 5.35 mK over m = 0.89e-36 kg gives t_over_m close
to 6 in these units.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "Constants",
    "CONSTANTS",
    "t_over_m_to_velocity_sq",
    "velocity_sq_to_t_over_m",
    "density_msun_pc3_to_internal",
    "density_internal_to_msun_pc3",
    "neutrino_mass_ev_to_kg",
    "neutrino_mass_kg_to_ev",
]


@dataclass(frozen=True)
class Constants:
    """Single authority for the physical constants used by the package."""

    G_gal: float = 4.30091e-6              # kpc (km/s)^2 / M_sun
    k_B: float = 1.380649e-23              # J/K, exact SI
    M_sun_kg: float = 1.98841e30
    pc_m: float = 3.0856775814913673e16
    kpc_m: float = 3.0856775814913673e19   # 1000 * pc_m
    eV_per_c2_kg: float = 1.78266192e-36


CONSTANTS = Constants()


def t_over_m_to_velocity_sq(t_over_m: float) -> float:
    """k_B*T/m in (km/s)^2 for T/m given in mK per 1e-36 kg."""
    if t_over_m < 0.0:
        raise ValueError("t_over_m must be non-negative")
    return t_over_m * CONSTANTS.k_B * 1e-3 / 1e-36 / 1e6


def velocity_sq_to_t_over_m(v_sq: float) -> float:
    """Inverse of :func:`t_over_m_to_velocity_sq`."""
    if v_sq < 0.0:
        raise ValueError("v_sq must be non-negative")
    return v_sq / (CONSTANTS.k_B * 1e-3 / 1e-36 / 1e6)


def density_msun_pc3_to_internal(rho: float) -> float:
    """M_sun/pc^3 to M_sun/kpc^3."""
    if rho < 0.0:
        raise ValueError("density must be non-negative")
    return rho * 1e9


def density_internal_to_msun_pc3(rho: float) -> float:
    """M_sun/kpc^3 to M_sun/pc^3."""
    if rho < 0.0:
        raise ValueError("density must be non-negative")
    return rho / 1e9


def neutrino_mass_ev_to_kg(m_ev: float) -> float:
    """Particle mass in eV/c^2 to kg."""
    if m_ev < 0.0:
        raise ValueError("mass must be non-negative")
    return m_ev * CONSTANTS.eV_per_c2_kg


def neutrino_mass_kg_to_ev(m_kg: float) -> float:
    """Particle mass in kg to eV/c^2."""
    if m_kg < 0.0:
        raise ValueError("mass must be non-negative")
    return m_kg / CONSTANTS.eV_per_c2_kg
