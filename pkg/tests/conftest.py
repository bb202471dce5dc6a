import numpy as np
import pytest

from darkgas import gas_model

# Milky Way reference configuration used across the suite.
T_OVER_M = 6.0
M0 = 9e10
R0 = 8.34
RHO0_MSUN_PC3 = 0.01


@pytest.fixture(scope="session")
def mw_params():
    return gas_model.GasParameters.from_observational_units(
        T_OVER_M, M0, R0, RHO0_MSUN_PC3)


@pytest.fixture(scope="session")
def mw_profile(mw_params):
    """Default-range solve, shared by tests that only read it."""
    return gas_model.solve_density_profile(mw_params)


@pytest.fixture(scope="session")
def mw_curve(mw_params, mw_profile):
    return gas_model.rotation_curve(mw_profile, mw_params)


def synth_observed(params, radii, sigma=1.0, noise=0.0, seed=None):
    """Observed-curve arrays sampled from the model at the given radii."""
    profile = gas_model.solve_density_profile(params, r_max=float(np.max(radii)))
    curve = gas_model.rotation_curve(profile, params)
    v = np.interp(radii, curve.r, curve.v)
    if noise > 0.0:
        v = v + np.random.default_rng(seed).normal(0.0, noise, size=len(radii))
    return np.asarray(radii, dtype=float), v, np.full(len(radii), float(sigma))
