import math

import numpy as np
import pytest

from darkgas.optics import (
    BeamConfig,
    ComplementarityMetrics,
    ResolutionError,
    WireScanResult,
    WireSpec,
    complementarity_check,
    detector_fraction,
    far_field,
    scan_wire,
    two_beam_intensity,
    visibility,
    which_way,
)

FRINGE = 212.5e-6
WIRE = 17e-6


@pytest.fixture(scope="module")
def config():
    return BeamConfig()


# ---------------------------------------------------------------------------
# geometry

def test_default_geometry(config):
    assert config.fringe_spacing == pytest.approx(12.5 * WIRE)
    assert config.full_crossing_angle == pytest.approx(650e-9 / FRINGE)
    assert config.half_crossing_angle == pytest.approx(config.full_crossing_angle / 2.0)


def test_from_crossing_angle_round_trip(config):
    rebuilt = BeamConfig.from_crossing_angle(
        config.wavelength, config.half_crossing_angle,
        e0_sq=config.e0_sq, region_width=config.region_width)
    assert rebuilt.fringe_spacing == pytest.approx(config.fringe_spacing, rel=1e-12)


def test_config_validation():
    with pytest.raises(ValueError):
        BeamConfig(wavelength=0.0)
    with pytest.raises(ValueError):
        BeamConfig(e0_sq=0.0)
    with pytest.raises(ValueError):
        BeamConfig(region_width=FRINGE)  # fewer than two fringes
    with pytest.raises(ValueError):
        BeamConfig(wavelength=650e-9, fringe_spacing=5e-6)  # angle too steep


def test_wire_validation():
    with pytest.raises(ValueError):
        WireSpec(width=0.0)
    with pytest.raises(ValueError):
        WireSpec(width=WIRE, opaque=False)


# ---------------------------------------------------------------------------
# two-beam intensity

def test_intensity_fringe_anchors(config):
    e0 = config.e0_sq
    assert two_beam_intensity(config, 0.0) == pytest.approx(2.0 * e0)
    assert two_beam_intensity(config, FRINGE / 2.0) == pytest.approx(0.0, abs=1e-12)
    assert two_beam_intensity(config, FRINGE / 4.0) == pytest.approx(e0)


def test_intensity_periodic_and_nonnegative(config):
    y = np.linspace(-config.region_width / 2.0, config.region_width / 2.0 - FRINGE, 400)
    i0 = two_beam_intensity(config, y)
    i1 = two_beam_intensity(config, y + FRINGE)
    assert np.max(np.abs(i0 - i1)) < 1e-12
    assert np.all(i0 >= 0.0)


def test_intensity_mean_over_integer_periods(config):
    # Mean intensity over whole fringes equals the sum of the two beam
    # intensities (e0_sq): energy conservation of the crossing beams.
    y = np.linspace(-2.0 * FRINGE, 2.0 * FRINGE, 4097)
    mean = np.trapezoid(two_beam_intensity(config, y), y) / (4.0 * FRINGE)
    assert abs(mean - config.e0_sq) < 1e-9


def test_intensity_range_error(config):
    with pytest.raises(ValueError):
        two_beam_intensity(config, config.region_width)


# ---------------------------------------------------------------------------
# far field and detector fraction

def test_parseval(config):
    n = 2**14
    width = 4.0 * config.region_width
    dy = width / n
    y = (np.arange(n) - n // 2) * dy
    field = np.where(np.abs(y) <= config.region_width / 2.0,
                     np.exp(1j * math.pi * y / FRINGE), 0.0)
    freqs, amp = far_field(field, dy)
    near = np.sum(np.abs(field) ** 2) * dy
    far = np.sum(np.abs(amp) ** 2) * (freqs[1] - freqs[0])
    assert abs(near - far) / near < 1e-9


def test_wire_at_dark_fringe_keeps_count_near_one(config):
    f = detector_fraction(config, WireSpec(width=WIRE, center=FRINGE / 2.0))
    assert f >= 0.98
    assert f == pytest.approx(0.999658, abs=5e-5)


def test_wire_at_bright_fringe_dims_count(config):
    f = detector_fraction(config, WireSpec(width=WIRE, center=0.0))
    assert f == pytest.approx(0.939853, abs=5e-5)
    assert f < detector_fraction(config, WireSpec(width=WIRE, center=FRINGE / 2.0))


def test_detectors_symmetric_for_centered_wire(config):
    wire = WireSpec(width=WIRE, center=0.0)
    f_plus = detector_fraction(config, wire, detector="plus")
    f_minus = detector_fraction(config, wire, detector="minus")
    assert f_plus == pytest.approx(f_minus, rel=1e-9)


def test_vanishing_wire_recovers_full_count(config):
    # smallest wire the grid can resolve on a fine grid
    dy = 4.0 * config.region_width / 2**17
    f = detector_fraction(config, WireSpec(width=9.0 * dy), samples=2**17)
    assert abs(f - 1.0) < 0.01


def test_fraction_monotone_in_wire_width_at_bright_fringe(config):
    widths = np.array([2.0, 5.0, 10.0, 17.0, 40.0, 80.0, 150.0]) * 1e-6
    fs = [detector_fraction(config, WireSpec(width=w), samples=2**15) for w in widths]
    assert np.all(np.diff(fs) < 0.0)


def test_grid_convergence(config):
    wire = WireSpec(width=WIRE, center=0.0)
    f1 = detector_fraction(config, wire, samples=2**14)
    f2 = detector_fraction(config, wire, samples=2**15)
    assert abs(f1 - f2) < 0.005


def test_resolution_error(config):
    with pytest.raises(ResolutionError):
        detector_fraction(config, WireSpec(width=WIRE), samples=2**10)


def test_detector_fraction_argument_errors(config):
    with pytest.raises(ValueError):
        detector_fraction(config, WireSpec(width=FRINGE))  # as wide as a fringe
    with pytest.raises(ValueError):
        detector_fraction(config, WireSpec(width=WIRE, center=config.region_width))
    with pytest.raises(ValueError):
        detector_fraction(config, WireSpec(width=WIRE), detector="top")


# ---------------------------------------------------------------------------
# wire scan

def test_scan_is_periodic_at_dark_fringes(config):
    result = scan_wire(config, WIRE, [FRINGE / 2.0, 3.0 * FRINGE / 2.0, -FRINGE / 2.0])
    assert np.max(result.f) - np.min(result.f) < 0.01


def test_scan_extrema_sit_on_fringe_centers(config):
    # Extrema sit on the fringe centers up to boundary effects from the
    # region covering a non-integer number of fringes.
    positions = np.linspace(-FRINGE / 2.0, FRINGE / 2.0, 41)
    result = scan_wire(config, WIRE, positions)
    assert abs(result.positions[np.argmin(result.f)]) <= FRINGE / 15
    assert abs(result.positions[np.argmax(result.f)]) == pytest.approx(FRINGE / 2.0,
                                                                       abs=FRINGE / 15)
    assert np.all(result.f <= 1.0 + 1e-9)
    assert np.all(result.f >= 0.0)


def test_scan_empty_positions(config):
    result = scan_wire(config, WIRE, [])
    assert len(result) == 0


def test_scan_parallel_matches_serial(config):
    positions = np.linspace(-FRINGE / 4.0, FRINGE / 4.0, 5)
    serial = scan_wire(config, WIRE, positions)
    threaded = scan_wire(config, WIRE, positions, max_workers=2)
    assert np.array_equal(serial.f, threaded.f)


def test_scan_result_validation():
    with pytest.raises(ValueError):
        WireScanResult(positions=np.array([0.0]), f=np.array([1.5]))
    with pytest.raises(ValueError):
        WireScanResult(positions=np.array([0.0, 1.0]), f=np.array([0.5]))


# ---------------------------------------------------------------------------
# complementarity bookkeeping

def test_visibility_values():
    assert visibility(1.0, 0.0) == pytest.approx(1.0)
    assert visibility(2.0, 2.0) == pytest.approx(0.0)
    assert visibility(3.0, 1.0) == pytest.approx(0.5)


def test_visibility_errors():
    with pytest.raises(ValueError):
        visibility(0.0, 0.0)
    with pytest.raises(ValueError):
        visibility(1.0, 2.0)
    with pytest.raises(ValueError):
        visibility(1.0, -0.5)


def test_which_way_values():
    assert which_way(0.3, 0.0) == pytest.approx(1.0)
    assert which_way(0.4, 0.4) == pytest.approx(0.0)
    assert which_way(0.75, 0.25) == pytest.approx(0.5)


def test_which_way_errors():
    with pytest.raises(ValueError):
        which_way(0.0, 0.0)
    with pytest.raises(ValueError):
        which_way(-0.1, 0.5)


def test_complementarity_table():
    m = complementarity_check(1.0, 0.0)
    assert m.sum_sq == pytest.approx(1.0)
    assert m.satisfied

    m = complementarity_check(1.0, 1.0)
    assert m.sum_sq == pytest.approx(2.0)
    assert not m.satisfied

    v = k = 1.0 / math.sqrt(2.0)
    m = complementarity_check(v, k)
    assert m.sum_sq == pytest.approx(1.0, abs=1e-12)
    assert m.satisfied
    assert m.sum_sq == k * k + v * v  # stored exactly


def test_complementarity_validation():
    with pytest.raises(ValueError):
        complementarity_check(1.2, 0.0)
    with pytest.raises(ValueError):
        complementarity_check(0.5, -0.1)


def test_metrics_fields():
    m = ComplementarityMetrics(V=0.6, K=0.8, sum_sq=1.0, satisfied=True)
    assert m.V == 0.6 and m.K == 0.8
