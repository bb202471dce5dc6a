"""Command-line interface.

Modes:

    rotcurve      solve the gas sphere and write the rotation curve
    fit           fit T/m to an observed rotation curve from CSV
    wavespeed     print the isentropic wave speed for a given T/m
    scanwire      scan a wire across the beam intersection, tabulate f
    interference  dump the two-beam intensity profile
    check         run the built-in verification suite

Flags carry observational units (T/m in mK per 1e-36 kg, densities in
M_sun/pc^3, radii in kpc, optics lengths in meters) and are converted at
this boundary; the engines work in the internal unit system throughout.
Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import dataio, fitting, gas_model, optics, units
from .numerics import ConvergenceFailure, IntegrationFailure, cumulative_trapezoid

__all__ = ["build_parser", "run_cli", "main"]

# Milky Way defaults: solar-circle radius and local gas density, with the
# central mass chosen so the inner curve matches the solar-circle speed.
DEFAULT_T_OVER_M = 6.0
DEFAULT_M0 = 9e10
DEFAULT_R0 = 8.34
DEFAULT_RHO0 = 0.01
DEFAULT_GAMMA = 5.0 / 3.0

THREADS_ENV = "DARKGAS_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_gas_arguments(p: _Parser, with_t_over_m: bool = True,
                       with_profile_grid: bool = True) -> None:
    g = p.add_argument_group("gas model")
    if with_t_over_m:
        g.add_argument("--t-over-m", type=float, default=DEFAULT_T_OVER_M,
                       help="gas temperature over particle mass, mK per 1e-36 kg "
                            f"(default {DEFAULT_T_OVER_M}, Milky Way fit value)")
    g.add_argument("--m0", type=float, default=DEFAULT_M0,
                   help="central mass inside r0, M_sun (default %(default)g, "
                        "matches the observed solar-circle speed)")
    g.add_argument("--r0", type=float, default=DEFAULT_R0,
                   help="inner radius, kpc (default %(default)g, solar circle)")
    g.add_argument("--rho0", type=float, default=DEFAULT_RHO0,
                   help="gas density at r0, M_sun/pc^3 (default %(default)g, "
                        "local dark matter density)")
    g.add_argument("--gamma", type=float, default=DEFAULT_GAMMA,
                   help="adiabatic index (default 5/3, monatomic gas)")
    if with_profile_grid:
        g.add_argument("--r-max", type=float, default=gas_model.DEFAULT_R_MAX_KPC,
                       help="outer radius of the solved profile, kpc (default %(default)g)")
        g.add_argument("--grid-points", type=int, default=gas_model.DEFAULT_GRID_POINTS,
                       help="log-uniform output grid size (default %(default)d)")
    g.add_argument("--rel-tol", type=float, default=1e-8,
                   help="relative tolerance of the profile solver (default %(default)g)")


def _add_optics_arguments(p: _Parser) -> None:
    g = p.add_argument_group("beam geometry")
    g.add_argument("--wavelength", type=float, default=650e-9,
                   help="laser wavelength, m (default %(default)g, red diode laser)")
    g.add_argument("--fringe-spacing", type=float, default=212.5e-6,
                   help="interference fringe spacing, m (default %(default)g, "
                        "12.5 wire widths); the crossing angle follows from this")
    g.add_argument("--region-width", type=float, default=1.0e-3,
                   help="beam intersection width, m (default %(default)g)")
    g.add_argument("--e0-sq", type=float, default=1.0,
                   help="peak single-beam intensity scale (default %(default)g)")
    g.add_argument("--grid-samples", type=int, default=optics.GRID_SAMPLES,
                   help="transverse grid samples (default %(default)d)")
    g.add_argument("--pad-factor", type=float, default=optics.GRID_PAD_FACTOR,
                   help="grid width as a multiple of the region (default %(default)g)")


def _add_output_arguments(p: _Parser) -> None:
    g = p.add_argument_group("output")
    g.add_argument("--out", help="output file path")
    g.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="output format (default %(default)s)")
    g.add_argument("--plot", help="write an SVG plot to this path")


def build_parser() -> _Parser:
    parser = _Parser(
        prog="darkgas",
        description="Isothermal self-gravitating gas rotation curves and "
                    "crossed-beam wire-scan diffraction metrics.")
    sub = parser.add_subparsers(dest="mode", required=True, metavar="MODE")

    p = sub.add_parser("rotcurve", help="solve the gas sphere and write the rotation curve")
    _add_gas_arguments(p)
    _add_output_arguments(p)

    p = sub.add_parser("fit", help="fit T/m to observed rotation data")
    p.add_argument("--data", required=True,
                   help="observed curve CSV with header r_kpc,v_kms[,sigma_kms]")
    _add_gas_arguments(p, with_t_over_m=False, with_profile_grid=False)
    p.add_argument("--bracket-lo", type=float, default=fitting.DEFAULT_BRACKET[0],
                   help="lower edge of the T/m search bracket (default %(default)g)")
    p.add_argument("--bracket-hi", type=float, default=fitting.DEFAULT_BRACKET[1],
                   help="upper edge of the T/m search bracket (default %(default)g)")
    p.add_argument("--tol", type=float, default=1e-3,
                   help="absolute tolerance on the fitted T/m (default %(default)g)")
    _add_output_arguments(p)

    p = sub.add_parser("wavespeed", help="print the isentropic wave speed")
    p.add_argument("--t-over-m", type=float, default=DEFAULT_T_OVER_M,
                   help="gas temperature over particle mass, mK per 1e-36 kg "
                        f"(default {DEFAULT_T_OVER_M})")
    p.add_argument("--gamma", type=float, default=DEFAULT_GAMMA,
                   help="adiabatic index (default 5/3)")

    p = sub.add_parser("scanwire", help="scan a wire across the beam intersection")
    _add_optics_arguments(p)
    p.add_argument("--wire-width", type=float, default=17e-6,
                   help="wire thickness, m (default %(default)g)")
    p.add_argument("--scan-start", type=float, default=None,
                   help="first wire center, m (default: leftmost position that fits)")
    p.add_argument("--scan-stop", type=float, default=None,
                   help="last wire center, m (default: rightmost position that fits)")
    p.add_argument("--scan-points", type=int, default=161,
                   help="number of scan positions (default %(default)d)")
    p.add_argument("--acceptance-halfwidths", type=float, default=optics.DETECTOR_HALFWIDTHS,
                   help="detector half-width in diffraction half-widths "
                        "lambda/region (default %(default)g)")
    _add_output_arguments(p)

    p = sub.add_parser("interference", help="dump the two-beam intensity profile")
    _add_optics_arguments(p)
    p.add_argument("--points", type=int, default=513,
                   help="number of sample positions across the region (default %(default)d)")
    _add_output_arguments(p)

    p = sub.add_parser("check", help="run the built-in verification suite")

    return parser


def _gas_params(args, t_over_m: float) -> gas_model.GasParameters:
    return gas_model.GasParameters.from_observational_units(
        t_over_m=t_over_m, m0_msun=args.m0, r0_kpc=args.r0,
        rho0_msun_pc3=args.rho0, gamma=args.gamma)


def _beam_config(args) -> optics.BeamConfig:
    return optics.BeamConfig(
        wavelength=args.wavelength, fringe_spacing=args.fringe_spacing,
        e0_sq=args.e0_sq, region_width=args.region_width)


def _param_echo(args, keys) -> dict:
    return {k: getattr(args, k) for k in keys}


def _cmd_rotcurve(args) -> int:
    params = _gas_params(args, args.t_over_m)
    profile = gas_model.solve_density_profile(
        params, r_max=args.r_max, rel_tol=args.rel_tol, grid_points=args.grid_points)
    curve = gas_model.rotation_curve(profile, params)
    echo = _param_echo(args, ("t_over_m", "m0", "r0", "rho0", "gamma",
                              "r_max", "rel_tol", "grid_points"))
    if args.out:
        dataio.write_results(args.out, args.format, (profile, curve), params=echo)
    if args.plot:
        dataio.emit_svg_plot(
            args.plot, [(curve.r, curve.v, "model")],
            xlabel="r (kpc)", ylabel="v (km/s)", title="rotation curve")
    print(f"solved {len(profile)} grid points from {profile.r[0]:g} to "
          f"{profile.r[-1]:g} kpc; v ranges {curve.v.min():.2f} to "
          f"{curve.v.max():.2f} km/s" + (" [truncated]" if profile.truncated else ""))
    return 0


def _cmd_fit(args) -> int:
    observed = dataio.load_observed_csv(args.data)
    mid = 0.5 * (args.bracket_lo + args.bracket_hi)
    template = _gas_params(args, mid)
    result = fitting.fit_t_over_m(
        observed, template, bracket=(args.bracket_lo, args.bracket_hi),
        tol=args.tol, rel_tol=args.rel_tol)
    echo = _param_echo(args, ("data", "m0", "r0", "rho0", "gamma",
                              "bracket_lo", "bracket_hi", "tol", "rel_tol"))
    if args.out:
        dataio.write_results(args.out, args.format, result, params=echo)
    if args.plot:
        best = _gas_params(args, result.t_over_m_best)
        profile = gas_model.solve_density_profile(
            best, r_max=float(observed.r[-1]), rel_tol=args.rel_tol)
        curve = gas_model.rotation_curve(profile, best)
        dataio.emit_svg_plot(
            args.plot,
            [(curve.r, curve.v, "model"), (observed.r, observed.v, "observed")],
            xlabel="r (kpc)", ylabel="v (km/s)", title="rotation curve fit")
    flag = " (boundary hit)" if result.boundary_hit else ""
    print(f"T/m = {result.t_over_m_best:.4f} mK per 1e-36 kg{flag}; "
          f"chi2 = {result.chi2:.4f} (reduced {result.reduced_chi2:.4f}) "
          f"after {result.evaluations} evaluations")
    return 0


def _cmd_wavespeed(args) -> int:
    params = gas_model.GasParameters(
        kT_over_m=units.t_over_m_to_velocity_sq(args.t_over_m),
        M0=1.0, r0=1.0, rho0=0.0, gamma=args.gamma)
    print(f"{gas_model.isentropic_wave_speed(params):.4f} km/s")
    return 0


def _scan_workers() -> int | None:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer") from None
    if n < 0:
        raise UsageError(f"{THREADS_ENV} must be non-negative")
    return n


def _cmd_scanwire(args) -> int:
    config = _beam_config(args)
    reach = (config.region_width - args.wire_width) / 2.0
    start = -reach if args.scan_start is None else args.scan_start
    stop = reach if args.scan_stop is None else args.scan_stop
    if args.scan_points < 1:
        raise UsageError("--scan-points must be at least 1")
    positions = np.linspace(start, stop, args.scan_points)
    result = optics.scan_wire(
        config, args.wire_width, positions,
        samples=args.grid_samples, pad_factor=args.pad_factor,
        acceptance_halfwidths=args.acceptance_halfwidths,
        max_workers=_scan_workers())
    echo = _param_echo(args, ("wavelength", "fringe_spacing", "region_width",
                              "e0_sq", "wire_width", "scan_points",
                              "acceptance_halfwidths", "grid_samples", "pad_factor"))
    if args.out:
        dataio.write_results(args.out, args.format, result, params=echo)
    if args.plot:
        dataio.emit_svg_plot(
            args.plot, [(result.positions * 1e3, result.f, "f")],
            xlabel="wire position (mm)", ylabel="photon count fraction",
            title="wire scan")
    print(f"scanned {len(result)} positions; f ranges "
          f"{result.f.min():.4f} to {result.f.max():.4f}")
    return 0


def _cmd_interference(args) -> int:
    config = _beam_config(args)
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    y = np.linspace(-config.region_width / 2.0, config.region_width / 2.0, args.points)
    intensity = optics.two_beam_intensity(config, y)
    echo = _param_echo(args, ("wavelength", "fringe_spacing", "region_width",
                              "e0_sq", "points"))
    table = dataio.Table("interference", ("y_m", "intensity"), (y, intensity))
    if args.out:
        dataio.write_results(args.out, args.format, table, params=echo)
    if args.plot:
        dataio.emit_svg_plot(
            args.plot, [(y * 1e3, intensity, "intensity")],
            xlabel="y (mm)", ylabel="intensity", title="two-beam interference")
    print(f"intensity profile over {args.points} points; peak "
          f"{intensity.max():.4f}, floor {intensity.min():.4g}")
    return 0


def _cmd_check(_args) -> int:
    """Built-in verification suite: hydrostatic balance, mass accounting,
    unitarity of the propagation, and the complementarity table."""
    checks = []

    params = gas_model.GasParameters.from_observational_units(
        DEFAULT_T_OVER_M, DEFAULT_M0, DEFAULT_R0, DEFAULT_RHO0)
    v_s = gas_model.isentropic_wave_speed(params)
    checks.append(("wave-speed", abs(v_s - 370.0) / 370.0 <= 0.01,
                   f"{v_s:.2f} km/s vs 370 km/s"))

    m_kg = units.neutrino_mass_ev_to_kg(0.5)
    checks.append(("mass-conversion", abs(m_kg - 0.89e-36) / 0.89e-36 <= 0.005,
                   f"0.5 eV/c^2 -> {m_kg:.4e} kg vs 0.89e-36 kg"))

    profile = gas_model.solve_density_profile(params)
    rng = np.random.default_rng(20240811)
    radii = np.exp(rng.uniform(np.log(profile.r[0] * 1.05),
                               np.log(profile.r[-1] * 0.95), size=10))
    worst = max(gas_model.euler_residual(profile, params, r) for r in radii)
    checks.append(("euler-residual", worst < 1e-3,
                   f"max residual {worst:.2e} at 10 random radii (limit 1e-3)"))

    m_trap = cumulative_trapezoid(profile.r, 4.0 * np.pi * profile.rho * profile.r**2)
    rel = abs(m_trap[-1] - profile.m_dm[-1]) / profile.m_dm[-1]
    checks.append(("enclosed-mass", rel <= 1e-4,
                   f"solver vs trapezoid at r_max: {rel:.2e} relative (limit 1e-4)"))

    kepler = gas_model.GasParameters(kT_over_m=params.kT_over_m, M0=DEFAULT_M0,
                                     r0=DEFAULT_R0, rho0=0.0)
    kprof = gas_model.solve_density_profile(kepler)
    kcurve = gas_model.rotation_curve(kprof, kepler)
    expect = np.sqrt(units.CONSTANTS.G_gal * DEFAULT_M0 / kprof.r)
    kerr = float(np.max(np.abs(kcurve.v - expect) / expect))
    checks.append(("keplerian-limit", kerr <= 1e-10,
                   f"no-gas curve vs closed form: {kerr:.2e} relative (limit 1e-10)"))

    config = optics.BeamConfig()
    y, dy = optics._transverse_grid(config, optics.GRID_SAMPLES, optics.GRID_PAD_FACTOR)
    field = optics._beam_field(config, y)
    freqs, amp = optics.far_field(field, dy)
    near = float(np.sum(np.abs(field) ** 2) * dy)
    far = float(np.sum(np.abs(amp) ** 2) * (freqs[1] - freqs[0]))
    prel = abs(near - far) / near
    checks.append(("parseval", prel <= 1e-9,
                   f"near vs far field power: {prel:.2e} relative (limit 1e-9)"))

    wire = optics.WireSpec(width=17e-6, center=0.0)
    f_lo = optics.detector_fraction(config, wire, samples=optics.GRID_SAMPLES)
    f_hi = optics.detector_fraction(config, wire, samples=2 * optics.GRID_SAMPLES)
    checks.append(("grid-convergence", abs(f_lo - f_hi) <= 0.005,
                   f"f at N vs 2N: |{f_lo:.5f} - {f_hi:.5f}| = {abs(f_lo - f_hi):.2e}"))

    table = [(1.0, 0.0, True), (1.0, 1.0, False), (1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0), True)]
    ok = True
    parts = []
    for v_val, k_val, want in table:
        m = optics.complementarity_check(v_val, k_val)
        ok &= m.satisfied == want
        parts.append(f"V={v_val:.3f} K={k_val:.3f} K2+V2={m.sum_sq:.3f} "
                     f"{'satisfied' if m.satisfied else 'violated'}")
    checks.append(("complementarity", ok, "; ".join(parts)))

    failures = 0
    for name, passed, detail in checks:
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
        failures += 0 if passed else 1
    print(f"{len(checks) - failures}/{len(checks)} checks passed")
    return 0 if failures == 0 else 2


_COMMANDS = {
    "rotcurve": _cmd_rotcurve,
    "fit": _cmd_fit,
    "wavespeed": _cmd_wavespeed,
    "scanwire": _cmd_scanwire,
    "interference": _cmd_interference,
    "check": _cmd_check,
}


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("run 'darkgas --help' for usage", file=sys.stderr)
        return 1
    except SystemExit as exc:
        # argparse exits directly for --help/--version
        return 0 if exc.code in (0, None) else 1

    try:
        return _COMMANDS[args.mode](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (IntegrationFailure, ConvergenceFailure, fitting.FitError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
