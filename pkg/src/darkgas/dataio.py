"""Data ingestion and result serialization.

CSV input format for observed rotation curves:

    r_kpc,v_kms,sigma_kms
    10.0,210.0,5.0
    ...

The sigma column is optional; missing uncertainties default to 5 km/s.
Lines starting with '#' are skipped.  Output CSV and JSON are byte-stable
for identical inputs, and the SVG writer embeds no external assets.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fitting import FitResult, ObservedCurve
from .gas_model import DensityProfile, RotationCurve
from .optics import ComplementarityMetrics, WireScanResult

__all__ = [
    "DEFAULT_SIGMA_KMS",
    "Table",
    "load_observed_csv",
    "write_results",
    "emit_svg_plot",
]

DEFAULT_SIGMA_KMS = 5.0

JSON_SCHEMA_VERSION = 1

_HEADER_FULL = ["r_kpc", "v_kms", "sigma_kms"]
_HEADER_SHORT = ["r_kpc", "v_kms"]


@dataclass(frozen=True)
class Table:
    """Generic column-oriented payload for modes without a dedicated type."""

    kind: str
    columns: tuple
    values: tuple  # one array per column


def load_observed_csv(path) -> ObservedCurve:
    """Read an observed rotation curve from a CSV file.

    Requires the header ``r_kpc,v_kms[,sigma_kms]``.  Rows are sorted by
    radius; duplicate radii and malformed rows raise ``ValueError`` with
    the offending line number.
    """
    rows = []
    header_seen = False
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            cells = [c.strip() for c in line.split(",")]
            if not header_seen:
                if cells == _HEADER_FULL or cells == _HEADER_SHORT:
                    header_seen = True
                    continue
                raise ValueError(
                    f"{path}: line {lineno}: expected header "
                    f"'r_kpc,v_kms[,sigma_kms]', got {line!r}")
            if len(cells) not in (2, 3):
                raise ValueError(f"{path}: line {lineno}: expected 2 or 3 columns")
            try:
                r = float(cells[0])
                v = float(cells[1])
                sigma = float(cells[2]) if len(cells) == 3 else DEFAULT_SIGMA_KMS
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: non-numeric value") from None
            rows.append((lineno, r, v, sigma))

    if not header_seen:
        raise ValueError(f"{path}: empty file (missing header)")
    if not rows:
        raise ValueError(f"{path}: no data rows")

    rows.sort(key=lambda t: t[1])
    for (ln_a, r_a, *_), (ln_b, r_b, *_) in zip(rows, rows[1:]):
        if r_a == r_b:
            raise ValueError(
                f"{path}: duplicate radius {r_a:g} kpc (lines {ln_a} and {ln_b})")
    return ObservedCurve(
        r=np.array([t[1] for t in rows]),
        v=np.array([t[2] for t in rows]),
        sigma_v=np.array([t[3] for t in rows]),
    )


def _fmt(x) -> str:
    # repr of a Python float is the shortest round-trip form, which keeps
    # outputs byte-stable across runs.
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _payload_table(payload) -> Table:
    if isinstance(payload, Table):
        return payload
    if isinstance(payload, tuple) and len(payload) == 2 \
            and isinstance(payload[0], DensityProfile) and isinstance(payload[1], RotationCurve):
        profile, curve = payload
        if profile.r.size != curve.r.size or np.any(profile.r != curve.r):
            raise ValueError("profile and curve grids differ")
        return Table("rotation_model",
                     ("r_kpc", "rho_msun_kpc3", "menc_msun", "v_kms"),
                     (profile.r, profile.rho, profile.m_dm, curve.v))
    if isinstance(payload, DensityProfile):
        return Table("density_profile",
                     ("r_kpc", "rho_msun_kpc3", "menc_msun"),
                     (payload.r, payload.rho, payload.m_dm))
    if isinstance(payload, RotationCurve):
        return Table("rotation_curve", ("r_kpc", "v_kms"), (payload.r, payload.v))
    if isinstance(payload, ObservedCurve):
        return Table("observed_curve", ("r_kpc", "v_kms", "sigma_kms"),
                     (payload.r, payload.v, payload.sigma_v))
    if isinstance(payload, WireScanResult):
        return Table("wire_scan", ("pos_m", "f"), (payload.positions, payload.f))
    if isinstance(payload, FitResult):
        return Table("fit_result",
                     ("t_over_m_best", "chi2", "reduced_chi2", "evaluations",
                      "bracket_lo", "bracket_hi", "boundary_hit"),
                     ([payload.t_over_m_best], [payload.chi2], [payload.reduced_chi2],
                      [payload.evaluations], [payload.bracket[0]], [payload.bracket[1]],
                      [payload.boundary_hit]))
    if isinstance(payload, ComplementarityMetrics):
        return Table("complementarity",
                     ("visibility", "which_way", "sum_sq", "satisfied"),
                     ([payload.V], [payload.K], [payload.sum_sq], [payload.satisfied]))
    raise TypeError(f"unsupported payload type: {type(payload).__name__}")


def write_results(path, format: str, payload, params: dict | None = None) -> None:
    """Serialize a result payload to ``path`` as CSV or JSON.

    Accepted payloads: a (DensityProfile, RotationCurve) pair, either of
    those alone, WireScanResult, FitResult, ComplementarityMetrics, or a
    pre-built Table.  JSON output carries a schema version and an echo of
    the run parameters.
    """
    table = _payload_table(payload)
    if format == "csv":
        lines = [",".join(table.columns)]
        n = len(table.values[0])
        for i in range(n):
            lines.append(",".join(_fmt(col[i]) for col in table.values))
        text = "\n".join(lines) + "\n"
    elif format == "json":
        def clean(col):
            return [bool(x) if isinstance(x, (bool, np.bool_)) else
                    int(x) if isinstance(x, (int, np.integer)) else float(x)
                    for x in col]
        doc = {
            "schema_version": JSON_SCHEMA_VERSION,
            "kind": table.kind,
            "parameters": params or {},
            "data": {name: clean(col) for name, col in zip(table.columns, table.values)},
        }
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        raise ValueError(f"unknown output format: {format!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# SVG plotting

_SVG_W, _SVG_H = 760, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 72, 170, 28, 52
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _nice_ticks(lo: float, hi: float, target: int = 6):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        step = mult * mag
        if span / step <= target:
            break
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-9 * span:
        ticks.append(0.0 if abs(t) < 1e-12 * span else t)
        t += step
    return ticks


def _log_ticks(lo: float, hi: float):
    lo_d = math.floor(math.log10(lo))
    hi_d = math.ceil(math.log10(hi))
    return [10.0 ** d for d in range(lo_d, hi_d + 1) if lo <= 10.0 ** d <= hi]


def _tick_label(value: float, logscale: bool) -> str:
    if logscale:
        exp = math.log10(value)
        if abs(exp - round(exp)) < 1e-9 and abs(exp) > 3:
            return f"1e{int(round(exp))}"
    if value == int(value) and abs(value) < 1e7:
        return str(int(value))
    return f"{value:.4g}"


def emit_svg_plot(path, series, *, xlabel: str = "", ylabel: str = "",
                  xscale: str = "linear", yscale: str = "linear",
                  title: str = "") -> None:
    """Write a standalone SVG line plot.

    ``series`` is a list of (x, y, label) triples.  Non-finite points (and
    non-positive ones on a log axis) are dropped with a warning counting
    them.  Raises ``ValueError`` if no series contains a plottable point.
    """
    if xscale not in ("linear", "log") or yscale not in ("linear", "log"):
        raise ValueError("axis scales must be 'linear' or 'log'")
    series = list(series)
    if not series:
        raise ValueError("need at least one series")

    cleaned = []
    skipped = 0
    for xs, ys, label in series:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        keep = np.isfinite(xs) & np.isfinite(ys)
        if xscale == "log":
            keep &= xs > 0.0
        if yscale == "log":
            keep &= ys > 0.0
        skipped += int(xs.size - np.count_nonzero(keep))
        cleaned.append((xs[keep], ys[keep], str(label)))
    if skipped:
        warnings.warn(f"emit_svg_plot: skipped {skipped} non-plottable points",
                      RuntimeWarning, stacklevel=2)
    if all(xs.size == 0 for xs, _, _ in cleaned):
        raise ValueError("no plottable points in any series")

    def bounds(idx):
        vals = np.concatenate([s[idx] for s in cleaned if s[idx].size])
        lo, hi = float(np.min(vals)), float(np.max(vals))
        if lo == hi:
            pad = abs(lo) * 0.5 or 1.0
            lo, hi = lo - pad, hi + pad
        return lo, hi

    x_lo, x_hi = bounds(0)
    y_lo, y_hi = bounds(1)

    def to_px(v, lo, hi, logscale, p0, p1):
        if logscale:
            frac = (math.log10(v) - math.log10(lo)) / (math.log10(hi) - math.log10(lo))
        else:
            frac = (v - lo) / (hi - lo)
        return p0 + frac * (p1 - p0)

    px0, px1 = _MARGIN_L, _SVG_W - _MARGIN_R
    py0, py1 = _SVG_H - _MARGIN_B, _MARGIN_T

    out = []
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" '
               f'height="{_SVG_H}" viewBox="0 0 {_SVG_W} {_SVG_H}">')
    out.append(f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>')
    if title:
        out.append(f'<text x="{(px0 + px1) / 2:.1f}" y="18" font-size="14" '
                   f'text-anchor="middle" font-family="sans-serif">{title}</text>')

    # axes box
    out.append(f'<rect x="{px0}" y="{py1}" width="{px1 - px0}" height="{py0 - py1}" '
               'fill="none" stroke="black" stroke-width="1"/>')

    x_ticks = _log_ticks(x_lo, x_hi) if xscale == "log" else _nice_ticks(x_lo, x_hi)
    y_ticks = _log_ticks(y_lo, y_hi) if yscale == "log" else _nice_ticks(y_lo, y_hi)
    for t in x_ticks:
        px = to_px(t, x_lo, x_hi, xscale == "log", px0, px1)
        out.append(f'<line x1="{px:.2f}" y1="{py0}" x2="{px:.2f}" y2="{py0 + 5}" '
                   'stroke="black" stroke-width="1"/>')
        out.append(f'<text x="{px:.2f}" y="{py0 + 18}" font-size="11" '
                   f'text-anchor="middle" font-family="sans-serif">'
                   f'{_tick_label(t, xscale == "log")}</text>')
    for t in y_ticks:
        py = to_px(t, y_lo, y_hi, yscale == "log", py0, py1)
        out.append(f'<line x1="{px0 - 5}" y1="{py:.2f}" x2="{px0}" y2="{py:.2f}" '
                   'stroke="black" stroke-width="1"/>')
        out.append(f'<text x="{px0 - 8}" y="{py + 4:.2f}" font-size="11" '
                   f'text-anchor="end" font-family="sans-serif">'
                   f'{_tick_label(t, yscale == "log")}</text>')
    if xlabel:
        out.append(f'<text x="{(px0 + px1) / 2:.1f}" y="{_SVG_H - 12}" font-size="12" '
                   f'text-anchor="middle" font-family="sans-serif">{xlabel}</text>')
    if ylabel:
        cx, cy = 18, (py0 + py1) / 2
        out.append(f'<text x="{cx}" y="{cy:.1f}" font-size="12" text-anchor="middle" '
                   f'font-family="sans-serif" transform="rotate(-90 {cx} {cy:.1f})">'
                   f'{ylabel}</text>')

    legend_x = px1 + 12
    legend_y = py1 + 10
    for idx, (xs, ys, label) in enumerate(cleaned):
        color = _PALETTE[idx % len(_PALETTE)]
        if xs.size:
            pts = " ".join(
                f"{to_px(x, x_lo, x_hi, xscale == 'log', px0, px1):.2f},"
                f"{to_px(v, y_lo, y_hi, yscale == 'log', py0, py1):.2f}"
                for x, v in zip(xs, ys))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                       'stroke-width="1.5"/>')
        ly = legend_y + 18 * idx
        out.append(f'<line x1="{legend_x}" y1="{ly}" x2="{legend_x + 22}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{legend_x + 28}" y="{ly + 4}" font-size="11" '
                   f'font-family="sans-serif">{label}</text>')

    out.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
