"""Generic numerical kernels used by every physics module.

Three primitives live here: an embedded adaptive Runge-Kutta initial value
solver, a cumulative trapezoid rule, and a bracketed scalar minimizer.  All
of them are pure functions of their arguments and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "Trajectory",
    "IntegrationFailure",
    "ConvergenceFailure",
    "MinimizeResult",
    "integrate_ivp",
    "cumulative_trapezoid",
    "minimize_scalar",
    "MAX_IVP_STEPS",
    "MAX_MINIMIZE_EVALS",
]

# Hard iteration caps: fail loudly instead of hanging.
MAX_IVP_STEPS = 1_000_000
MAX_MINIMIZE_EVALS = 200


class IntegrationFailure(RuntimeError):
    """Adaptive stepping could not reach the end of the span.

    ``last_x`` is the last abscissa that was reached with controlled error;
    ``trajectory`` holds the partial solution up to that point.
    """

    def __init__(self, message: str, last_x: float, trajectory: "Trajectory | None" = None):
        super().__init__(message)
        self.last_x = last_x
        self.trajectory = trajectory


class ConvergenceFailure(RuntimeError):
    """Minimizer hit its evaluation cap before shrinking the bracket.

    Carries the best point seen so far in ``best_x`` / ``best_f``.
    """

    def __init__(self, message: str, best_x: float, best_f: float, evaluations: int):
        super().__init__(message)
        self.best_x = best_x
        self.best_f = best_f
        self.evaluations = evaluations


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of an initial value problem.

    ``abscissae`` is strictly increasing and ``states[i]`` is the state
    vector at ``abscissae[i]``.  Values between samples are defined by
    linear interpolation, which is what :meth:`interpolate` returns.
    """

    abscissae: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.abscissae, dtype=float)
        ys = np.asarray(self.states, dtype=float)
        if ys.ndim == 1:
            ys = ys[:, np.newaxis]
        if xs.ndim != 1 or xs.size < 1:
            raise ValueError("abscissae must be a non-empty 1-d sequence")
        if ys.shape[0] != xs.shape[0]:
            raise ValueError("states and abscissae must have the same length")
        if xs.size > 1 and np.any(np.diff(xs) <= 0.0):
            raise ValueError("abscissae must be strictly increasing")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
            raise ValueError("trajectory samples must be finite")
        object.__setattr__(self, "abscissae", xs)
        object.__setattr__(self, "states", ys)

    def __len__(self) -> int:
        return int(self.abscissae.size)

    def interpolate(self, x):
        """Piecewise-linear state at ``x`` (scalar or array).

        Exact at the stored samples.  Raises ``ValueError`` outside the
        sampled range.
        """
        xq = np.asarray(x, dtype=float)
        if np.any(xq < self.abscissae[0]) or np.any(xq > self.abscissae[-1]):
            raise ValueError("interpolation point outside the sampled range")
        cols = [np.interp(xq, self.abscissae, self.states[:, j])
                for j in range(self.states.shape[1])]
        return np.stack(cols, axis=-1)


# Fehlberg 4(5) tableau.  The fifth order combination is propagated; the
# difference to the embedded fourth order result drives the step control.
_C = (0.0, 1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 1.0 / 2.0)
_A = (
    (),
    (1.0 / 4.0,),
    (3.0 / 32.0, 9.0 / 32.0),
    (1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0),
    (439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0),
    (-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0),
)
_B5 = (16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0)
_B4 = (25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0)
_ERR = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0


def _call_rhs(rhs: Callable, x: float, y: np.ndarray) -> np.ndarray:
    out = np.asarray(rhs(x, y), dtype=float)
    if out.shape != y.shape:
        raise ValueError("rhs returned a vector of the wrong length")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"rhs returned a non-finite derivative at x={x!r}")
    return out


def integrate_ivp(
    rhs: Callable,
    y0,
    span,
    rel_tol: float = 1e-8,
    abs_tol: float = 1e-10,
    max_step: float | None = None,
    knots: Sequence[float] | None = None,
) -> Trajectory:
    """Integrate ``y' = rhs(x, y)`` from ``span[0]`` to ``span[1]``.

    Local error per step is kept below ``abs_tol + rel_tol * |y|``
    component-wise.  Both span endpoints appear in the returned trajectory;
    abscissae listed in ``knots`` are landed on exactly, so their states are
    solver-accurate rather than interpolated.

    Raises ``ValueError`` for bad arguments or a non-finite derivative, and
    :class:`IntegrationFailure` when the step size underflows or the step
    budget is exhausted.
    """
    a, b = float(span[0]), float(span[1])
    if not a < b:
        raise ValueError("span must satisfy a < b")
    if rel_tol <= 0.0 or abs_tol <= 0.0:
        raise ValueError("tolerances must be positive")
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    if y.ndim != 1:
        raise ValueError("y0 must be a scalar or 1-d state vector")
    if not np.all(np.isfinite(y)):
        raise ValueError("y0 must be finite")
    if max_step is None:
        max_step = b - a
    if max_step <= 0.0:
        raise ValueError("max_step must be positive")

    # Targets every step is clamped to: interior knots, then the endpoint.
    if knots is not None:
        kn = np.unique(np.asarray(knots, dtype=float))
        kn = kn[(kn > a) & (kn < b)]
        targets = np.append(kn, b)
    else:
        targets = np.array([b])

    xs = [a]
    ys = [y.copy()]
    x = a
    target_idx = 0
    h_prop = min(max_step, (b - a) / 100.0, targets[0] - a)
    k1: np.ndarray | None = None
    k = [np.empty_like(y) for _ in range(6)]
    steps = 0

    while x < b:
        steps += 1
        if steps > MAX_IVP_STEPS:
            raise IntegrationFailure(
                f"step budget of {MAX_IVP_STEPS} exhausted at x={x!r}",
                x, Trajectory(np.array(xs), np.array(ys)))

        target = targets[target_idx]
        h = min(h_prop, max_step, target - x)
        clamped = h < h_prop
        if h <= 16.0 * np.finfo(float).eps * max(abs(x), abs(b - a)):
            raise IntegrationFailure(
                f"step size underflow at x={x!r}",
                x, Trajectory(np.array(xs), np.array(ys)))

        if k1 is None:
            k1 = _call_rhs(rhs, x, y)
        k[0] = k1
        for i in range(1, 6):
            yi = y.copy()
            for j, aij in enumerate(_A[i]):
                yi += (h * aij) * k[j]
            k[i] = _call_rhs(rhs, x + _C[i] * h, yi)

        y_new = y.copy()
        err = np.zeros_like(y)
        for i in range(6):
            if _B5[i] != 0.0:
                y_new += (h * _B5[i]) * k[i]
            if _ERR[i] != 0.0:
                err += (h * _ERR[i]) * k[i]

        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))
        if not math.isfinite(err_norm):
            err_norm = math.inf

        if err_norm <= 1.0:
            x = target if h >= target - x else x + h
            y = y_new
            xs.append(x)
            ys.append(y.copy())
            k1 = None
            if x >= target:
                target_idx = min(target_idx + 1, len(targets) - 1)
            if err_norm == 0.0:
                factor = _MAX_FACTOR
            else:
                factor = min(_MAX_FACTOR, max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2))
            grown = h * factor
            # A knot-clamped step must not throttle the controller.
            h_prop = max(grown, h_prop) if clamped else grown
        else:
            h_prop = h * max(_MIN_FACTOR, _SAFETY * err_norm ** -0.2)

    return Trajectory(np.array(xs), np.array(ys))


def cumulative_trapezoid(xs, ys) -> np.ndarray:
    """Running trapezoid-rule integral of ``ys`` over ``xs``.

    Element ``i`` approximates the integral from ``xs[0]`` to ``xs[i]``;
    element 0 is exactly 0.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise ValueError("xs and ys must be 1-d")
    if x.size != y.size:
        raise ValueError("xs and ys must have the same length")
    if x.size < 2:
        raise ValueError("need at least two samples")
    dx = np.diff(x)
    if np.any(dx <= 0.0):
        raise ValueError("xs must be strictly increasing")
    areas = 0.5 * (y[1:] + y[:-1]) * dx
    out = np.empty_like(x)
    out[0] = 0.0
    np.cumsum(areas, out=out[1:])
    return out


class MinimizeResult(NamedTuple):
    x: float
    fun: float
    evaluations: int


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def minimize_scalar(f: Callable[[float], float], bracket, tol: float = 1e-8,
                    max_evals: int = MAX_MINIMIZE_EVALS) -> MinimizeResult:
    """Golden-section search for a minimum of ``f`` on ``[lo, hi]``.

    Returns the best sampled point once the bracket has shrunk below
    ``tol``.  The bracket edges are evaluated too, so the result is never
    worse than either edge.  A non-finite objective value raises
    ``ValueError``; exceeding ``max_evals`` raises
    :class:`ConvergenceFailure` carrying the best point seen.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")
    if tol <= 0.0:
        raise ValueError("tol must be positive")

    evals = 0
    best_x = lo
    best_f = math.inf

    def call(xq: float) -> float:
        nonlocal evals, best_x, best_f
        if evals >= max_evals:
            raise ConvergenceFailure(
                f"evaluation cap of {max_evals} reached", best_x, best_f, evals)
        v = float(f(xq))
        evals += 1
        if not math.isfinite(v):
            raise ValueError(f"objective returned a non-finite value at x={xq!r}")
        if v < best_f:
            best_x, best_f = xq, v
        return v

    call(lo)
    call(hi)
    a, d = lo, hi
    b = d - _INVPHI * (d - a)
    c = a + _INVPHI * (d - a)
    fb = call(b)
    fc = call(c)
    while (d - a) > tol:
        if fb <= fc:
            d, c, fc = c, b, fb
            b = d - _INVPHI * (d - a)
            fb = call(b)
        else:
            a, b, fb = b, c, fc
            c = a + _INVPHI * (d - a)
            fc = call(c)
    return MinimizeResult(best_x, best_f, evals)
