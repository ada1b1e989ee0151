"""Classical drive b(t): analytic waveforms, tabulated samples, quadrature.

The canonical signal is the Gaussian-enveloped sinusoid
b(t) = eps * exp(-t^2/s) * sin(2 pi k t); the "fig2" preset pins the
constants (k = 0.05, s = 20, window [-15, 15]) used throughout the
reproduction runs.  At the window ends the envelope is exp(-11.25) ~ 1.3e-5,
small but not exactly zero; we treat the signal as effectively off there.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from trimersense.errors import NumericalError, ValidationError
from trimersense.tolerances import (
    DIRECTION_NORM_ATOL,
    QUADRATURE_ATOL,
    QUADRATURE_MAX_INTERVALS,
)

PRESETS = {
    "fig2": {"s": 20.0, "k": 0.05, "window": (-15.0, 15.0)},
}


def _unit_direction(direction):
    if direction is None:
        return None
    d = np.asarray(direction, dtype=float)
    if d.shape != (3,):
        raise ValidationError("direction must be a 3-vector")
    if abs(np.linalg.norm(d) - 1.0) > DIRECTION_NORM_ATOL:
        raise ValidationError(f"direction must be unit norm, got |d|={np.linalg.norm(d)}")
    return tuple(d)


@dataclass(frozen=True, eq=False)
class Waveform:
    """Scalar envelope b(t) times a unit direction vector.

    Construct through the classmethods; ``kind`` is one of "gaussian-sine",
    "constant", "samples".
    """

    kind: str
    window: tuple
    direction: tuple = None
    epsilon: float = 0.0
    s: float = math.inf
    k: float = 0.0
    value: float = 0.0
    times: np.ndarray = field(default=None, repr=False)
    values: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        t0, t1 = self.window
        if not (np.isfinite(t0) and np.isfinite(t1) and t0 < t1):
            raise ValidationError(f"window must satisfy t0 < t1, got {self.window}")
        object.__setattr__(self, "direction", _unit_direction(self.direction))

    # -- constructors --------------------------------------------------------

    @classmethod
    def gaussian_sine(cls, epsilon, s, k, window, direction=None):
        if not (s > 0):
            raise ValidationError("envelope width s must be positive")
        return cls(kind="gaussian-sine", window=tuple(window), direction=direction,
                   epsilon=float(epsilon), s=float(s), k=float(k))

    @classmethod
    def constant(cls, value, window, direction=None):
        return cls(kind="constant", window=tuple(window), direction=direction,
                   value=float(value))

    @classmethod
    def from_samples(cls, times, values, direction=None):
        t = np.asarray(times, dtype=float)
        v = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or len(t) < 2:
            raise ValidationError("samples need matching 1-d times/values, >= 2 points")
        if np.any(np.diff(t) <= 0):
            raise ValidationError("sample times must be strictly increasing")
        return cls(kind="samples", window=(float(t[0]), float(t[-1])),
                   direction=direction, times=t, values=v)

    @classmethod
    def from_csv(cls, path, direction=None):
        """Two-column CSV: time, value."""
        data = np.loadtxt(path, delimiter=",", ndmin=2)
        if data.shape[1] != 2:
            raise ValidationError(f"{path}: expected two columns (time, value)")
        return cls.from_samples(data[:, 0], data[:, 1], direction=direction)

    # -- evaluation ------------------------------------------------------------

    def evaluate(self, t):
        """b(t); linear interpolation for sampled signals."""
        t = np.asarray(t, dtype=float)
        if self.kind == "gaussian-sine":
            out = self.epsilon * np.exp(-t * t / self.s) * np.sin(2 * np.pi * self.k * t)
        elif self.kind == "constant":
            out = np.full_like(t, self.value, dtype=float)
        else:
            if np.any(t < self.times[0]) or np.any(t > self.times[-1]):
                raise ValidationError("evaluation time outside the sampled range")
            out = np.interp(t, self.times, self.values)
        return out if out.ndim else float(out)

    __call__ = evaluate

    def derivative(self, t, order=1):
        """Analytic b'(t) or b''(t); central differences for samples."""
        if order not in (1, 2):
            raise ValidationError("derivative order must be 1 or 2")
        t = np.asarray(t, dtype=float)
        if self.kind == "gaussian-sine":
            w = 2 * np.pi * self.k
            g = self.epsilon * np.exp(-t * t / self.s)
            sn, cs = np.sin(w * t), np.cos(w * t)
            if order == 1:
                out = g * (w * cs - (2 * t / self.s) * sn)
            else:
                out = g * (-(4 * t * w / self.s) * cs
                           + (4 * t * t / self.s ** 2 - w * w - 2 / self.s) * sn)
        elif self.kind == "constant":
            out = np.zeros_like(t)
        else:
            h = np.interp(t, self.times[:-1], np.diff(self.times))
            lo, hi = self.times[0], self.times[-1]
            tp = np.clip(t + h, lo, hi)
            tm = np.clip(t - h, lo, hi)
            if order == 1:
                out = (self.evaluate(tp) - self.evaluate(tm)) / (tp - tm)
            else:
                out = (self.evaluate(tp) - 2 * self.evaluate(np.clip(t, lo, hi))
                       + self.evaluate(tm)) / ((tp - tm) / 2) ** 2
        return out if out.ndim else float(out)

    # -- transforms ------------------------------------------------------------

    def scaled(self, factor):
        """Same waveform with the amplitude multiplied by ``factor``."""
        if self.kind == "gaussian-sine":
            return Waveform.gaussian_sine(self.epsilon * factor, self.s, self.k,
                                          self.window, self.direction)
        if self.kind == "constant":
            return Waveform.constant(self.value * factor, self.window, self.direction)
        return Waveform.from_samples(self.times, self.values * factor, self.direction)

    def with_direction(self, direction):
        if self.kind == "samples":
            return Waveform.from_samples(self.times, self.values, direction)
        if self.kind == "constant":
            return Waveform.constant(self.value, self.window, direction)
        return Waveform.gaussian_sine(self.epsilon, self.s, self.k,
                                      self.window, direction)


@dataclass(frozen=True)
class PhysicalUnits:
    """Physical-units description: bare coupling scale alpha and field beta(t)."""

    alpha: float
    beta: Waveform


def nondimensionalize(units):
    """Rescale to the dimensionless frame: b(t') = beta(t'/alpha)/alpha,
    window t' = alpha*t.  Closed under the waveform family."""
    a = units.alpha
    if not (a > 0):
        raise ValidationError("alpha must be positive")
    w = units.beta
    t0, t1 = w.window
    win = (a * t0, a * t1)
    if w.kind == "gaussian-sine":
        return Waveform.gaussian_sine(w.epsilon / a, w.s * a * a, w.k / a,
                                      win, w.direction)
    if w.kind == "constant":
        return Waveform.constant(w.value / a, win, w.direction)
    return Waveform.from_samples(w.times * a, w.values / a, w.direction)


def adaptive_simpson(f, a, b, tol=QUADRATURE_ATOL, max_intervals=QUADRATURE_MAX_INTERVALS):
    """Composite Simpson with interval halving and Richardson stop test.

    ``f`` must accept a vector of abscissas.  Raises on non-convergence with
    the achieved error estimate in the message.
    """
    if not (np.isfinite(a) and np.isfinite(b) and a < b):
        raise ValidationError(f"bad integration window ({a}, {b})")

    def composite(n):
        t = np.linspace(a, b, n + 1)
        y = np.asarray(f(t), dtype=float)
        h = (b - a) / n
        return h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())

    n = 64
    prev = composite(n)
    while n <= max_intervals:
        n *= 2
        cur = composite(n)
        est = (cur - prev) / 15.0
        if abs(est) < tol:
            return cur + est
        prev = cur
    raise NumericalError(
        f"quadrature did not reach tol={tol:.1e} within {max_intervals} "
        f"intervals (last error estimate {abs(est):.3e})"
    )


def integrate_moment(waveform, power, window=None, tol=QUADRATURE_ATOL):
    """f_i = integral of b(t)^power over the window."""
    if not (isinstance(power, (int, np.integer)) and power >= 1):
        raise ValidationError("power must be a positive integer")
    a, b = window if window is not None else waveform.window
    return adaptive_simpson(lambda t: waveform.evaluate(t) ** power, a, b, tol=tol)


def preset_waveform(name, epsilon, direction=None):
    """Named signal presets addressable from config files and the CLI."""
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    p = PRESETS[name]
    return Waveform.gaussian_sine(epsilon, p["s"], p["k"], p["window"], direction)
