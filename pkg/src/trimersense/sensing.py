"""Ramsey response probabilities, Fisher information, and derived signal
statistics for single- and multi-sensor configurations.

Multi-sensor closed forms: N product-state copies respond with cos^{2N}(chi)
and reach the shot-noise Fisher information 4N (one binary readout per
copy, additive); a GHZ-entangled register responds with cos^2(N chi) and
reaches the Heisenberg value 4N^2.
"""

import math
from dataclasses import dataclass

import numpy as np

from trimersense.errors import ValidationError
from trimersense.serialize import write_csv
from trimersense.spectrum import default_pair, pair_input_state
from trimersense.tolerances import FISHER_EXTREMUM_FLOOR, STATE_NORM_ATOL

PRODUCT = "product"
GHZ = "ghz"
INPUT_MODES = (PRODUCT, GHZ)


@dataclass(frozen=True)
class SensorConfig:
    """Which sensor, which branch pair, how many copies, which input."""

    kind: str
    pair: tuple
    n: int = 1
    input_mode: str = GHZ

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("sensor count N must be >= 1")
        if self.input_mode not in INPUT_MODES:
            raise ValidationError(f"input_mode must be one of {INPUT_MODES}")


def ramsey_probability(chi):
    """Single-sensor survival cos^2(chi); the common-mode phase drops out."""
    chi = np.asarray(chi, dtype=float)
    out = np.cos(chi) ** 2
    return out if out.ndim else float(out)


def multi_sensor_probability(chi, n, mode):
    """cos^{2N}(chi) for product input, cos^2(N chi) for GHZ input."""
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ValidationError("sensor count N must be a positive integer")
    chi = np.asarray(chi, dtype=float)
    if mode == PRODUCT:
        out = np.cos(chi) ** (2 * int(n))
    elif mode == GHZ:
        out = np.cos(n * chi) ** 2
    else:
        raise ValidationError(f"input mode must be one of {INPUT_MODES}")
    return out if out.ndim else float(out)


def _check_not_extremal(chi, n, mode):
    p = multi_sensor_probability(chi, n, mode)
    if p * (1.0 - p) <= FISHER_EXTREMUM_FLOOR:
        raise ValidationError(
            f"Fisher information undefined at a fringe extremum (chi={chi})"
        )


def fisher_information(chi, n=1, mode=GHZ):
    """Fisher information of the phase estimate.

    GHZ readout: (d_chi P)^2 / (P(1-P)) with P = cos^2(N chi) simplifies to
    the constant 4N^2 (Heisenberg scaling).  Product input with per-copy
    readout is additive: N times the single-sensor value, 4N (shot noise).
    Rejected at fringe extrema where the quotient degenerates to 0/0.
    """
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ValidationError("sensor count N must be a positive integer")
    if mode == GHZ:
        _check_not_extremal(chi, n, GHZ)
        return 4.0 * n * n
    if mode == PRODUCT:
        _check_not_extremal(chi, 1, GHZ)
        return 4.0 * n
    raise ValidationError(f"input mode must be one of {INPUT_MODES}")


def fisher_information_fd(chi, n=1, mode=GHZ, step=1e-5):
    """Finite-difference check of fisher_information (validation only)."""

    def classical(c, nn):
        p = multi_sensor_probability(c, nn, GHZ)
        dp = (multi_sensor_probability(c + step, nn, GHZ)
              - multi_sensor_probability(c - step, nn, GHZ)) / (2 * step)
        return dp * dp / (p * (1.0 - p))

    if mode == GHZ:
        _check_not_extremal(chi, n, GHZ)
        return classical(chi, n)
    _check_not_extremal(chi, 1, GHZ)
    return n * classical(chi, 1)


def qcrb(n):
    """Quantum Cramer-Rao bound on the phase variance: 1/(4 N^2)."""
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise ValidationError("sensor count N must be a positive integer")
    return 1.0 / (4.0 * n * n)


def variance_from_sensors(first_moment, second_moment):
    """Var[b] = integral b^2 - |integral b|^2 from two sensor readings.

    Returned raw: the two moments are time integrals, so the result is not
    sign-guaranteed unless both come from the same window.
    """
    if second_moment < 0:
        raise ValidationError("second moment must be non-negative")
    return second_moment - abs(first_moment) ** 2


def survival_probability(u, phi0):
    """|<phi0| U |phi0>|^2."""
    u = np.asarray(u, dtype=complex)
    phi0 = np.asarray(phi0, dtype=complex).ravel()
    if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] != phi0.shape[0]:
        raise ValidationError(
            f"dimension mismatch: U {u.shape} vs state {phi0.shape}"
        )
    if abs(np.linalg.norm(phi0) - 1.0) > STATE_NORM_ATOL:
        raise ValidationError("state must be normalized")
    p = abs(np.vdot(phi0, u @ phi0)) ** 2
    return min(max(p, 0.0), 1.0)


def canonical_input_state(model, pair=None):
    """The Ramsey input state Psi0 (e_p + e_q)/sqrt(2) for a model.

    For the trimer mousetrap this is the entangled three-qubit state with
    equal weight on the two upper-critical-point branches (4 and 6); its
    coordinates in the zero-field eigenbasis are exactly (e4 + e6)/sqrt2.
    """
    return pair_input_state(model, pair)


def extract_phase(probabilities, reference_sign=-1.0):
    """Invert P = cos^2(chi) along a curve by arccos continuation.

    Branch jumps are resolved by continuity from the first point; the
    overall sign is not observable, ``reference_sign`` picks it.
    """
    p = np.clip(np.asarray(probabilities, dtype=float), 0.0, 1.0)
    base = np.arccos(np.sqrt(p))  # in [0, pi/2]
    out = np.empty_like(base)
    prev = 0.0
    for i, raw in enumerate(base):
        k = math.floor(prev / math.pi + 0.5)
        candidates = (k * math.pi + raw, k * math.pi - raw,
                      (k + 1) * math.pi - raw, (k - 1) * math.pi + raw)
        out[i] = min(candidates, key=lambda c: abs(c - prev))
        prev = out[i]
    return reference_sign * out


@dataclass
class ResponseCurve:
    """Probability (and phase) as a function of one swept quantity."""

    abscissa_name: str
    abscissa: np.ndarray
    probabilities: np.ndarray
    phases: np.ndarray
    metadata: dict

    def __post_init__(self):
        p = np.asarray(self.probabilities)
        if p.size and (p.min() < -1e-12 or p.max() > 1.0 + 1e-12):
            raise ValidationError("probabilities out of [0, 1]")

    def to_csv(self, path):
        rows = np.column_stack([self.abscissa, self.probabilities, self.phases])
        write_csv(path, [self.abscissa_name, "p", "chi"], rows, self.metadata)
