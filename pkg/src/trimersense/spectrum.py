"""Closed-form spectra and accumulated Ramsey phases.

Trimer eigenvalues for a z-axis field, in the branch order used everywhere
in this package (index j = 1..8):

    lam_1..4 = -p-s, -p+s, p-s, p+s        (linear branches)
    lam_5..8 = -p-q, -p+q, p-r, p+r        (nonlinear branches)

with p = b, s = sqrt(3), q = sqrt(3-4b+4b^2), r = sqrt(3+4b+4b^2).  The
zero-field eigenbasis PSI0 collects the b -> 0+ limits of the branch
eigenvectors; its columns are pinned by that limit (up to the global phase
convention), not merely by being *some* eigenbasis of the degenerate point.
The matrix is transcribed from closed forms and validated numerically at
first use.
"""

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from trimersense import model as model_mod
from trimersense.errors import NumericalError, ValidationError
from trimersense.signal import adaptive_simpson, integrate_moment
from trimersense.tolerances import (
    PSI0_ORTHONORMAL_ATOL,
    PSI0_RESIDUAL_ATOL,
    QUADRATURE_ATOL,
)

S3 = math.sqrt(3.0)

# Column normalization constants of the zero-field eigenbasis.  Two families:
# the "wide" amplitudes pair with weight (sqrt3 - 1), the "narrow" ones with
# (sqrt3 + 1); note 6 -+ 2*sqrt3 = 2 + (sqrt3 -+ 1)^2.
LIN_A = 1.0 / math.sqrt(6.0 - 2.0 * S3)
LIN_B = (S3 - 1.0) * LIN_A
CURV_A = 1.0 / math.sqrt(6.0 + 2.0 * S3)
CURV_B = (S3 + 1.0) * CURV_A


@dataclass(frozen=True)
class EigenPair:
    """Pair of 1-based branch indices whose splitting drives the Ramsey phase."""

    p: int
    q: int

    def __post_init__(self):
        if self.p == self.q:
            raise ValidationError("eigenpair indices must differ")


MOUSETRAP_PAIR = EigenPair(4, 6)
# Orientation (8,6) keeps chi_exact equal to the expanded series below; the
# response cos^2(chi) does not care about the sign of chi.
SKEW_PAIR = EigenPair(8, 6)

# Accumulated-phase series: chi ~ sum_i coeff[i] * integral b^i dt.  The
# mousetrap rectifies the second moment, the skew pair the third.
SERIES_COEFFICIENTS = {
    (4, 6): {1: 1.0 + 1.0 / S3, 2: -2.0 / (3.0 * S3)},
    (8, 6): {1: 1.0 + 2.0 / S3, 3: -8.0 / (9.0 * S3)},
}


def trimer_eigenvalues_z(b):
    """All eight branch eigenvalues at field amplitude b (z axis), in branch
    order.  Vectorized: scalar b -> shape (8,), array b -> (8, len(b))."""
    b = np.asarray(b, dtype=float)
    q = np.sqrt(3.0 - 4.0 * b + 4.0 * b * b)
    r = np.sqrt(3.0 + 4.0 * b + 4.0 * b * b)
    return np.stack([-b - S3, -b + S3, b - S3, b + S3,
                     -b - q, -b + q, b - r, b + r])


def branch_eigenvalues(kind, b):
    """Closed-form branch eigenvalues for any sensor kind (canonical axis)."""
    b = np.asarray(b, dtype=float)
    if kind == "trimer":
        return trimer_eigenvalues_z(b)
    if kind == "standard":
        return np.stack([-b, b])
    if kind == "landau-zener":
        lam = np.sqrt(1.0 + b * b)
        return np.stack([-lam, lam])
    if kind == "dimer":
        lam = np.sqrt(1.0 + 4.0 * b * b)
        one = np.ones_like(b)
        return np.stack([-one, one, -lam, lam])
    raise ValidationError(f"unknown model kind {kind!r}")


def table_sensor_eigenvalues(kind, b):
    """Eigenvalues of the small sensors (standard, landau-zener, dimer)."""
    if kind not in ("standard", "landau-zener", "dimer"):
        raise ValidationError(f"no small-sensor eigenvalue table for {kind!r}")
    return branch_eigenvalues(kind, b)


def _kets(dim, *indices):
    out = np.zeros(dim)
    for i in indices:
        out[i] += 1.0
    return out


@lru_cache(maxsize=None)
def _psi0_trimer():
    k = lambda s: _kets(8, int(s, 2))
    cols = [
        LIN_A * (k("011") + k("110")) - LIN_B * k("101"),     # -p-s
        CURV_A * (k("011") + k("110")) + CURV_B * k("101"),   # -p+s
        LIN_A * (k("001") + k("100")) - LIN_B * k("010"),     # p-s
        CURV_A * (k("001") + k("100")) + CURV_B * k("010"),   # p+s
        LIN_A * (k("001") - k("100")) - LIN_B * k("111"),     # -p-q
        CURV_A * (k("001") - k("100")) + CURV_B * k("111"),   # -p+q
        LIN_B * k("000") + LIN_A * (k("011") - k("110")),     # p-r
        CURV_B * k("000") - CURV_A * (k("011") - k("110")),   # p+r
    ]
    psi = np.array(cols).T
    _validate_basis(psi, model_mod.sensor_model("trimer").h0,
                    trimer_eigenvalues_z(0.0))
    return psi


def _validate_basis(psi, h0, lam0):
    ortho = np.abs(psi.T.conj() @ psi - np.eye(psi.shape[0])).max()
    if ortho >= PSI0_ORTHONORMAL_ATOL:
        raise NumericalError(f"zero-field eigenbasis not orthonormal: {ortho:.2e}")
    res = np.abs(h0 @ psi - psi * lam0).max()
    if res >= PSI0_RESIDUAL_ATOL:
        raise NumericalError(f"zero-field eigenbasis residual too large: {res:.2e}")


def psi0():
    """The trimer zero-field eigenbasis (validated; columns in branch order)."""
    return _psi0_trimer().copy()


def psi0_constants():
    """The four independent entry magnitudes of the zero-field eigenbasis."""
    return {"lin_major": LIN_A, "lin_minor": LIN_B,
            "curv_major": CURV_A, "curv_minor": CURV_B}


@lru_cache(maxsize=None)
def _reference_basis(kind):
    rt2 = math.sqrt(2.0)
    if kind == "trimer":
        return _psi0_trimer(), trimer_eigenvalues_z(0.0)
    if kind == "standard":
        psi = np.array([[1.0, 1.0], [-1.0, 1.0]]) / rt2
        lam0 = np.zeros(2)
    elif kind == "landau-zener":
        psi = np.array([[0.0, 1.0], [1.0, 0.0]])
        lam0 = np.array([-1.0, 1.0])
    elif kind == "dimer":
        psi = np.array([
            [0.0, 1.0, 0.0, 1.0],
            [1.0, 0.0, 1.0, 0.0],
            [-1.0, 0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0, 1.0],
        ]) / rt2
        lam0 = np.array([-1.0, 1.0, -1.0, 1.0])
    else:
        raise ValidationError(f"unknown model kind {kind!r}")
    _validate_basis(psi, model_mod.sensor_model(kind).h0, lam0)
    return psi, lam0


def reference_basis(model):
    """Zero-field eigenbasis and branch eigenvalues at b = 0 for a model.

    Column j is the b -> 0+ limit of branch j's eigenvector; this pins both
    the adiabatic tracking order and the Ramsey input states.
    """
    psi, lam0 = _reference_basis(model.kind)
    return psi.copy(), lam0.copy()


def _check_pair(model, pair):
    nb = model.dim
    if not (1 <= pair.p <= nb and 1 <= pair.q <= nb):
        raise ValidationError(
            f"pair ({pair.p},{pair.q}) out of range for {model.kind!r} (dim {nb})"
        )


def _check_axis_aligned(model, waveform):
    d = waveform.direction
    if d is None:
        return
    want = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}
    if tuple(d) != want[model.default_axis]:
        raise ValidationError(
            "closed-form phases only cover the canonical field axis "
            f"({model.default_axis}); use the evolve module for direction {d}"
        )


def pair_splitting(model, pair, b):
    """D(b) = (lam_p - lam_q)/2, the relative-phase rate of the pair."""
    _check_pair(model, pair)
    lam = branch_eigenvalues(model.kind, b)
    return 0.5 * (lam[pair.p - 1] - lam[pair.q - 1])


def chi_exact(model, pair, waveform, tol=QUADRATURE_ATOL):
    """Accumulated phase chi = integral of D(b(t)) dt over the signal window.

    Uses the closed-form branch eigenvalues, so the field must lie along
    the model's canonical axis (z for the trimer).
    """
    _check_axis_aligned(model, waveform)
    _check_pair(model, pair)
    a, b = waveform.window
    return adaptive_simpson(
        lambda t: pair_splitting(model, pair, waveform.evaluate(t)),
        a, b, tol=tol,
    )


def series_coefficients(pair):
    """Moment-expansion coefficients for a supported pair (sign follows the
    pair orientation)."""
    key = (pair.p, pair.q)
    if key in SERIES_COEFFICIENTS:
        return dict(SERIES_COEFFICIENTS[key])
    rev = (pair.q, pair.p)
    if rev in SERIES_COEFFICIENTS:
        return {k: -v for k, v in SERIES_COEFFICIENTS[rev].items()}
    raise ValidationError(
        f"no series expansion for pair ({pair.p},{pair.q}); "
        "supported: (4,6) and (8,6) up to orientation"
    )


def chi_series(pair, waveform, order=None, tol=QUADRATURE_ATOL):
    """Truncated moment expansion of the accumulated phase.

    ``order`` is the highest signal moment kept (defaults to the full
    implemented truncation: 2 for the mousetrap pair, 3 for the skew pair).
    """
    coeffs = series_coefficients(pair)
    top = max(coeffs)
    if order is None:
        order = top
    if not (1 <= order <= top):
        raise ValidationError(f"order must lie in [1, {top}] for this pair")
    total = 0.0
    for power, coeff in coeffs.items():
        if power <= order:
            total += coeff * integrate_moment(waveform, power, tol=tol)
    return total


def series_coefficients_json():
    """Coefficient tables for the canonical pairs, as a JSON string."""
    payload = {
        f"{p},{q}": {str(i): c for i, c in table.items()}
        for (p, q), table in SERIES_COEFFICIENTS.items()
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def default_pair(model):
    """Canonical Ramsey pair per sensor kind (mousetrap for the trimer)."""
    if model.kind == "trimer":
        return MOUSETRAP_PAIR
    if model.kind == "dimer":
        return EigenPair(3, 4)
    return EigenPair(1, 2)


def pair_input_state(model, pair=None):
    """Ramsey input state Psi0 (e_p + e_q)/sqrt(2): an equal superposition
    of the two branch eigenvectors at zero field."""
    if pair is None:
        pair = default_pair(model)
    _check_pair(model, pair)
    psi, _ = reference_basis(model)
    return (psi[:, pair.p - 1] + psi[:, pair.q - 1]) / math.sqrt(2.0)
