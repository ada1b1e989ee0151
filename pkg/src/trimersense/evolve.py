"""Exact and adiabatic time evolution, their fidelity gap, and the
adiabatic runtime/accuracy bound.

The exact propagator is the ordered product of step exponentials with the
field sampled at step midpoints (second-order accurate).  The adiabatic
propagator integrates each tracked branch eigenvalue over the window and
sandwiches the phases between the zero-field eigenbasis, which is valid
because the presets switch the field off at both window ends.  Branches are
tracked by eigenvector-overlap continuity: branch eigenvalues cross at
b = 0 and |b| = 1, where distance-based matching would silently swap the
sensor pair, so the assignment follows the eigenvectors instead.  Berry
phases are dropped, matching the phase convention of the tracked basis
(parallel transport).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from trimersense import backends, spectrum
from trimersense.errors import NumericalError, ValidationError
from trimersense.linalg import unitarity_defect
from trimersense.model import direction_coupling
from trimersense.serialize import write_csv
from trimersense.tolerances import (
    GAP_FIELD_FLOOR,
    GAP_VALUE_FLOOR,
    REFINE_MAX_STEPS,
    REFINE_SURVIVAL_TOL,
    STATE_NORM_ATOL,
    UNITARY_PROPAGATOR_ATOL,
)

AXIS_VECTORS = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid over [t0, t1] with `steps` propagation steps."""

    t0: float
    t1: float
    steps: int

    def __post_init__(self):
        if self.steps < 1:
            raise ValidationError("steps must be >= 1")
        if not (np.isfinite(self.t0) and np.isfinite(self.t1) and self.t0 < self.t1):
            raise ValidationError(f"need t0 < t1, got ({self.t0}, {self.t1})")

    @property
    def dt(self):
        return (self.t1 - self.t0) / self.steps

    def midpoints(self):
        return self.t0 + (np.arange(self.steps) + 0.5) * self.dt

    def endpoints(self):
        return np.linspace(self.t0, self.t1, self.steps + 1)

    @classmethod
    def for_waveform(cls, waveform, steps):
        t0, t1 = waveform.window
        return cls(t0, t1, steps)


@dataclass
class EvolutionResult:
    """Checkpointed trajectory of one evolution."""

    grid: TimeGrid
    pair: spectrum.EigenPair
    times: np.ndarray
    survival_numeric: np.ndarray
    survival_adiabatic: np.ndarray
    delta: np.ndarray
    accumulated_phase: np.ndarray
    unitary_numeric: np.ndarray = field(repr=False, default=None)
    unitary_adiabatic: np.ndarray = field(repr=False, default=None)

    def to_csv(self, path, metadata=None):
        rows = np.column_stack([self.times, self.survival_numeric,
                                self.survival_adiabatic, self.delta,
                                self.accumulated_phase])
        write_csv(path, ["t", "survival_numeric", "survival_adiabatic",
                         "delta", "phase"], rows, metadata)


def field_direction(model, waveform):
    d = waveform.direction
    if d is None:
        d = AXIS_VECTORS[model.default_axis]
    return np.asarray(d, dtype=float)


def _check_unitary(u, what):
    defect = unitarity_defect(u)
    if defect >= UNITARY_PROPAGATOR_ATOL:
        raise NumericalError(f"{what} lost unitarity: defect {defect:.2e}")
    return u


def propagate_numeric(model, waveform, grid):
    """Time-ordered product of midpoint-sampled step exponentials."""
    hdir = direction_coupling(model, field_direction(model, waveform))
    bmid = np.asarray(waveform.evaluate(grid.midpoints()), dtype=float)
    u, _ = backends.propagate(model.h0, hdir, bmid, grid.dt)
    return _check_unitary(u, "numeric propagator")


def tracked_branch_spectra(model, waveform, grid, vec_checkpoints=None):
    """Instantaneous branch eigenvalues on the endpoint grid, tracked by
    continuity from the zero-field eigenbasis."""
    hdir = direction_coupling(model, field_direction(model, waveform))
    bgrid = np.asarray(waveform.evaluate(grid.endpoints()), dtype=float)
    psi_ref, _ = spectrum.reference_basis(model)
    return backends.tracked_spectra(model.h0, hdir, bgrid, psi_ref.astype(complex),
                                    vec_checkpoints)


def propagate_adiabatic(model, waveform, grid):
    """Psi0 exp(-i integral Lambda) Psi0^dagger with per-branch phases
    integrated by Simpson quadrature over the tracked spectra."""
    lams, _, _ = tracked_branch_spectra(model, waveform, grid)
    phases = simpson(lams, x=grid.endpoints(), axis=0)
    psi0, _ = spectrum.reference_basis(model)
    u = (psi0 * np.exp(-1j * phases)) @ psi0.conj().T
    return _check_unitary(u, "adiabatic propagator")


def _initial_state(model, pair, initial_state):
    if initial_state is None:
        return spectrum.pair_input_state(model, pair)
    phi = np.asarray(initial_state, dtype=complex).ravel()
    if phi.shape != (model.dim,):
        raise ValidationError(f"initial state has dim {phi.shape}, expected {model.dim}")
    if abs(np.linalg.norm(phi) - 1.0) > STATE_NORM_ATOL:
        raise ValidationError("initial state must be normalized")
    return phi


def evolve_trajectory(model, waveform, grid, pair=None, initial_state=None,
                      checkpoint_every=None):
    """Run both propagators and record survival, fidelity gap and phase at
    checkpoints (every ``checkpoint_every`` steps; defaults to ~128 rows)."""
    if pair is None:
        pair = spectrum.default_pair(model)
    phi0 = _initial_state(model, pair, initial_state)
    if checkpoint_every is None:
        checkpoint_every = max(1, grid.steps // 128)
    idx = np.arange(checkpoint_every, grid.steps + 1, checkpoint_every, dtype=np.int64)
    if len(idx) == 0 or idx[-1] != grid.steps:
        idx = np.append(idx, grid.steps).astype(np.int64)

    hdir = direction_coupling(model, field_direction(model, waveform))
    bmid = np.asarray(waveform.evaluate(grid.midpoints()), dtype=float)
    u_num, psis_num = backends.propagate(model.h0, hdir, bmid, grid.dt,
                                         psi0=phi0, checkpoints=idx)
    _check_unitary(u_num, "numeric propagator")

    lams, _, vecs = tracked_branch_spectra(model, waveform, grid, vec_checkpoints=idx)
    tgrid = grid.endpoints()
    cum = cumulative_simpson(lams, x=tgrid, axis=0, initial=0.0)
    psi0_ref, _ = spectrum.reference_basis(model)
    coeff = psi0_ref.conj().T @ phi0

    n_ck = len(idx)
    surv_n = np.empty(n_ck)
    surv_a = np.empty(n_ck)
    delta = np.empty(n_ck)
    chi = np.empty(n_ck)
    for c, m in enumerate(idx):
        phase = cum[m]
        psi_ad = vecs[c] @ (np.exp(-1j * phase) * coeff)
        psi_nu = psis_num[c]
        surv_n[c] = abs(np.vdot(phi0, psi_nu)) ** 2
        surv_a[c] = abs(np.vdot(phi0, psi_ad)) ** 2
        delta[c] = 1.0 - abs(np.vdot(psi_nu, psi_ad)) ** 2
        chi[c] = 0.5 * (phase[pair.p - 1] - phase[pair.q - 1])

    phases_full = cum[-1]
    u_ad = (psi0_ref * np.exp(-1j * phases_full)) @ psi0_ref.conj().T
    return EvolutionResult(
        grid=grid, pair=pair, times=tgrid[idx],
        survival_numeric=surv_n, survival_adiabatic=surv_a,
        delta=delta, accumulated_phase=chi,
        unitary_numeric=u_num, unitary_adiabatic=u_ad,
    )


def adiabatic_delta(model, waveform, grid, initial_state=None):
    """delta = 1 - |<psi_numeric|psi_adiabatic>|^2 for one evolution."""
    phi0 = _initial_state(model, spectrum.default_pair(model), initial_state)
    psi_n = propagate_numeric(model, waveform, grid) @ phi0
    psi_a = propagate_adiabatic(model, waveform, grid) @ phi0
    d = 1.0 - abs(np.vdot(psi_n, psi_a)) ** 2
    return min(max(d, 0.0), 1.0)


@dataclass(frozen=True)
class GapPolicy:
    """How the spectral gap gamma enters the accuracy bound.

    The gap is sampled only where |b(t)| > field_floor: at the crossing
    itself the branches are degenerate by construction and the linearized
    spectrum keeps the evolution adiabatic there.  mode "global-min" uses
    one worst-case gamma; "pointwise" divides each grid point by its own
    gap.  Both knobs exist because the value reported alongside the bound
    depends on them and no single convention is canonical.
    """

    field_floor: float = GAP_FIELD_FLOOR
    mode: str = "global-min"

    def __post_init__(self):
        if self.mode not in ("global-min", "pointwise"):
            raise ValidationError(f"unknown gap policy mode {self.mode!r}")


def adiabatic_bound(model, waveform, grid, pair=None, policy=GapPolicy()):
    """Accuracy-bound value for delta^2:

        (1e5 / T) * max{ |h1 T b'|^3 / gamma^4, |h1^2 T^3 b' b''| / gamma^3 }

    with h1 the coupling operator norm (3 for the trimer) and the max taken
    over the masked time grid under the gap policy.
    """
    if pair is None:
        pair = spectrum.default_pair(model)
    hdir = direction_coupling(model, field_direction(model, waveform))
    h1 = float(np.abs(np.linalg.eigvalsh(hdir)).max())
    tgrid = grid.endpoints()
    bp = np.asarray(waveform.derivative(tgrid, 1), dtype=float)
    bpp = np.asarray(waveform.derivative(tgrid, 2), dtype=float)
    T = grid.t1 - grid.t0
    if np.abs(bp).max() == 0.0:
        return 0.0

    b = np.asarray(waveform.evaluate(tgrid), dtype=float)
    mask = np.abs(b) > policy.field_floor
    if not mask.any():
        raise NumericalError(
            f"no grid points with |b| > {policy.field_floor}; "
            "lower the gap policy field floor"
        )
    lams, _, _ = tracked_branch_spectra(model, waveform, grid)
    gaps = np.full(len(tgrid), np.inf)
    for j in (pair.p - 1, pair.q - 1):
        dist = np.abs(lams - lams[:, j:j + 1])
        dist[:, j] = np.inf
        gaps = np.minimum(gaps, dist.min(axis=1))
    gamma = gaps[mask]
    if policy.mode == "global-min":
        gamma = np.full(mask.sum(), gamma.min())
    if gamma.min() < GAP_VALUE_FLOOR:
        raise NumericalError(
            f"spectral gap {gamma.min():.3e} below floor {GAP_VALUE_FLOOR}: "
            "a degenerate crossing dominates the masked region"
        )
    term1 = np.abs(h1 * T * bp[mask]) ** 3 / gamma ** 4
    term2 = np.abs(h1 ** 2 * T ** 3 * bp[mask] * bpp[mask]) / gamma ** 3
    return float(1e5 / T * np.maximum(term1, term2).max())


def refine_until_converged(model, waveform, initial_steps=64, tol=REFINE_SURVIVAL_TOL,
                           max_steps=REFINE_MAX_STEPS, pair=None, initial_state=None):
    """Double the step count until the final survival probability moves by
    less than ``tol`` between refinements; returns the converged grid."""
    if initial_steps < 16:
        raise ValidationError("initial_steps must be >= 16")
    if pair is None:
        pair = spectrum.default_pair(model)
    phi0 = _initial_state(model, pair, initial_state)

    def survival(steps):
        grid = TimeGrid.for_waveform(waveform, steps)
        u = propagate_numeric(model, waveform, grid)
        return abs(np.vdot(phi0, u @ phi0)) ** 2

    steps = int(initial_steps)
    prev = survival(steps)
    while steps <= max_steps:
        steps *= 2
        cur = survival(steps)
        if abs(cur - prev) < tol:
            return TimeGrid.for_waveform(waveform, steps)
        prev = cur
    raise NumericalError(
        f"grid refinement exceeded {max_steps} steps "
        f"(last survival change {abs(cur - prev):.3e})"
    )
