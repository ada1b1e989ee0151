"""Parameter-sweep drivers behind the four reproduction figures.

Every driver returns a ScanResult (rectangular row grid plus metadata) and
is deterministic: grid points are independent work items evaluated in a
thread pool and gathered by index, so the output is byte-identical for a
given spec and code version regardless of thread count or evaluation order.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from trimersense import __version__
from trimersense.backends import backend_name
from trimersense.errors import ValidationError
from trimersense.evolve import (
    GapPolicy,
    TimeGrid,
    adiabatic_bound,
    adiabatic_delta,
    evolve_trajectory,
    propagate_numeric,
    refine_until_converged,
)
from trimersense.model import sensor_model
from trimersense.sensing import (
    GHZ,
    PRODUCT,
    canonical_input_state,
    multi_sensor_probability,
    survival_probability,
)
from trimersense.serialize import write_csv, write_json
from trimersense.signal import preset_waveform
from trimersense.spectrum import MOUSETRAP_PAIR, chi_exact

SCAN_KINDS = ("amplitude-sweep", "time-resolved", "directional-octant",
              "adiabatic-error")


@dataclass(frozen=True)
class ScanSpec:
    """Sweep parameters; unset fields fall back to the figure defaults."""

    kind: str
    preset: str = "fig2"
    epsilons: np.ndarray = None
    theta_count: int = 31
    phi_count: int = 31
    steps: int = None          # None: converge once at the worst-case epsilon
    threads: int = None
    checkpoint_every: int = None
    gap_policy: GapPolicy = field(default_factory=GapPolicy)

    def __post_init__(self):
        if self.kind not in SCAN_KINDS:
            raise ValidationError(f"unknown scan kind {self.kind!r}; choose {SCAN_KINDS}")
        if self.epsilons is not None:
            eps = np.asarray(self.epsilons, dtype=float)
            if eps.size == 0:
                raise ValidationError("epsilon grid must be non-empty")
            object.__setattr__(self, "epsilons", eps)
        if self.theta_count < 1 or self.phi_count < 1:
            raise ValidationError("direction grid counts must be positive")


@dataclass
class ScanResult:
    """Named columns over a rectangular row grid, plus a metadata block."""

    columns: list
    rows: np.ndarray
    metadata: dict

    def column(self, name):
        return self.rows[:, self.columns.index(name)]

    def to_csv(self, path):
        write_csv(path, self.columns, self.rows, self.metadata)

    def to_json(self, path):
        write_json(path, self.columns, self.rows, self.metadata)


def _parallel(fn, items, threads):
    workers = threads or os.cpu_count() or 1
    if workers == 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _converged_steps(spec, worst_epsilon, direction=None):
    if spec.steps is not None:
        return int(spec.steps), "fixed"
    w = preset_waveform(spec.preset, worst_epsilon, direction)
    grid = refine_until_converged(sensor_model("trimer"), w, initial_steps=256)
    return grid.steps, f"converged at epsilon={worst_epsilon}"


def _metadata(spec, model, steps, steps_note, extra=None):
    md = {
        "code_version": __version__,
        "backend": backend_name(),
        "kind": spec.kind,
        "model": model.kind,
        "pair": f"{MOUSETRAP_PAIR.p},{MOUSETRAP_PAIR.q}",
        "preset": spec.preset,
        "steps": steps,
        "grid_convergence": steps_note,
    }
    md.update(extra or {})
    return md


def amplitude_sweep(spec):
    """Response probability vs signal amplitude (the threshold plateau).

    Adiabatic closed forms for N=1, N=3 product and N=3 GHZ inputs, plus
    the numeric propagation for N=1.
    """
    model = sensor_model("trimer")
    eps = spec.epsilons if spec.epsilons is not None else np.linspace(0.0, 1.5, 150)
    steps, note = _converged_steps(spec, float(eps.max()))
    phi0 = canonical_input_state(model)

    def point(e):
        w = preset_waveform(spec.preset, e)
        chi = chi_exact(model, MOUSETRAP_PAIR, w)
        grid = TimeGrid.for_waveform(w, steps)
        p_num = survival_probability(propagate_numeric(model, w, grid), phi0)
        return (e, chi,
                multi_sensor_probability(chi, 1, GHZ),
                multi_sensor_probability(chi, 3, PRODUCT),
                multi_sensor_probability(chi, 3, GHZ),
                p_num)

    rows = np.array(_parallel(point, list(eps), spec.threads))
    return ScanResult(["epsilon", "chi", "p_n1", "p_n3_ps", "p_n3_es", "p_numeric"],
                      rows, _metadata(spec, model, steps, note,
                                      {"epsilon_min": eps.min(), "epsilon_max": eps.max(),
                                       "epsilon_count": len(eps)}))


def time_resolved(spec):
    """P(t, epsilon) map with the signal and accumulated-phase companions."""
    model = sensor_model("trimer")
    eps = spec.epsilons if spec.epsilons is not None else np.linspace(0.01, 1.49, 75)
    steps, note = _converged_steps(spec, float(eps.max()))
    every = spec.checkpoint_every or max(1, steps // 150)

    def trajectory(e):
        w = preset_waveform(spec.preset, e)
        grid = TimeGrid.for_waveform(w, steps)
        res = evolve_trajectory(model, w, grid, pair=MOUSETRAP_PAIR,
                                checkpoint_every=every)
        b_t = np.asarray(w.evaluate(res.times), dtype=float)
        block = np.column_stack([
            res.times, np.full(len(res.times), e), res.survival_numeric,
            res.accumulated_phase, b_t,
        ])
        return block

    blocks = _parallel(trajectory, list(eps), spec.threads)
    rows = np.vstack(blocks)
    return ScanResult(["t", "epsilon", "p_numeric", "chi", "b_of_t"],
                      rows, _metadata(spec, model, steps, note,
                                      {"checkpoint_every": every,
                                       "epsilon_count": len(eps)}))


def directional_octant(spec):
    """Numeric response over one octant of field-incidence directions.

    The initial state stays the z-axis mousetrap state for every direction.
    """
    model = sensor_model("trimer")
    eps = spec.epsilons if spec.epsilons is not None else np.array([0.2, 0.7, 1.0, 1.49])
    thetas = np.linspace(0.0, np.pi / 2, spec.theta_count)
    phis = np.linspace(0.0, np.pi / 2, spec.phi_count)
    steps, note = _converged_steps(spec, float(eps.max()))
    phi0 = canonical_input_state(model)

    items = [(e, th, ph) for e in eps for th in thetas for ph in phis]

    def point(item):
        e, th, ph = item
        d = (np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th))
        w = preset_waveform(spec.preset, e, direction=d)
        grid = TimeGrid.for_waveform(w, steps)
        p = survival_probability(propagate_numeric(model, w, grid), phi0)
        return (e, th, ph, p)

    rows = np.array(_parallel(point, items, spec.threads))
    return ScanResult(["epsilon", "theta", "phi", "p_numeric"],
                      rows, _metadata(spec, model, steps, note,
                                      {"theta_count": spec.theta_count,
                                       "phi_count": spec.phi_count,
                                       "epsilon_count": len(eps)}))


def adiabatic_error_sweep(spec):
    """Numeric adiabatic error delta and the accuracy-bound value vs amplitude."""
    model = sensor_model("trimer")
    eps = spec.epsilons if spec.epsilons is not None else np.linspace(0.0, 1.5, 31)
    steps, note = _converged_steps(spec, float(eps.max()))
    phi0 = canonical_input_state(model)

    def point(e):
        w = preset_waveform(spec.preset, e)
        grid = TimeGrid.for_waveform(w, steps)
        delta = adiabatic_delta(model, w, grid, phi0)
        if e == 0.0:
            bound = 0.0
        else:
            bound = adiabatic_bound(model, w, grid, MOUSETRAP_PAIR, spec.gap_policy)
        return (e, delta, bound)

    rows = np.array(_parallel(point, list(eps), spec.threads))
    return ScanResult(["epsilon", "delta", "delta_sq_bound"],
                      rows, _metadata(spec, model, steps, note,
                                      {"gap_field_floor": spec.gap_policy.field_floor,
                                       "gap_mode": spec.gap_policy.mode,
                                       "epsilon_count": len(eps)}))


def run_scan(spec):
    driver = {
        "amplitude-sweep": amplitude_sweep,
        "time-resolved": time_resolved,
        "directional-octant": directional_octant,
        "adiabatic-error": adiabatic_error_sweep,
    }[spec.kind]
    return driver(spec)


def figure_spec(figure, **overrides):
    """Paper-preset scan spec for a reproduction figure name."""
    table = {
        "fig2": ScanSpec(kind="amplitude-sweep"),
        "fig3": ScanSpec(kind="time-resolved"),
        "fig4": ScanSpec(kind="directional-octant"),
        "fig5": ScanSpec(kind="adiabatic-error"),
    }
    if figure not in table:
        raise ValidationError(f"unknown figure {figure!r}; choose fig2..fig5")
    return replace(table[figure], **overrides)
