"""Command-line entry point.

Subcommands: spectrum, evolve, sweep, direction, error, reproduce.  Flags
can also be supplied through a flat INI config file ([run] section, keys
named like the flags); explicit flags override config values.  Exit codes:
0 success, 2 usage/validation, 3 numerical failure, 4 I/O.
"""

import argparse
import configparser
import os
import sys

import numpy as np

from trimersense import __version__
from trimersense.errors import NumericalError, ValidationError
from trimersense.evolve import GapPolicy, TimeGrid, evolve_trajectory, refine_until_converged
from trimersense.model import KINDS, sensor_model
from trimersense.scan import ScanSpec, figure_spec, run_scan
from trimersense.serialize import fmt
from trimersense.signal import PRESETS, preset_waveform
from trimersense.spectrum import (
    EigenPair,
    branch_eigenvalues,
    default_pair,
    trimer_eigenvalues_z,
)

_FLAGS = ("model", "pair", "epsilon", "preset", "steps", "threads", "out",
          "gap-floor", "gap-policy")


def _add_common(p):
    p.add_argument("--config", help="INI config file; flags override its [run] keys")
    p.add_argument("--model", choices=KINDS, help="sensor model kind")
    p.add_argument("--pair", help="eigenpair as 'p,q' (1-based branch indices)")
    p.add_argument("--epsilon", help="signal amplitude, or comma list for scans")
    p.add_argument("--preset", choices=sorted(PRESETS), help="waveform preset name")
    p.add_argument("--steps", type=int, help="propagation steps (default: auto-converge)")
    p.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    p.add_argument("--out", help="output file or directory")
    p.add_argument("--gap-floor", type=float, dest="gap_floor",
                   help="|b| floor below which the spectral gap is not sampled")
    p.add_argument("--gap-policy", choices=("global-min", "pointwise"),
                   dest="gap_policy", help="gap handling in the accuracy bound")


def _load_config(path):
    if path is None:
        return {}
    if not os.path.exists(path):
        raise ValidationError(f"config file not found: {path}")
    cp = configparser.ConfigParser()
    cp.read(path)
    if "run" not in cp:
        raise ValidationError(f"{path}: missing [run] section")
    for key in cp["run"]:
        if key not in _FLAGS:
            raise ValidationError(f"{path}: unknown config key {key!r}")
    return dict(cp["run"])


class _Settings:
    """Merged view: CLI flag if set, else config value, else default."""

    def __init__(self, args):
        self._args = vars(args)
        self._cfg = _load_config(args.config)

    def get(self, name, default=None, convert=None):
        val = self._args.get(name.replace("-", "_"))
        if val is None:
            val = self._cfg.get(name)
        if val is None:
            return default
        return convert(val) if convert and isinstance(val, str) else val


def _parse_pair(text):
    try:
        p, q = (int(x) for x in text.split(","))
    except ValueError:
        raise ValidationError(f"pair must look like '4,6', got {text!r}")
    return EigenPair(p, q)


def _parse_epsilons(text):
    try:
        return np.array([float(x) for x in str(text).split(",")])
    except ValueError:
        raise ValidationError(f"bad epsilon list {text!r}")


def _require(settings, name, convert=None):
    val = settings.get(name, convert=convert)
    if val is None:
        raise ValidationError(f"missing required field: {name}")
    return val


def cmd_spectrum(settings, args):
    kind = settings.get("model", "trimer")
    b_values = [float(x) for x in args.b.split(",")]
    model = sensor_model(kind)
    header = ["b"] + [f"lambda{j}" for j in range(1, model.dim + 1)]
    print(",".join(header))
    lines = []
    for b in b_values:
        lam = (trimer_eigenvalues_z(b) if kind == "trimer"
               else branch_eigenvalues(kind, b))
        lines.append([b] + list(lam))
        print(",".join(fmt(x) for x in lines[-1]))
    out = settings.get("out")
    if out:
        from trimersense.serialize import write_csv
        write_csv(out, header, lines, {"model": kind, "code_version": __version__})
    return 0


def cmd_evolve(settings, args):
    kind = settings.get("model", "trimer")
    model = sensor_model(kind)
    epsilon = float(_require(settings, "epsilon", convert=float))
    preset = settings.get("preset", "fig2")
    waveform = preset_waveform(preset, epsilon)
    pair = settings.get("pair", convert=_parse_pair) or default_pair(model)
    steps = settings.get("steps", convert=int)
    if steps is None:
        steps = refine_until_converged(model, waveform, initial_steps=256).steps
    grid = TimeGrid.for_waveform(waveform, int(steps))
    result = evolve_trajectory(model, waveform, grid, pair=pair)
    out = settings.get("out", "trajectory.csv")
    result.to_csv(out, metadata={
        "code_version": __version__, "model": kind, "preset": preset,
        "epsilon": epsilon, "pair": f"{pair.p},{pair.q}", "steps": grid.steps,
    })
    print(f"wrote {out}: final survival {fmt(result.survival_numeric[-1])}, "
          f"delta {fmt(result.delta[-1])}")
    return 0


def _scan_spec(settings, kind):
    overrides = {}
    eps = settings.get("epsilon")
    if eps is not None:
        overrides["epsilons"] = _parse_epsilons(eps)
    steps = settings.get("steps", convert=int)
    if steps is not None:
        overrides["steps"] = int(steps)
    threads = settings.get("threads", convert=int)
    if threads is not None:
        overrides["threads"] = int(threads)
    policy = GapPolicy(
        field_floor=float(settings.get("gap-floor", GapPolicy().field_floor, convert=float)),
        mode=settings.get("gap-policy", GapPolicy().mode),
    )
    overrides["gap_policy"] = policy
    preset = settings.get("preset")
    if preset is not None:
        overrides["preset"] = preset
    return ScanSpec(kind=kind, **overrides)


def _write_scan(result, settings, default_name):
    out = settings.get("out", default_name)
    result.to_csv(out)
    result.to_json(os.path.splitext(out)[0] + ".json")
    print(f"wrote {out} ({len(result.rows)} rows)")
    return 0


def cmd_sweep(settings, args):
    return _write_scan(run_scan(_scan_spec(settings, "amplitude-sweep")),
                       settings, "sweep.csv")


def cmd_direction(settings, args):
    return _write_scan(run_scan(_scan_spec(settings, "directional-octant")),
                       settings, "direction.csv")


def cmd_error(settings, args):
    return _write_scan(run_scan(_scan_spec(settings, "adiabatic-error")),
                       settings, "error.csv")


def _summary(figure, result):
    if figure == "fig2":
        eps = result.column("epsilon")
        low = eps <= 0.25
        plateau = max(abs(1.0 - result.column(c)[low]).max()
                      for c in ("p_n1", "p_n3_ps", "p_n3_es"))
        depart = (1.0 - result.column("p_n1")).max()
        return f"plateau max|1-P| (eps<=0.25) {fmt(plateau)}, max departure {fmt(depart)}"
    if figure == "fig3":
        return f"min chi_mt {fmt(result.column('chi').min())}"
    if figure == "fig4":
        eps = result.column("epsilon")
        sel = eps == eps.min()
        return f"min P at eps={fmt(eps.min())}: {fmt(result.column('p_numeric')[sel].min())}"
    return f"max delta {fmt(result.column('delta').max())}"


def cmd_reproduce(settings, args):
    figure = args.figure
    spec = figure_spec(figure)  # validates the name
    overrides = _scan_spec(settings, spec.kind)
    result = run_scan(overrides)
    outdir = settings.get("out", "out")
    os.makedirs(outdir, exist_ok=True)
    csv_path = os.path.join(outdir, f"{figure}.csv")
    result.to_csv(csv_path)
    result.to_json(os.path.join(outdir, f"{figure}.json"))
    print(f"{figure}: wrote {csv_path} ({len(result.rows)} rows); {_summary(figure, result)}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="trimersense",
        description="Frustrated Kitaev-trimer threshold sensor laboratory.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="closed-form eigenvalues at given fields")
    p.add_argument("--b", required=True, help="comma list of field amplitudes")
    _add_common(p)
    p.set_defaults(fn=cmd_spectrum)

    p = sub.add_parser("evolve", help="single trajectory -> checkpoint CSV")
    _add_common(p)
    p.set_defaults(fn=cmd_evolve)

    p = sub.add_parser("sweep", help="amplitude sweep (threshold response)")
    _add_common(p)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("direction", help="octant directional response scan")
    _add_common(p)
    p.set_defaults(fn=cmd_direction)

    p = sub.add_parser("error", help="adiabatic error and bound sweep")
    _add_common(p)
    p.set_defaults(fn=cmd_error)

    p = sub.add_parser("reproduce", help="regenerate a reference figure dataset")
    p.add_argument("figure", help="one of fig2, fig3, fig4, fig5")
    _add_common(p)
    p.set_defaults(fn=cmd_reproduce)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = _Settings(args)
        return args.fn(settings, args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
