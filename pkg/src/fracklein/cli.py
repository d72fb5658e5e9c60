"""Command-line entry point.

Every study reads its settings from (in increasing priority) built-in
defaults, an optional INI file given with ``--config`` and command-line
flags.  Results are written as CSV files with the fixed header in
:data:`fracklein.csvio.CSV_HEADER` into the output directory, which defaults
to ``$FRACKLEIN_OUTPUT_DIR`` or ``./fracklein-output``.

INI layout (all keys optional)::

    [model]          alpha, beta, eps, p, regime
    [discretization] tau, N, t_final, shape_2d
    [reference]      tau_ref, N_ref
    [study]          data, n_samples, dump_times, max_steps
    [run]            workers
    [output]         dir, full_precision, plot_script

List-valued keys (alpha, eps, tau, N, dump_times) take comma-separated values.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import csvio, oracle
from .ewi_solver import SolveConfig, StepFailure, solve
from .fractional_ops import ModelParams, Regime
from .harness import (
    DATA_DOMAINS,
    StudySpec,
    energy_records,
    long_time_records,
    oscillatory_table_spec,
    run_energy_study,
    run_field_dump_2d,
    run_long_time_study,
    run_oscillatory_table,
    run_spatial_study,
    run_temporal_study,
)
from .observables import energy_series, h_alpha_half_error
from .spectral_grid import GridError, forward_transform

log = logging.getLogger("fracklein")

OUTPUT_ENV = "FRACKLEIN_OUTPUT_DIR"
DEFAULT_OUTPUT = "fracklein-output"

COMMANDS = ("solve", "converge-time", "converge-space", "long-time", "energy", "oscillatory-table", "dump-2d")


class UsageError(Exception):
    """Bad input; the message names the offending field."""


def _floats(text):
    return tuple(float(v) for v in str(text).split(",") if v.strip())


def _ints(text):
    return tuple(int(v) for v in str(text).split(",") if v.strip())


def _bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _shape(text):
    vals = tuple(int(v) for v in str(text).replace("x", ",").split(",") if v.strip())
    if len(vals) != 2:
        raise ValueError("expected two sizes, e.g. 32x64")
    return vals


# field -> (ini section, parser, default, help)
FIELDS = {
    "alpha": ("model", _floats, (2.0,), "fractional order(s) in (1, 2]"),
    "beta": ("model", float, 1.0, "mass parameter beta > 0"),
    "eps": ("model", _floats, (1.0,), "nonlinearity strength(s) in [0, 1]"),
    "p": ("model", int, 1, "power of the nonlinearity |psi|^(2p) psi"),
    "regime": ("model", Regime, Regime.COMPLEX_POWER, "real-cubic | complex-power | oscillatory"),
    "tau": ("discretization", _floats, (1e-2,), "time step(s); lambda for oscillatory-table"),
    "N": ("discretization", _ints, (128,), "Fourier mode count(s)"),
    "t_final": ("discretization", float, None, "final time (default per study)"),
    "shape_2d": ("discretization", _shape, (32, 64), "2D grid shape for dump-2d"),
    "tau_ref": ("reference", float, None, "reference step (default min(tau)/10)"),
    "N_ref": ("reference", int, None, "reference mode count for converge-space (default 2*max(N))"),
    "data": ("study", str, "eq-5.1.1", "initial data: " + " | ".join(DATA_DOMAINS)),
    "n_samples": ("study", int, 64, "sample times per curve"),
    "dump_times": ("study", _floats, (0.0, 2.0, 8.0, 32.0, 128.0), "dump-2d snapshot times"),
    "max_steps": ("study", int, 10**7, "cap on time steps per run"),
    "workers": ("run", int, 1, "parallel worker processes"),
    "full_precision": ("output", _bool, False, "write repr() floats instead of 6 digits"),
    "plot_script": ("output", _bool, False, "write a matplotlib sidecar per CSV"),
}

# command-specific defaults layered over FIELDS
COMMAND_DEFAULTS = {
    "solve": {"t_final": 1.0},
    "converge-time": {"tau": (1e-2, 5e-3, 2.5e-3, 1.25e-3), "t_final": 1.0, "p": 2},
    "converge-space": {"tau": (1e-3,), "N": (8, 16, 32, 64), "t_final": 1.0, "p": 2},
    "long-time": {"eps": (1.0, 0.5, 0.25), "tau": (1e-2,), "p": 2},
    "energy": {"alpha": (2.0, 1.5, 1.2), "eps": (0.5,), "tau": (1e-2, 5e-3), "p": 2},
    "oscillatory-table": {"tau": (0.05,), "data": "sec-5.3-complex", "t_final": 1.0},
    "dump-2d": {"alpha": (2.0, 1.4), "data": "eq-5.2.1", "t_final": 8.0, "tau": (1e-2,)},
}


def _parse_field(name, raw):
    parser = FIELDS[name][1]
    try:
        return parser(raw)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid value for {name}: {raw!r} ({exc})") from None


def load_config(path) -> dict:
    """Read an INI file into a field dict; unknown sections or keys are errors."""
    path = Path(path)
    if not path.is_file():
        raise UsageError(f"config file not found: {path}")
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    sections = {sec for sec, *_ in FIELDS.values()}
    out = {}
    for sec in cp.sections():
        if sec not in sections:
            raise UsageError(f"{path}: unknown section [{sec}]")
        for key, raw in cp.items(sec):
            if key == "dir" and sec == "output":
                out["output_dir"] = raw
                continue
            if key not in FIELDS or FIELDS[key][0] != sec:
                raise UsageError(f"{path}: unknown key {key!r} in [{sec}]")
            out[key] = _parse_field(key, raw)
    return out


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="INI file with study settings")
    p.add_argument("--output-dir", help=f"output directory (default ${OUTPUT_ENV} or ./{DEFAULT_OUTPUT})")
    p.add_argument("-v", "--verbose", action="count", default=0, help="more logging (repeatable)")
    for name, (sec, _, default, text) in FIELDS.items():
        flag = "--" + name.replace("_", "-")
        if FIELDS[name][1] is _bool:
            p.add_argument(flag, dest=name, action="store_const", const="true",
                           help=f"{text} [{sec}]")
        else:
            shown = ",".join(map(str, default)) if isinstance(default, tuple) else default
            if isinstance(default, Regime):
                shown = default.value
            p.add_argument(flag, dest=name, help=f"{text} (default {shown}) [{sec}]")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="fracklein",
        description="EWI/Fourier solver studies for the fractional Klein-Gordon equation.",
        epilog="Defaults differ per subcommand; see 'fracklein <command> --help'.")
    parser.add_argument("--check", action="store_true", help="run the built-in acceptance suite and exit")
    parser.add_argument("--criteria", help="with --check: comma-separated criterion numbers")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", metavar="command")
    helps = {
        "solve": "single run; reports energy drift and, for eps=0, the error against the exact flow",
        "converge-time": "temporal convergence at t_final",
        "converge-space": "spatial convergence at t_final",
        "long-time": "running-max error up to 1/eps^(2p)",
        "energy": "energy deviation up to 1/eps^(2p)",
        "oscillatory-table": "e1(r=1) table over eps/2^k rows and lambda/4^j columns",
        "dump-2d": "2D field snapshots written as .npz",
    }
    for cmd in COMMANDS:
        d = COMMAND_DEFAULTS[cmd]
        extra = ", ".join(f"{k}={','.join(map(str, v)) if isinstance(v, tuple) else v}" for k, v in d.items())
        sub.add_parser(cmd, parents=[common], help=helps[cmd],
                       description=helps[cmd] + (f". Command defaults: {extra}." if extra else "."))
    return parser


def resolve_settings(args) -> dict:
    settings = {k: v[2] for k, v in FIELDS.items()}
    settings.update(COMMAND_DEFAULTS.get(args.command, {}))
    settings["output_dir"] = os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT
    if args.config:
        settings.update(load_config(args.config))
    for name in FIELDS:
        raw = getattr(args, name, None)
        if raw is not None:
            settings[name] = _parse_field(name, raw)
    if args.output_dir:
        settings["output_dir"] = args.output_dir
    for name in ("workers", "n_samples", "max_steps"):
        if settings[name] < 1:
            raise UsageError(f"invalid value for {name}: must be >= 1")
    if settings["data"] not in DATA_DOMAINS:
        raise UsageError(f"invalid value for data: {settings['data']!r} (choose from {', '.join(DATA_DOMAINS)})")
    return settings


def _output_dir(settings) -> Path:
    out = Path(settings["output_dir"])
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise UsageError(f"output_dir {out} is not writable: {exc}") from None
    return out


def _spec(kind, s, **over) -> StudySpec:
    kw = dict(kind=kind, alphas=s["alpha"], eps_list=s["eps"], steps=s["tau"], Ns=s["N"], beta=s["beta"],
              p=s["p"], regime=s["regime"], data=s["data"], t_final=s["t_final"], tau_ref=s["tau_ref"],
              N_ref=s["N_ref"], n_samples=s["n_samples"], shape_2d=s["shape_2d"],
              dump_times=s["dump_times"], workers=s["workers"], max_steps=s["max_steps"])
    kw.update(over)
    return StudySpec(**kw)


def _emit(rows, path, s, plot=None):
    csvio.write_csv(rows, path, s["full_precision"])
    print(f"wrote {path}")
    if plot and s["plot_script"]:
        script = csvio.write_plot_sidecar(path, *plot)
        print(f"wrote {script}")


def cmd_solve(s, out):
    rows = []
    N = s["N"][0]
    from .harness import builtin_initial_data, default_grid
    grid = default_grid(s["data"], N if s["data"] != "eq-5.2.1" else s["shape_2d"])
    init = builtin_initial_data(s["data"], grid)
    tau, T = s["tau"][0], s["t_final"]
    for alpha in s["alpha"]:
        for eps in s["eps"]:
            params = ModelParams(alpha=alpha, beta=s["beta"], eps=eps, p=s["p"], regime=s["regime"])
            cfg = SolveConfig(params, grid, tau, T, snapshot_stride=10**9, max_steps=s["max_steps"])
            traj = solve(cfg, init)
            dev = max(r.relative_deviation for r in energy_series(traj.times, traj.energies))
            e1 = None
            if eps == 0:
                u, _ = oracle.linear_flow(init.psi.values(), init.eta.values(), grid.bounds, alpha, s["beta"], T)
                exact = forward_transform(u.real if params.is_real else u, grid)
                e1 = h_alpha_half_error(traj.final.psi, exact, alpha)
                print(f"alpha={alpha:g} eps=0: error vs exact linear flow at t={T:g}: {e1:.3e}")
            else:
                print(f"alpha={alpha:g} eps={eps:g}: t={traj.times[-1]:g}, energy deviation {dev:.3e}, "
                      f"max fixed-point iterations {traj.iters_max}")
            rows.append(dict(alpha=alpha, beta=s["beta"], eps=eps, p=s["p"], tau=tau,
                             N=grid.shape[0] if grid.dims == 1 else grid.shape, t_final=T, e1=e1,
                             e1_max=e1, energy_dev=dev, iters_max=traj.iters_max))
            np.savez(out / f"solve_alpha{alpha:g}_eps{eps:g}.npz", times=np.asarray(traj.times),
                     psi=traj.final.psi.values(), eta=traj.final.eta.values())
    _emit(rows, out / "solve.csv", s)


def cmd_converge_time(s, out):
    recs = run_temporal_study(_spec("temporal", s))
    _emit([csvio.record_row(r) for r in recs], out / "converge_time.csv", s, ("tau", "e1", "eps"))


def cmd_converge_space(s, out):
    recs = run_spatial_study(_spec("spatial", s))
    _emit([csvio.record_row(r) for r in recs], out / "converge_space.csv", s, ("N", "e1", "eps"))


def cmd_long_time(s, out):
    spec = _spec("long-time", s)
    curves = run_long_time_study(spec)
    rows = []
    for c in curves:
        for t, e, m in zip(c.times, c.e1, c.e1_max):
            rows.append(dict(alpha=c.alpha, beta=spec.beta, eps=c.eps, p=spec.p, tau=c.tau, N=spec.Ns[0],
                             t_final=t, e1=e, e1_max=m))
    _emit(rows, out / "long_time.csv", s, ("t_final", "e1_max", "eps"))
    _emit([csvio.record_row(r) for r in long_time_records(curves, spec)], out / "long_time_summary.csv", s)


def cmd_energy(s, out):
    spec = _spec("energy", s)
    studies = run_energy_study(spec)
    rows = []
    for st in studies:
        for r in st.series:
            rows.append(dict(alpha=st.alpha, beta=spec.beta, eps=st.eps, p=spec.p, tau=st.tau, N=spec.Ns[0],
                             t_final=r.time, energy_dev=r.relative_deviation))
    _emit(rows, out / "energy.csv", s, ("t_final", "energy_dev", "tau"))
    _emit([csvio.record_row(r) for r in energy_records(studies, spec)], out / "energy_summary.csv", s)


def cmd_oscillatory_table(s, out):
    import csv

    eps0 = s["eps"][0]
    lam0 = s["tau"][0]
    for alpha in s["alpha"]:
        spec = oscillatory_table_spec(alpha, eps0=eps0, lam0=lam0, N=s["N"][0], beta=s["beta"],
                                      data=s["data"], t_final=s["t_final"], workers=s["workers"],
                                      max_steps=s["max_steps"], tau_ref=s["tau_ref"])
        (tab,) = run_oscillatory_table(spec)
        stem = f"oscillatory_table_alpha{alpha:g}"
        _emit([csvio.record_row(r) for r in tab.records], out / f"{stem}.csv", s, ("tau", "e1", "eps"))
        layout = out / f"{stem}_layout.csv"
        with open(layout, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerows(tab.layout_rows())
        print(f"wrote {layout}")
        for row in tab.layout_rows():
            log.info("  ".join(f"{c:>10}" for c in row))


def cmd_dump_2d(s, out):
    spec = _spec("field-dump-2d", s)
    dumps = run_field_dump_2d(spec, output=out)
    rows = []
    for d in dumps:
        print(f"alpha={d.alpha:g}: {len(d.times)} snapshots up to t={d.times[-1]:g}, "
              f"max |Im psi| {d.max_imag:.1e}, energy deviation {d.energy_dev:.2e}")
        rows.append(dict(alpha=d.alpha, beta=spec.beta, eps=spec.eps_list[0], p=spec.p, tau=spec.steps[0],
                         N=spec.shape_2d, t_final=d.times[-1], energy_dev=d.energy_dev))
    _emit(rows, out / "dump2d.csv", s)


HANDLERS = {
    "solve": cmd_solve,
    "converge-time": cmd_converge_time,
    "converge-space": cmd_converge_space,
    "long-time": cmd_long_time,
    "energy": cmd_energy,
    "oscillatory-table": cmd_oscillatory_table,
    "dump-2d": cmd_dump_2d,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    level = logging.WARNING - 10 * max(args.verbose, getattr(args, "verbose", 0))
    logging.basicConfig(level=max(level, logging.DEBUG), format="%(levelname)s %(name)s: %(message)s")

    if args.check:
        from .acceptance import CRITERIA, run_all

        try:
            nums = [int(n) for n in args.criteria.split(",")] if args.criteria else None
            if nums and any(n not in CRITERIA for n in nums):
                raise ValueError
        except ValueError:
            print(f"fracklein: error: invalid value for criteria: {args.criteria!r}", file=sys.stderr)
            return 2
        results = run_all(nums, verbose=args.verbose > 0)
        return 0 if all(r.passed for r in results) else 1

    if args.command is None:
        parser.print_usage(sys.stderr)
        print("fracklein: error: a command is required (or --check)", file=sys.stderr)
        return 2
    try:
        settings = resolve_settings(args)
        out = _output_dir(settings)
        HANDLERS[args.command](settings, out)
    except UsageError as exc:
        print(f"fracklein: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, GridError) as exc:
        print(f"fracklein: error: {exc}", file=sys.stderr)
        return 2
    except StepFailure as exc:
        print(f"fracklein: solver failure: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
