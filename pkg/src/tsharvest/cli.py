"""Command-line entry point: ``tsharvest <command> [options]``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 simulation overflow.
"""

import argparse
import datetime
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import experiments
from .analytics import RegimeTag, capacity_A, classify, critical_sigma, policy_from_capacity, sensitivities
from .config import FORMATS, ExperimentConfig, config_hash, load_config, to_dict
from .errors import (
    ConfigError,
    DomainError,
    NoPolicyError,
    NumericalError,
    RegimeError,
    SimulationError,
)
from .output import ResultTable, build_id, write_result
from .validation import run_validation

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OVERFLOW = 0, 2, 3, 4

COMMANDS = ("analyze", "table1", "yield-curve", "sweep-tau2", "sweep-sigma", "heatmap", "paths",
            "stability", "validate")


def _common_options():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="INI file with [model], [sim], [quad], [experiment]")
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    common.add_argument("--threads", type=int, help="worker threads (default: available CPUs)")
    common.add_argument("--out", help="output root directory")
    common.add_argument("--format", help="comma-separated subset of csv,json,svg")
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit wall-clock fields so reruns are byte-identical")
    common.add_argument("--label", help="run directory name (default: UTC timestamp)")
    for flag, dest in (("--h", "h"), ("--beta", "beta"), ("--lambda", "lam"), ("--sigma", "sigma"),
                       ("--tau2", "tau2"), ("--horizon", "horizon"), ("--dt", "dt")):
        common.add_argument(flag, dest=dest, type=float)
    common.add_argument("--paths", type=int, help="ensemble size")
    return common


def build_parser():
    parser = argparse.ArgumentParser(prog="tsharvest", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    helps = {
        "analyze": "threshold, regime, optimal policy and sigma0 for one parameter set",
        "table1": "analytic threshold and simulated time averages across efforts",
        "yield-curve": "expected sustainable yield Y(h) with its optimum",
        "sweep-tau2": "h* and Y* against the Gaussian noise intensity",
        "sweep-sigma": "h* and Y* against the jump intensity, with sigma0",
        "heatmap": "h* and Y* over the (beta, lambda) grid",
        "paths": "one trajectory per effort on a shared stream",
        "stability": "synchronous coupling decay and terminal W1 across initial states",
        "validate": "quadrature and sampler oracle suite",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def resolve_config(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    model_changes = {k: getattr(args, k) for k in ("h", "beta", "lam", "sigma", "tau2")
                     if getattr(args, k) is not None}
    sim_changes = {k: getattr(args, k) for k in ("horizon", "dt", "seed") if getattr(args, k) is not None}
    exp_changes = {}
    if args.paths is not None:
        exp_changes["n_paths"] = args.paths
    if args.threads is not None:
        exp_changes["threads"] = args.threads
    if args.out is not None:
        exp_changes["output_dir"] = args.out
    if args.format is not None:
        exp_changes["formats"] = tuple(f.strip() for f in args.format.split(",") if f.strip())
    try:
        model = cfg.model.with_(**model_changes) if model_changes else cfg.model
        sim = cfg.sim.replace(**sim_changes) if sim_changes else cfg.sim
        return ExperimentConfig(model=model, sim=sim, quad=cfg.quad,
                                experiment=replace(cfg.experiment, **exp_changes))
    except ConfigError:
        raise
    except (DomainError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def run_analyze(cfg):
    p, q = cfg.model, cfg.quad
    A = capacity_A(p, q)
    regime = classify(p, q)
    rows = [["A", A], ["phi", regime.phi], ["regime", regime.tag.value],
            ["mean_population", regime.phi / p.b if regime.tag is RegimeTag.PERSISTENT else None]]
    try:
        pol = policy_from_capacity(A, p.b)
        sens = sensitivities(p, q)
        rows += [["h_star", pol.h_star], ["y_star", pol.y_star],
                 ["dh_dtau2", sens.dh_dtau2], ["dY_dtau2", sens.dY_dtau2],
                 ["dh_dsigma", sens.dh_dsigma], ["dY_dsigma", sens.dY_dsigma]]
    except NoPolicyError:
        rows += [["h_star", None], ["y_star", None]]
    rows.append(["sigma0", critical_sigma(p.levy, q)])
    return ResultTable(["quantity", "value"], rows, meta={r[0]: r[1] for r in rows})


def dispatch(command, cfg, threads):
    if command == "analyze":
        return run_analyze(cfg)
    if command == "table1":
        return experiments.run_table1(cfg, threads)
    if command == "yield-curve":
        return experiments.run_yield_curve(cfg, threads=threads)
    if command == "sweep-tau2":
        return experiments.run_sweep_tau2(cfg)
    if command == "sweep-sigma":
        return experiments.run_sweep_sigma(cfg)
    if command == "heatmap":
        return experiments.run_heatmaps(cfg, threads)
    if command == "paths":
        return experiments.run_paths_figure(cfg)
    if command == "stability":
        if classify(cfg.model, cfg.quad).tag is not RegimeTag.PERSISTENT:
            raise RegimeError("stability check needs persistent parameters")
        return experiments.run_stability_check(cfg, threads)
    if command == "validate":
        return run_validation(cfg.sim.seed, cfg.experiment.validate_increments, cfg.sim.dt, cfg.sim.eps)
    raise ConfigError(f"unknown command {command!r}")


def _summary_lines(command, table):
    if command in ("analyze", "validate", "table1"):
        lines = [",".join(table.columns)]
        lines += [",".join("" if v is None else f"{v:.6g}" if isinstance(v, float) else str(v) for v in row)
                  for row in table.rows]
        return lines
    return [f"{k}: {v}" for k, v in sorted(table.meta.items()) if not isinstance(v, dict)]


def run(argv=None):
    args = build_parser().parse_args(argv)
    cfg = resolve_config(args)
    threads = cfg.experiment.threads or os.cpu_count() or 1
    started = datetime.datetime.now(datetime.timezone.utc)
    t0 = time.perf_counter()
    table = dispatch(args.command, cfg, threads)
    duration = time.perf_counter() - t0

    stamp = None if args.no_timestamp else started.strftime("%Y-%m-%dT%H:%M:%SZ")
    label = args.label or (started.strftime("%Y%m%dT%H%M%SZ") if stamp else "run")
    table.provenance = {"config_hash": config_hash(cfg), "seed": cfg.sim.seed, "build_id": build_id()}
    meta = {
        "command": args.command,
        "config": to_dict(cfg),
        "provenance": dict(table.provenance, timestamp=stamp),
        "duration_seconds": None if args.no_timestamp else round(duration, 3),
        "threads": threads,
        "units": table.units,
        "results": table.meta,
    }
    out_dir = Path(cfg.experiment.output_dir) / args.command / label
    formats = set(cfg.experiment.formats) & set(FORMATS)
    figures = experiments.figures_for(args.command, table, stamp) if "svg" in formats else {}
    written = write_result(table, out_dir, formats, meta, figures)
    for line in _summary_lines(args.command, table):
        print(line)
    print(f"wrote {len(written)} files to {out_dir}")
    if args.command == "validate" and table.meta["n_failed"]:
        print(f"{table.meta['n_failed']} oracle checks failed", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def main(argv=None):
    try:
        return run(argv)
    except SimulationError as exc:
        print(f"simulation overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, DomainError, RegimeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
