"""Command-line entry point: ``rsslocate trial`` and ``rsslocate sweep``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from rsslocate.errors import DomainError
from rsslocate.export import (
    figure_filename,
    table_filename,
    write_cells,
    write_figure,
    write_table,
    write_trial_bundle,
)
from rsslocate.montecarlo import AXES, FIGURES, TABLES, SweepSpec, default_jobs, run_sweep
from rsslocate.pathloss import PathLossParams
from rsslocate.simulation import TrialConfig, run_trial
from rsslocate.trajectory import GridMap, Strategy

log = logging.getLogger("rsslocate")

SEED_ENV = "RSS_LOCATE_SEED"

EXIT_OK = 0
EXIT_TRIAL_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

DEFAULTS = {
    "strategy": None,  # trial: corner, sweep: both
    "true_n": 3.0,
    "sigma": 3.0,
    "r0": -27.0,
    "seed": 0,
    "trials": 100,
    "duration_s": 150,
    "map_size": 45,
    "table": [],
    "figure": [],
    "all": False,
    "out": ".",
    "jobs": None,
}


def _bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int_list(text):
    return [int(v) for v in str(text).replace(",", " ").split()]


# config-file key -> converter; keys are flag names without the leading dashes
CONFIG_TYPES = {
    "strategy": str,
    "true-n": float,
    "sigma": float,
    "r0": float,
    "seed": int,
    "trials": int,
    "duration-s": int,
    "map-size": int,
    "table": _int_list,
    "figure": _int_list,
    "all": _bool,
    "out": str,
    "jobs": int,
}


def read_config(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.lstrip("-")
        if key not in CONFIG_TYPES:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        values[key.replace("-", "_")] = CONFIG_TYPES[key](value)
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # defaults are SUPPRESSed so that config-file values can sit underneath flags
    sup = argparse.SUPPRESS
    common.add_argument("--config", default=None, help="flat key = value file; flags override it")
    common.add_argument("--strategy", choices=[s.value for s in Strategy], default=sup)
    common.add_argument("--true-n", type=float, default=sup, help="true path-loss exponent (default 3)")
    common.add_argument("--sigma", type=float, default=sup, help="shadow noise std in dB (default 3)")
    common.add_argument("--r0", type=float, default=sup, help="RSS at 1 m in dBm (default -27)")
    common.add_argument("--seed", type=int, default=sup, help=f"master seed (fallback: ${SEED_ENV}, then 0)")
    common.add_argument("--duration-s", type=int, default=sup, help="trial length in 1 s epochs (default 150)")
    common.add_argument("--map-size", type=int, default=sup, help="lattice points per axis (default 45)")
    common.add_argument("--out", default=sup, help="output directory (default .)")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="rsslocate", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("trial", parents=[common], help="run one trial and dump its CSV bundle")
    sweep = sub.add_parser("sweep", parents=[common], help="run table/figure sweeps")
    sweep.add_argument("--trials", type=int, default=sup, help="trials per cell (default 100)")
    sweep.add_argument("--table", type=int, action="append", choices=sorted(TABLES), default=sup)
    sweep.add_argument("--figure", type=int, action="append", choices=sorted(FIGURES), default=sup)
    sweep.add_argument("--all", action="store_true", default=sup, help="every table and figure")
    sweep.add_argument("--jobs", type=int, default=sup, help="worker processes (default: available cores)")
    return parser


def resolve(args: argparse.Namespace, parser: argparse.ArgumentParser, environ=None) -> dict:
    """Merge defaults < environment seed < config file < flags, then validate."""
    environ = os.environ if environ is None else environ
    cfg = dict(DEFAULTS)
    if environ.get(SEED_ENV):
        try:
            cfg["seed"] = int(environ[SEED_ENV])
        except ValueError:
            parser.error(f"${SEED_ENV} is not an integer: {environ[SEED_ENV]!r}")
    if args.config:
        try:
            cfg.update(read_config(args.config))
        except (OSError, ValueError) as exc:
            parser.error(f"config file: {exc}")
    cfg.update({k: v for k, v in vars(args).items() if k in DEFAULTS})
    cfg["command"] = args.command
    cfg["verbose"] = args.verbose

    if not cfg["true_n"] > 0:
        parser.error("--true-n must be > 0")
    if not cfg["sigma"] >= 0:
        parser.error("--sigma must be >= 0")
    if cfg["duration_s"] < 3:
        parser.error("--duration-s must be >= 3")
    if cfg["map_size"] < 2:
        parser.error("--map-size must be >= 2")
    if cfg["trials"] < 1:
        parser.error("--trials must be >= 1")
    if cfg["jobs"] is not None and cfg["jobs"] < 1:
        parser.error("--jobs must be >= 1")
    if cfg["strategy"] is not None and cfg["strategy"] not in {s.value for s in Strategy}:
        parser.error(f"unknown strategy {cfg['strategy']!r}")
    if any(t not in TABLES for t in cfg["table"]) or any(f not in FIGURES for f in cfg["figure"]):
        parser.error("--table must be 1..6 and --figure 1..3")
    if args.command == "sweep" and not (cfg["all"] or cfg["table"] or cfg["figure"]):
        parser.error("sweep needs --table, --figure or --all")
    return cfg


def cmd_trial(cfg: dict) -> int:
    channel = PathLossParams(r0=cfg["r0"], n=cfg["true_n"], sigma=cfg["sigma"])
    config = TrialConfig(
        channel=channel,
        strategy=Strategy(cfg["strategy"] or Strategy.CORNER),
        seed=cfg["seed"],
        map=GridMap(cfg["map_size"]),
        duration_s=cfg["duration_s"],
    )
    result = run_trial(config)
    try:
        write_trial_bundle(cfg["out"], result)
    except OSError as exc:
        print(f"rsslocate: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    if result.failed:
        print(f"trial failed: {result.error}")
        return EXIT_TRIAL_FAILED
    est = result.estimate.estimate
    print(
        f"n_opt={result.n_opt:.1f} error_m={result.position_error_m:.6g} "
        f"bs=({result.true_bs[0]:g},{result.true_bs[1]:g}) est=({est.x:.4f},{est.y:.4f}) "
        f"measurements={len(result.measurements)}"
    )
    return EXIT_OK


def cmd_sweep(cfg: dict) -> int:
    tables = sorted(TABLES) if cfg["all"] else sorted(set(cfg["table"]))
    figures = sorted(FIGURES) if cfg["all"] else sorted(set(cfg["figure"]))
    axes = sorted({TABLES[t][0] for t in tables} | {FIGURES[f] for f in figures}, key=list(AXES).index)
    strategies = (
        (Strategy(cfg["strategy"]),) if cfg["strategy"] else (Strategy.RANDOM, Strategy.CORNER)
    )
    spec = SweepSpec(
        trials_per_cell=cfg["trials"],
        strategies=strategies,
        base_seed=cfg["seed"],
        base=PathLossParams(r0=cfg["r0"], n=cfg["true_n"], sigma=cfg["sigma"]),
        axes=tuple(axes),
        map=GridMap(cfg["map_size"]),
        duration_s=cfg["duration_s"],
    )
    jobs = cfg["jobs"] or default_jobs()
    result = run_sweep(spec, jobs=jobs)
    out = Path(cfg["out"])
    try:
        out.mkdir(parents=True, exist_ok=True)
        written = [write_table(out / table_filename(t), result, t) for t in tables]
        written += [write_figure(out / figure_filename(f), result, f) for f in figures]
        written.append(write_cells(out / "cells.csv", result))
    except OSError as exc:
        print(f"rsslocate: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    flagged = [c for c in result.cells.values() if c.flagged]
    for c in flagged:
        log.warning("cell %s has %d/%d failed trials", c.key, c.failed, c.trials)
    for path in written:
        print(path)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = resolve(args, parser)
    level = logging.WARNING - 10 * min(cfg["verbose"], 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        if cfg["command"] == "trial":
            return cmd_trial(cfg)
        return cmd_sweep(cfg)
    except DomainError as exc:
        print(f"rsslocate: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
