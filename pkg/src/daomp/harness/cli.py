"""Command line entry point: ``python -m daomp.harness {sweep,trace,replot}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import ConfigError, ExperimentConfig, load_config
from .experiment import run_sweep
from .output import emit_outputs, replot
from .presets import PRESETS
from .trace import trace_experiment, write_trace

EXIT_CONFIG = 2
EXIT_IO = 3

log = logging.getLogger("daomp")


def _resolve(args) -> ExperimentConfig:
    if args.config and args.preset:
        raise ConfigError("use either --config or --preset, not both")
    if args.config:
        cfg = load_config(args.config)
    elif args.preset:
        if args.preset not in PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r}; choose from {sorted(PRESETS)}")
        cfg = PRESETS[args.preset]()
    else:
        cfg = ExperimentConfig()
    overrides = {}
    for item in args.set or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    if args.seed is not None:
        overrides["run.seed"] = str(args.seed)
    if args.workers is not None:
        overrides["run.workers"] = str(args.workers)
    if args.out is not None:
        overrides["run.out"] = args.out
    if args.solver is not None:
        overrides["solver.list"] = args.solver
    if args.trials is not None:
        overrides["run.trials"] = str(args.trials)
    return cfg.with_overrides(overrides)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="key=value experiment file")
    p.add_argument("--preset", help=f"built-in configuration ({', '.join(sorted(PRESETS))})")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--out", help="output directory")
    p.add_argument("--solver", help="comma-separated solver ids")
    p.add_argument("--trials", type=int, help="trials per sweep point")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="daomp", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a Monte-Carlo NMSE sweep")
    _add_common(p)
    p.add_argument("--no-plot", action="store_true", help="write the CSV only")

    p = sub.add_parser("trace", help="dump per-iteration correlations for one trial")
    _add_common(p)
    p.add_argument("--trial", type=int, default=0)

    p = sub.add_parser("replot", help="regenerate the SVG from a sweep CSV")
    p.add_argument("csv", type=Path)
    p.add_argument("--out", type=Path, help="SVG path (default: next to the CSV)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "replot":
            path = replot(args.csv, args.out)
            print(path)
            return 0
        cfg = _resolve(args)
        if args.command == "sweep":
            result = run_sweep(cfg)
            formats = ("csv",) if args.no_plot else ("csv", "plot")
            for path in emit_outputs(result, cfg.out_dir, formats).values():
                print(path)
        else:
            res = trace_experiment(cfg, trial=args.trial)
            for path in write_trace(res, cfg.out_dir, name=cfg.name).values():
                print(path)
            for window in res.estimates:
                print(f"{window}: stopped at i={res.stop_iteration(window)}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
