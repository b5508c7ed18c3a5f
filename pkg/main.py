# -*- coding: utf-8 -*-
"""
Meta Distribution Toolkit - command line

    python main.py <mode> --config experiment.json [--seed N] [--n N] [--out PATH] [--workers N]
    python main.py figures [--out DIR] [--n N] [--seed N] [--workers N]

The CSV goes to --out (or the config's "out") and to stdout otherwise;
progress lines go to stderr. Exit status: 0 ok, 2 invalid config,
1 numerical failure.
"""

import argparse
import logging
import os
import sys

from dotenv import load_dotenv

from errors import ConfigError, MetaDistError
from experiment_config import MODES, ExperimentConfig, env_int, with_cli_overrides, with_env_overrides
from experiments import run_experiment, write_csv

load_dotenv()


def configure_logging():
    level = os.getenv("METADIST_LOG_LEVEL", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="metadist",
                                     description="SIR meta distribution of general cellular networks")
    sub = parser.add_subparsers(dest="mode", required=True)

    for mode in MODES:
        p = sub.add_parser(mode, help=f"run the {mode} experiment")
        p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--seed", type=int, help="master seed (overrides METADIST_SEED and config)")
        p.add_argument("--n", type=int, help="number of realizations")
        p.add_argument("--out", help="CSV output path")
        p.add_argument("--workers", type=int, help="worker processes (overrides METADIST_WORKERS)")

    p = sub.add_parser("figures", help="regenerate figure data at reduced n")
    p.add_argument("--out", default="figures_out", help="output directory")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    return parser


def _status(message: str):
    print(message, file=sys.stderr)


def run_mode(args) -> int:
    config = ExperimentConfig.load(args.config, mode=args.mode)
    config = with_env_overrides(config)
    config = with_cli_overrides(config, seed=args.seed, n=args.n, out=args.out, workers=args.workers)

    _status("=" * 80)
    _status(f"MODE {config.mode.upper()} | tiers: {', '.join(t.kind.name for t in config.tiers)} "
            f"| n = {config.n} | seed = {config.seed}")
    _status("=" * 80)

    result = run_experiment(config)
    if config.out:
        _status(f"✓ {len(result.rows)} rows written to {config.out}")
    else:
        write_csv(result, sys.stdout)
        _status(f"✓ {len(result.rows)} rows")
    return 0


def run_figures_mode(args) -> int:
    from figures import FIGURE_N, run_figures

    seed = args.seed if args.seed is not None else (env_int("METADIST_SEED") or 0)
    run_figures(args.out, n=args.n or FIGURE_N, seed=seed, workers=args.workers)
    return 0


def main(argv=None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.mode == "figures":
            return run_figures_mode(args)
        return run_mode(args)
    except ConfigError as e:
        _status(f"✗ invalid config [{e.field}]: {e}")
        return 2
    except MetaDistError as e:
        _status(f"✗ {e.module} failed ({type(e).__name__}): {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
