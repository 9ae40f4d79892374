"""Command-line entry point: run a configured experiment.

Usage:
    llns1d run <config-file> [--seed N] [--ensemble N]
               [--engine pde|dsmc] [--scheme S] [--output DIR]

Exits 0 on success.  On failure, prints a single machine-readable line
`error: <message>` to stderr and exits nonzero.
"""
import argparse
import sys

from llns1d.config import load_config
from llns1d.experiments import run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="llns1d",
        description="Fluctuating-hydrodynamics experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one configured experiment")
    run.add_argument("config", help="path to a key=value config file")
    run.add_argument("--seed", type=int, default=None,
                     help="override the base random seed")
    run.add_argument("--ensemble", type=int, default=None,
                     help="override the ensemble size")
    run.add_argument("--engine", choices=("pde", "dsmc"), default=None,
                     help="override the simulation engine")
    run.add_argument("--scheme", default=None,
                     help="override the grid-solver scheme")
    run.add_argument("--output", default=None,
                     help="override the output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        cfg = cfg.with_overrides(seed=args.seed, ensemble=args.ensemble,
                                 engine=args.engine, scheme=args.scheme,
                                 output=args.output)
        result = run_experiment(cfg)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for name, path in sorted(result.paths.items()):
        print(f"{name}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
