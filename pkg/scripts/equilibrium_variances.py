#!/usr/bin/env python3
"""Measure equilibrium conserved-variable variances for each scheme and
compare with the closed-form predictions."""
import argparse
from pathlib import Path

from llns1d.config import load_config
from llns1d.experiments import ensemble_run, write_outputs
from llns1d.stats import theory_variances

CONFIG = Path(__file__).resolve().parents[1] / "configs" / "equilibrium.cfg"


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--config", type=Path, default=CONFIG)
    p.add_argument("--schemes", nargs="+",
                   default=["rk3", "maccormack", "ppm"])
    p.add_argument("--dsmc", action="store_true",
                   help="also run the particle engine")
    p.add_argument("--quick", action="store_true",
                   help="1/20 of the configured samples")
    p.add_argument("--output", default=None, help="output directory root")
    args = p.parse_args()

    base = load_config(args.config)
    if args.quick:
        base = base.with_overrides(steps=base.steps // 20,
                                   warmup=base.warmup // 4)
    runs = [("pde", s) for s in args.schemes]
    if args.dsmc:
        runs.append(("dsmc", base.scheme))

    print(f"{'engine':8} {'scheme':11} {'rho ratio':>10} {'J ratio':>10} "
          f"{'E ratio':>10}")
    for engine, scheme in runs:
        label = scheme if engine == "pde" else "-"
        out = args.output and str(Path(args.output) / f"{engine}_{label}")
        cfg = base.with_overrides(engine=engine, scheme=scheme, output=out)
        result = ensemble_run(cfg)
        th = theory_variances(result.gas, result.grid, cfg.state_rho,
                              cfg.state_T, u_bar=cfg.state_u)
        ratios = [result.acc.variance(n).mean() / t
                  for n, t in zip(("rho", "J", "E"), th)]
        print(f"{engine:8} {label:11} " + " ".join(f"{r:10.4f}"
                                                   for r in ratios))
        if out:
            write_outputs(result)


if __name__ == "__main__":
    main()
