#!/usr/bin/env python3
"""Measure the density time-autocorrelation of spontaneous equilibrium
fluctuations and compare it with the hydrodynamic mode decomposition."""
import argparse
from pathlib import Path

import numpy as np

from llns1d.config import load_config
from llns1d.experiments import ensemble_run, write_outputs
from llns1d.stats import TimeCorrTheory, theory_time_correlation

CONFIG = Path(__file__).resolve().parents[1] / "configs" \
    / "time_correlation.cfg"


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--config", type=Path, default=CONFIG)
    p.add_argument("--dsmc", action="store_true",
                   help="also run the particle engine")
    p.add_argument("--quick", action="store_true",
                   help="1/20 of the configured samples")
    p.add_argument("--output", default=None, help="output directory root")
    args = p.parse_args()

    base = load_config(args.config)
    if args.quick:
        base = base.with_overrides(steps=base.steps // 20,
                                   warmup=base.warmup // 4,
                                   max_lag=base.max_lag // 4)

    engines = ["pde"] + (["dsmc"] if args.dsmc else [])
    lags = np.arange(0, base.max_lag + 1, base.lag_stride)
    curves = {}
    dt = None
    theory = None
    for engine in engines:
        out = args.output and str(Path(args.output) / engine)
        cfg = base.with_overrides(engine=engine, output=out)
        result = ensemble_run(cfg)
        curves[engine] = result.acc.time_correlation(lags)
        dt = result.dt
        if theory is None:
            theory = TimeCorrTheory.from_state(result.gas, result.grid,
                                               cfg.state_rho, cfg.state_T,
                                               n=cfg.mode_n)
        if out:
            write_outputs(result)

    taus = lags * base.sample_every * dt
    ref = theory_time_correlation(taus, theory)
    head = f"{'tau [ns]':>9} {'theory':>9} " + " ".join(
        f"{e:>9}" for e in engines)
    print(head)
    for i, tau in enumerate(taus):
        row = " ".join(f"{curves[e][i]:9.4f}" for e in engines)
        print(f"{tau * 1e9:9.3f} {ref[i]:9.4f} {row}")
    for engine in engines:
        err = np.max(np.abs(curves[engine] - ref))
        print(f"max |measured - theory| ({engine}): {err:.4f}")


if __name__ == "__main__":
    main()
