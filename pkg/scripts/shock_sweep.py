#!/usr/bin/env python3
"""Track the random walk of a standing shock under spontaneous fluctuations
and fit the effective diffusion coefficient across Mach numbers."""
import argparse
from pathlib import Path

from llns1d.config import load_config
from llns1d.experiments import ensemble_run, write_outputs

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def config_for(mach: float) -> Path:
    return CONFIG_DIR / f"shock_ma{round(mach * 10):02d}.cfg"


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--machs", nargs="+", type=float,
                   default=[1.2, 1.4, 2.0])
    p.add_argument("--dsmc", action="store_true",
                   help="also run the particle engine")
    p.add_argument("--members", type=int, default=None,
                   help="override the configured ensemble size")
    p.add_argument("--quick", action="store_true",
                   help="16 members instead of the configured ensemble")
    p.add_argument("--output", default=None, help="output directory root")
    args = p.parse_args()

    members = 16 if args.quick else args.members
    engines = ["pde"] + (["dsmc"] if args.dsmc else [])

    print(f"{'mach':>5} {'engine':>7} {'D_rho [cm^2/s]':>15} "
          f"{'D_P [cm^2/s]':>15}")
    for mach in args.machs:
        base = load_config(config_for(mach))
        if members:
            base = base.with_overrides(ensemble=members)
        for engine in engines:
            out = args.output and str(
                Path(args.output) / f"ma{round(mach * 10):02d}_{engine}")
            cfg = base.with_overrides(engine=engine, output=out)
            result = ensemble_run(cfg)
            d_rho = result.shock_diffusion()
            d_p = result.shock_diffusion(pressure=True)
            print(f"{mach:5.1f} {engine:>7} {d_rho:15.4e} {d_p:15.4e}")
            if out:
                write_outputs(result)


if __name__ == "__main__":
    main()
