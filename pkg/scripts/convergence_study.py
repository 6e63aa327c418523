"""Finite-N vs continuum convergence study for one or more coupling strengths.

    python scripts/convergence_study.py --config configs/headline.yaml --K 1 3 --out out/convergence

Writes errors.csv / summary.csv / fit.csv per K and prints the fitted exponents.
"""

import argparse
import dataclasses
import time
from pathlib import Path

from kuramoto_moments.config import load_config
from kuramoto_moments.harness import emit_report, run_convergence_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", type=Path, default=Path("configs/headline.yaml"))
    ap.add_argument("--K", type=float, nargs="+", default=[1.0, 3.0])
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--out", type=Path, default=Path("out/convergence"))
    args = ap.parse_args()

    base = load_config(args.config)
    if args.trials is not None:
        base = dataclasses.replace(base, experiment=dataclasses.replace(base.experiment, trials=args.trials))
    for K in args.K:
        cfg = dataclasses.replace(base, K=K)
        start = time.perf_counter()
        report = run_convergence_experiment(cfg)
        emit_report(report, args.out / f"K{K:g}", cfg)
        print(f"K={K:g}  ({time.perf_counter() - start:.0f} s)")
        for (m, k, t), fit in report.fits.items():
            print(f"  Z^{m}_{k}  t={t:<5g} p={fit.p:+.3f} +- {fit.stderr:.3f}")


if __name__ == "__main__":
    main()
