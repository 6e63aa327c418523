"""Picard successive differences against the factorial bound.

    python scripts/picard_study.py --K 1 --T 1 --iters 30
"""

import argparse
from pathlib import Path

import numpy as np

from kuramoto_moments import csvio
from kuramoto_moments.continuum import picard_iterate
from kuramoto_moments.measures import (GaussianFrequency, MeasureSpec, WrappedGaussianPhase,
                                       build_discretization)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--K", type=float, default=1.0)
    ap.add_argument("--T", type=float, default=1.0)
    ap.add_argument("--points", type=int, default=10001)
    ap.add_argument("--iters", type=int, default=30)
    ap.add_argument("--out", type=Path, default=Path("out/picard.csv"))
    args = ap.parse_args()

    spec = MeasureSpec(WrappedGaussianPhase(0.0, 1.0), GaussianFrequency())
    h = build_discretization(spec, 10, 32)
    res = picard_iterate(h, args.K, None, np.linspace(0, args.T, args.points), args.iters,
                         keep_iterates=False)
    bound = res.factorial_bound(args.K)
    rows = list(zip(range(1, args.iters + 1), res.diffs, bound))
    for n, d, b in rows:
        print(f"n={n:<3d} d_n={d:.3e}  bound={b:.3e}")
    csvio.write_csv(args.out, ["n", "d_n", "bound"], rows)


if __name__ == "__main__":
    main()
