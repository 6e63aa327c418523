"""Error of the truncated moments system against the continuum solver.

    python scripts/truncation_study.py --K 1 --t 2 --sizes 8 16 24 32

For each M_max = K_max the lattice is started from the same discretized h as
the characteristic solver, and | |Z^0_1| - |Z^0_1,ref| | is printed at t.
"""

import argparse
from pathlib import Path

from kuramoto_moments import csvio
from kuramoto_moments.continuum import integrate_characteristics_at
from kuramoto_moments.errors import LatticeBlowUpError
from kuramoto_moments.measures import (GaussianFrequency, MeasureSpec, WrappedGaussianPhase,
                                       build_discretization)
from kuramoto_moments.momentsys import init_lattice, integrate_moments
from kuramoto_moments.orthopoly import recurrence_coefficients


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--K", type=float, default=1.0)
    ap.add_argument("--t", type=float, default=2.0)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--concentration", type=float, default=1.0)
    ap.add_argument("--sizes", type=int, nargs="+", default=[8, 16, 24, 32])
    ap.add_argument("--out", type=Path, default=Path("out/truncation.csv"))
    args = ap.parse_args()

    spec = MeasureSpec(WrappedGaussianPhase(0.0, args.concentration), GaussianFrequency())
    h = build_discretization(spec, 40, 128)
    ref = integrate_characteristics_at(h, args.K, None, [0.0, args.t], args.dt).order_parameter[-1]
    coeffs = recurrence_coefficients(spec.frequency, max(args.sizes))
    rows = []
    for M in args.sizes:
        lat = init_lattice(h, coeffs, M, M, args.K)
        try:
            Z = integrate_moments(lat, args.t, args.dt, stride=10 ** 9).Z[-1, 0, 1]
            err = abs(abs(Z) - abs(ref))
        except LatticeBlowUpError as exc:
            print(f"M={M}: {exc}")
            err = float("inf")
        rows.append((M, err))
        print(f"M=K={M:<3d} error {err:.3e}")
    csvio.write_csv(args.out, ["M_max", "error"], rows)


if __name__ == "__main__":
    main()
