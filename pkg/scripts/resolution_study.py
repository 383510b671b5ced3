"""Simulated N(X) bracket as the torus grid is refined.

    python scripts/resolution_study.py --eps 0.25 --grids 128 256 512 1024
    python scripts/resolution_study.py --m-curve 0 1 2 3 4 5
"""

from __future__ import annotations

import argparse
import sys
import time

from realdivisor.bergman import abel_jacobi_real_polyline
from realdivisor.curves import family_a_eps, make_m_curve
from realdivisor.periods import compute_periods
from realdivisor.torus_sim import min_cover_m, rasterize


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    src = ap.add_mutually_exclusive_group()
    src.add_argument("--eps", type=float, default=0.25)
    src.add_argument("--m-curve", type=float, nargs="+")
    ap.add_argument("--grids", type=int, nargs="+", default=[128, 256, 512, 1024])
    args = ap.parse_args(argv)
    curve = make_m_curve(args.m_curve) if args.m_curve else family_a_eps(args.eps)
    p = compute_periods(curve)
    polys = abel_jacobi_real_polyline(curve, p, 4 * max(args.grids))
    print(f"{curve.curve_id()}")
    print(f"{'n':>6s} {'m_lower':>8s} {'m_upper':>8s} {'thin':>8s} {'thick':>8s} {'sec':>7s}")
    for n in args.grids:
        t0 = time.perf_counter()
        grid = rasterize(polys, n)
        lo, hi = min_cover_m(grid, curve.n_ovals)
        print(f"{n:6d} {lo:8d} {hi:8d} {grid.count():8d} {grid.count(True):8d} "
              f"{time.perf_counter() - t0:7.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
