"""Sweep the X_eps family: periods, volume, length, bounds and (optionally) the simulated bracket.

    python scripts/xeps_sweep.py --eps 0.05 0.1 0.25 0.45 --simulate --grid 512 --csv sweep.csv
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from dataclasses import dataclass, field

from realdivisor.bergman import abel_jacobi_real_polyline, ell_integral, real_locus_length
from realdivisor.bounds import K_HALF, QUARTER_SCALE, add_simulation, curve_bounds
from realdivisor.curves import family_a_eps
from realdivisor.jacobian import vol_real
from realdivisor.numerics import QuadratureSpec
from realdivisor.periods import compute_periods
from realdivisor.torus_sim import min_cover_m, rasterize


@dataclass
class SweepConfig:
    eps: list[float] = field(default_factory=lambda: [0.01, 0.05, 0.1, 0.25, 0.45, 0.65, 0.95])
    simulate: bool = False
    grid: int = 512
    tol: float = 1e-10


def sweep_row(eps: float, cfg: SweepConfig) -> dict:
    spec = QuadratureSpec(cfg.tol, cfg.tol)
    curve = family_a_eps(eps)
    t0 = time.perf_counter()
    p = compute_periods(curve, spec)
    jac = vol_real(p)
    length = real_locus_length(curve, p, spec)
    poly = abel_jacobi_real_polyline(curve, p, max(1024, 4 * cfg.grid), spec)
    rep = curve_bounds(curve, spec, p, jac, length, eps, poly[0])
    row = {"eps": eps, "T11": p.T[0, 0], "T22": p.T[1, 1], "vol": jac.vol_total,
           "length": length, "quarter_length": QUARTER_SCALE * length,
           "ell": ell_integral(eps, spec), "K_over_sqrt_eps": K_HALF / math.sqrt(eps)}
    for e in rep.entries:
        row[e.name] = e.value
    if cfg.simulate:
        m_lo, m_hi = min_cover_m(rasterize(poly, cfg.grid), 1)
        add_simulation(rep, m_lo, m_hi, cfg.grid)
        row.update(sim_lower=m_lo, sim_upper=m_hi)
    row["sandwich"] = rep.sandwich_consistent()
    row["seconds"] = time.perf_counter() - t0
    return row


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps", type=float, nargs="+")
    ap.add_argument("--simulate", action="store_true")
    ap.add_argument("--grid", type=int, default=512)
    ap.add_argument("--tol", type=float, default=1e-10)
    ap.add_argument("--csv", help="write all columns to this file")
    args = ap.parse_args(argv)
    cfg = SweepConfig(simulate=args.simulate, grid=args.grid, tol=args.tol)
    if args.eps:
        cfg.eps = args.eps
    rows = [sweep_row(e, cfg) for e in cfg.eps]
    cols = ["eps", "vol", "length", "K_over_sqrt_eps", "rectangle", "two_torsion_box",
            "rhombus_sharp", "rhombus", "uniform"] + (["sim_lower", "sim_upper"] if cfg.simulate else [])
    print("  ".join(f"{c:>15s}" for c in cols))
    for r in rows:
        print("  ".join(f"{r[c]:15.6g}" for c in cols))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return 0 if all(r["sandwich"] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
