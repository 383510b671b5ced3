"""Write one SVG per eps showing the Abel-Jacobi image of X_eps(R) over a fundamental domain.

    python scripts/figure_panels.py --out figures/
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

from realdivisor.bergman import abel_jacobi_real_polyline
from realdivisor.curves import family_a_eps
from realdivisor.periods import compute_periods
from realdivisor.plotting import polylines_svg


@dataclass
class PanelConfig:
    eps: list[float] = field(default_factory=lambda: [0.95, 0.65, 0.45, 0.25, 0.05])
    n_samples: int = 2048
    out: Path = Path("figures")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--eps", type=float, nargs="+")
    ap.add_argument("--samples", type=int, default=2048)
    ap.add_argument("--out", default="figures")
    args = ap.parse_args(argv)
    cfg = PanelConfig(n_samples=args.samples, out=Path(args.out))
    if args.eps:
        cfg.eps = args.eps
    cfg.out.mkdir(parents=True, exist_ok=True)
    for eps in cfg.eps:
        curve = family_a_eps(eps)
        p = compute_periods(curve)
        polys = abel_jacobi_real_polyline(curve, p, cfg.n_samples)
        path = cfg.out / f"xeps_{eps:g}.svg"
        path.write_text(polylines_svg(polys, p.T, f"eps = {eps:g}"))
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
