"""Lower and upper bounds on the totally real divisor threshold N(X).

Every entry records whether the hypotheses of its argument hold for the
curve at hand (``applies``) and whether its derivation is carried out in the
canonical metric used throughout this package (``certified``).  Closed-form
values for the one-parameter curve X_eps that are expressed through the
quarter-scale frame theta/4 are kept for comparison and marked uncertified.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .bergman import (TorusPolyline, family_a_frame_prefactors, orthonormal_frame,
                      real_locus_length)
from .curves import RealHyperellipticCurve, eps_of, family_a_eps
from .jacobian import RealJacobianReport, vol_real
from .numerics import (QuadratureSpec, SingularIntegrand, Singularity, complete_elliptic_K,
                       incomplete_elliptic_F, integrate_singular)
from .periods import ComessattiPeriods, compute_periods
from .torus_sim import convexity_scan

K_HALF = complete_elliptic_K(0.5)  # K at modulus sqrt(2)/2

# theta/4: the frame in which the closed-form prefactors (sqrt(eps)/4) h_j are
# expressed; lengths measured in it are a quarter of the canonical ones
QUARTER_SCALE = 0.25


@dataclass(frozen=True)
class BoundEntry:
    name: str
    kind: str  # "lower" or "upper"
    value: float
    validity: str
    provenance: str
    applies: bool = True
    certified: bool = True

    def __post_init__(self):
        if self.kind not in ("lower", "upper"):
            raise ValueError(f"kind must be 'lower' or 'upper', got {self.kind!r}")


@dataclass
class BoundReport:
    curve_id: str
    entries: list[BoundEntry] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def get(self, name: str) -> BoundEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def best(self, kind: str, certified_only: bool = False) -> float | None:
        vals = [e.value for e in self.entries if e.kind == kind and e.applies
                and (e.certified or not certified_only)]
        if not vals:
            return None
        return max(vals) if kind == "lower" else min(vals)

    def sandwich_consistent(self) -> bool:
        lo, hi = self.best("lower"), self.best("upper")
        return lo is None or hi is None or lo <= hi

    def to_dict(self) -> dict:
        return {
            "curve_id": self.curve_id,
            "entries": [asdict(e) for e in self.entries],
            "sandwich_consistent": self.sandwich_consistent(),
            "diagnostics": self.diagnostics,
        }

    def to_table(self) -> str:
        rows = [("name", "kind", "value", "applies", "certified", "validity")]
        for e in self.entries:
            rows.append((e.name, e.kind, f"{e.value:.6g}", "yes" if e.applies else "no",
                         "yes" if e.certified else "no", e.validity))
        widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        lines.append(f"sandwich consistent: {self.sandwich_consistent()}")
        return "\n".join(lines)


def lower_bound_thmC(g: int, r: int, vol0: float, len_: float) -> float:
    """Volume/length lower bound valid for any number r >= 1 of ovals.

    At r = 1 it reduces to vol0^(1/g) / len - 1.
    """
    if g < 1 or r < 1 or not vol0 > 0 or not len_ > 0:
        raise ValueError("need g >= 1, r >= 1, vol0 > 0, len > 0")
    if r == 1:
        # algebraically identical, and exact in floating point
        return vol0 ** (1.0 / g) / len_ - 1
    binom = ((r - 1) / math.e) ** (g * (r - 1))
    inner = (r / 2) ** g * binom * vol0 / len_ ** g
    return 2.0 * (1 - r + inner ** (1.0 / (g * r))) - 1


def lower_bound_r1(g: int, vol: float, len_: float) -> float:
    """Volume/length lower bound for curves with a connected real locus."""
    if g < 1 or not vol > 0 or not len_ > 0:
        raise ValueError("need g >= 1, vol > 0, len > 0")
    return vol ** (1.0 / g) / len_


def upper_bound_many_ovals(g: int, r: int) -> float | None:
    """2g - 1 when the real locus has g or g + 1 ovals, otherwise None."""
    if r in (g, g + 1):
        return float(2 * g - 1)
    return None


def _even_ceiling(x: float) -> float:
    return float(2 * math.ceil(x / 2 - 1e-12))


def xeps_closed_form_prefactors(eps: float) -> tuple[float, float]:
    """h_1, h_2 as products of complete elliptic integrals."""
    K = complete_elliptic_K
    m1 = (1 - eps) ** 2 * (2 + eps) / 4
    m2 = (1 + eps) ** 2 * (2 - eps) / 4
    m3 = (2 - eps) / 4
    m4 = (2 + eps) / 4
    return (2 * K(m1) * K(m2)) ** -0.5, (2 * K(m3) * K(m4)) ** -0.5


def xeps_half_line_integrals(eps: float, spec: QuadratureSpec | None = None) -> tuple[float, float]:
    """Integrals over [0, inf) of dt/sqrt(t f(t)) and dt/sqrt(f(t))."""
    c1, c3 = (1 - eps) ** 2, (1 + eps) ** 2
    f = lambda t: (c1 + t) * (1 + t) * (c3 + t)
    decay = Singularity.DECAY_AT_INFINITY
    jt = integrate_singular(SingularIntegrand(lambda t: 1 / np.sqrt(f(t)),
                                              Singularity.INV_SQRT_LEFT | decay, (0.0, math.inf)), spec)[0]
    j1 = integrate_singular(SingularIntegrand(lambda t: 1 / np.sqrt(f(t)), decay, (0.0, math.inf)), spec)[0]
    return jt, j1


def xeps_quarter_points(eps: float, spec: QuadratureSpec | None = None,
                        periods: ComessattiPeriods | None = None) -> dict:
    """Quarter-arclength point (u, v) in orthonormal coordinates.

    ``u``, ``v`` use the canonical frame obtained from the periods;
    ``u_quarter``, ``v_quarter`` use (sqrt(eps)/4) h_j, i.e. theta/4.  The
    ``*_closed_form`` values evaluate the latter through incomplete
    elliptic integrals as an independent check.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    jt, j1 = xeps_half_line_integrals(eps, spec)
    h1, h2 = xeps_closed_form_prefactors(eps)
    periods = periods or compute_periods(family_a_eps(eps), spec)
    p1, p2 = family_a_frame_prefactors(periods)
    u, v = 0.5 * p1 * jt, 0.5 * p2 * j1
    se = math.sqrt(eps)
    uq, vq = se / 8 * h1 * jt, se / 8 * h2 * j1
    w = (eps + 1) * math.sqrt(2 - eps)
    k4 = math.sqrt(eps + 2) / 2
    u_cf = h1 / 4 * incomplete_elliptic_F(math.sqrt(2 * eps - eps * eps), 2 / w) / w
    v_cf = h2 / 8 * (complete_elliptic_K(k4 * k4) - incomplete_elliptic_F(1 - eps, k4))
    return {"u": u, "v": v, "u_quarter": uq, "v_quarter": vq,
            "u_closed_form": u_cf, "v_closed_form": v_cf,
            "int_dt_sqrt_t_f": jt, "int_dt_sqrt_f": j1, "h1": h1, "h2": h2}


def lifted_convexity(polyline: TorusPolyline, T) -> dict:
    """Convexity of the lifted image in orthonormal coordinates."""
    ok, left, right = convexity_scan(polyline.lifted @ orthonormal_frame(T))
    return {"convex": ok, "left_turns": left, "right_turns": right}


def xeps_bounds(eps: float, spec: QuadratureSpec | None = None,
                periods: ComessattiPeriods | None = None,
                polyline: TorusPolyline | None = None) -> BoundReport:
    """All bounds on N(X_eps) specific to the one-parameter family."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    curve = family_a_eps(eps)
    periods = periods or compute_periods(curve, spec)
    jac = vol_real(periods)
    l1, l2 = jac.lattice_side_lengths
    q = xeps_quarter_points(eps, spec, periods)
    u, v, uq, vq = q["u"], q["v"], q["u_quarter"], q["v_quarter"]
    se = math.sqrt(eps)
    small = eps < 0.5
    if polyline is None:
        from .bergman import abel_jacobi_real_polyline
        polyline = abel_jacobi_real_polyline(curve, periods, 1024, spec)[0]
    conv = lifted_convexity(polyline, periods.T)
    convex = conv["convex"]

    rect = max(l1 / (2 * u), l2 / (2 * v))
    rhombus = l1 / u + l2 / v
    rhombus_sharp = l1 / (2 * u) + l2 / (2 * v)
    rhombus_q = l1 / uq + l2 / vq
    entries = [
        BoundEntry("closed_form_general", "lower", K_HALF / se, "0 < eps < 1/2",
                   "K(sqrt2/2)/sqrt(eps) estimate", small, False),
        BoundEntry("rectangle", "lower", rect, "0 < eps < 1",
                   "outer box [0,2u]x[-v,v] must cover a fundamental domain", True, True),
        BoundEntry("two_torsion", "lower", 1 / se, "0 < eps < 1/2",
                   "2-torsion box estimate, quarter-scale frame", small, False),
        BoundEntry("two_torsion_box", "lower", min(l1 / (4 * u), l2 / (2 * v)), "0 < eps < 1",
                   "2-torsion point inside m times the outer box", True, True),
        BoundEntry("rhombus", "upper", _even_ceiling(rhombus), "lifted image convex",
                   "inner rhombus, 2m >= l1/u + l2/v", convex, True),
        BoundEntry("rhombus_sharp", "upper", _even_ceiling(rhombus_sharp), "lifted image convex",
                   "inner rhombus covers the deepest lattice hole", convex, True),
        BoundEntry("rhombus_quarter_scale", "upper", _even_ceiling(rhombus_q), "lifted image convex",
                   "inner rhombus in the quarter-scale frame", convex, False),
        BoundEntry("uniform", "upper", 19 * K_HALF / se, "0 < eps < 1",
                   "19 K(sqrt2/2)/sqrt(eps) estimate", True, False),
    ]
    diagnostics = {
        "eps": eps,
        "side_lengths": [l1, l2],
        "quarter_points": q,
        "rhombus_sum": rhombus,
        "rhombus_sum_quarter_scale": rhombus_q,
        "rectangle_quarter_scale": max(l1 / (2 * uq), l2 / (2 * vq)),
        "convexity": conv,
        "asymptotes": {"u_over_sqrt_eps": 1 / (4 * math.sqrt(2) * K_HALF),
                       "rhombus_times_sqrt_eps_quarter_scale": 16 * K_HALF,
                       "rectangle_times_sqrt_eps": K_HALF},
    }
    return BoundReport(curve_id=curve.curve_id(), entries=entries, diagnostics=diagnostics)


def curve_bounds(curve: RealHyperellipticCurve, spec: QuadratureSpec | None = None,
                 periods: ComessattiPeriods | None = None,
                 jac: RealJacobianReport | None = None,
                 length: float | None = None,
                 eps: float | None = None,
                 polyline: TorusPolyline | None = None) -> BoundReport:
    """Every applicable bound for ``curve``.

    The X_eps-specific entries are added when ``eps`` is given or when the
    curve parameters are recognised as a member of that family.
    """
    periods = periods or compute_periods(curve, spec)
    jac = jac or vol_real(periods)
    length = length if length is not None else real_locus_length(curve, periods, spec)
    g, r, _ = curve.topo_type
    vol0 = jac.vol_identity
    report = BoundReport(curve_id=curve.curve_id())
    report.diagnostics.update({"vol_identity": vol0, "length": length, "g": g, "r": r})
    if r == 1:
        report.entries.append(BoundEntry("volume_length_r1", "lower", lower_bound_r1(g, vol0, length),
                                         "connected real locus", "volume/length, r = 1"))
    report.entries.append(BoundEntry("volume_length_any_r", "lower", lower_bound_thmC(g, r, vol0, length),
                                     "r >= 1", "volume/length, any r"))
    hm = upper_bound_many_ovals(g, r)
    if hm is not None:
        report.entries.append(BoundEntry("many_ovals", "upper", hm, "r = g or r = g + 1",
                                         "g or g + 1 ovals give 2g - 1"))
    if eps is None:
        eps = eps_of(curve)
    if eps is not None:
        x = xeps_bounds(eps, spec, periods, polyline)
        report.entries.extend(x.entries)
        report.diagnostics.update(x.diagnostics)
        report.diagnostics["quarter_scale_length"] = QUARTER_SCALE * length
    return report


def add_simulation(report: BoundReport, m_lower: int, m_upper: int, n: int) -> None:
    """Attach a sumset-simulation bracket as two uncertified entries."""
    report.entries.append(BoundEntry("simulation_lower", "lower", float(m_lower), f"grid n = {n}",
                                     "sumset simulation, thickened raster", True, False))
    report.entries.append(BoundEntry("simulation_upper", "upper", float(m_upper), f"grid n = {n}",
                                     "sumset simulation, thin raster", True, False))
