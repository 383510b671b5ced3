"""Bergman metric, length of the real locus and the Abel-Jacobi image of X(R).

Conventions.  omega = A^{-1} eta is the a-normalized basis of holomorphic
differentials, so the real torus J(R)_0 is R^g / Z^g in omega-coordinates.
The canonical metric has Gram matrix T^{-1} in these coordinates; with
B^T B = T and C = B^{-1}, the forms theta = C^T omega are orthonormal and the
lattice generator e_i has length sqrt((T^{-1})_ii).  The Bergman metric is
the pullback of the canonical metric, not divided by g.

Each real oval is parametrized by an angle s in [0, 2 pi) in such a way
that the pulled-back differentials are smooth periodic functions of s; the
cumulative Abel-Jacobi integrals are then computed spectrally.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import pmap
from .curves import Family, RealHyperellipticCurve
from .numerics import (QuadratureSpec, SingularIntegrand, Singularity,
                       integrate_singular, periodic_antiderivative, spd_sqrt_factor)
from .periods import ComessattiPeriods, m_curve_raw_periods


class SamplingError(ArithmeticError):
    pass


@dataclass(frozen=True)
class TorusPolyline:
    """Sampled Abel-Jacobi image of one real oval.

    ``points`` are omega-coordinates reduced to [0, 1)^g; ``lifted`` holds
    the same samples before reduction, continuous along the oval.
    """

    g: int
    points: np.ndarray
    component_label: tuple[int, ...]
    closed: bool
    lifted: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    oval_id: int = 0
    closure_defect: float = 0.0
    advance: tuple[int, ...] = ()

    def __post_init__(self):
        steps = np.diff(np.vstack([self.lifted, self.lifted[:1] + np.array(self.advance or 0)]), axis=0)
        if np.max(np.abs(steps)) >= 0.25:
            raise SamplingError("consecutive polyline samples are 0.25 or more apart; increase n_samples")


def orthonormal_frame(T) -> np.ndarray:
    """C = B^{-1} for the upper-triangular B with B^T B = T.

    theta_j = sum_k C_kj omega_k, i.e. theta = C^T omega, is orthonormal for
    the Hodge product; C^T T C = I.
    """
    B = spd_sqrt_factor(T)
    g = B.shape[0]
    return np.linalg.solve(B, np.eye(g))


def eta_metric(periods: ComessattiPeriods) -> np.ndarray:
    """Gram matrix of the canonical metric on eta-coefficient vectors.

    A tangent vector whose eta_j-components are e_j has squared length
    e^T G e with G = A^{-T} T^{-1} A^{-1}.
    """
    if periods.a_periods is None:
        raise ValueError("periods carry no a-period matrix; recompute them from a curve")
    Ainv = np.linalg.inv(periods.a_periods)
    G = Ainv.T @ np.linalg.inv(periods.T) @ Ainv
    return 0.5 * (G + G.T)


def family_a_frame_prefactors(periods: ComessattiPeriods) -> tuple[float, float]:
    """Coefficients p_j with theta_j = p_j eta_j (FamilyA has diagonal T and A)."""
    G = eta_metric(periods)
    return float(math.sqrt(G[0, 0])), float(math.sqrt(G[1, 1]))


def _monomials(x: np.ndarray, g: int) -> np.ndarray:
    return np.stack([x ** j for j in range(g)], axis=-1)


def _quad_form(G: np.ndarray, e: np.ndarray) -> np.ndarray:
    return np.sqrt(np.maximum(np.einsum("...i,ij,...j->...", e, G, e), 0.0))


def ell_integral(eps: float, spec: QuadratureSpec | None = None) -> float:
    """Integral over [0, inf) of sqrt((1 + t) / (t f(t))) for c = ((1-eps)^2, 1, (1+eps)^2)."""
    c1, c3 = (1 - eps) ** 2, (1 + eps) ** 2
    f = SingularIntegrand(lambda t: 1.0 / np.sqrt((c1 + t) * (c3 + t)),
                          Singularity.INV_SQRT_LEFT | Singularity.DECAY_AT_INFINITY, (0.0, math.inf))
    return integrate_singular(f, spec)[0]


def real_locus_length(curve: RealHyperellipticCurve, periods: ComessattiPeriods,
                      spec: QuadratureSpec | None = None) -> float:
    """Length of X(R) in the Bergman metric, by singular quadrature in x."""
    spec = spec or QuadratureSpec()
    G = eta_metric(periods)
    g = periods.g
    decay = Singularity.DECAY_AT_INFINITY

    if curve.family is Family.FAMILY_A:
        def both_sides(x):
            fx = curve.poly(x)
            return (_quad_form(G, _monomials(x, g)) + _quad_form(G, _monomials(-x, g))) / np.sqrt(fx)

        # two sheets over the real line
        return 2.0 * integrate_singular(SingularIntegrand(both_sides, decay, (0.0, math.inf)), spec)[0]

    roots = np.asarray(curve.params)

    def rest_factory(skip):
        others = np.delete(roots, skip)
        return lambda x: np.sqrt(np.abs(np.prod(x[..., None] - others, axis=-1)))

    jobs = []
    for k in range(1, g + 1):
        lo, hi = roots[2 * k - 1], roots[2 * k]
        rest = rest_factory([2 * k - 1, 2 * k])
        jobs.append(SingularIntegrand(
            lambda x, rest=rest: _quad_form(G, _monomials(x, g)) / rest(x),
            Singularity.INV_SQRT_BOTH, (lo, hi)))
    # the oval through infinity, in the chart w = 1/(x - c) where it is the
    # interval [-1/h, 1/h] and 1 - h^2 w^2 supplies both endpoint factors
    c = 0.5 * (roots[0] + roots[-1])
    h = 0.5 * (roots[-1] - roots[0])
    inner = roots[1:-1]

    def unbounded(w):
        restq = np.sqrt(np.prod(1.0 + (c - inner) * w[..., None], axis=-1))
        e = np.stack([(c * w + 1.0) ** j * w ** (g - 1 - j) for j in range(g)], axis=-1)
        return _quad_form(G, e) / (h * restq)

    jobs.append(SingularIntegrand(unbounded, Singularity.INV_SQRT_BOTH, (-1.0 / h, 1.0 / h)))
    values = pmap(lambda f: integrate_singular(f, spec)[0], jobs)
    return 2.0 * float(sum(values))


# -- oval parametrizations --------------------------------------------------

def _oval_eta_derivative(curve: RealHyperellipticCurve, oval: int):
    """Return s -> d(eta_j)/ds, shape (len(s), g), for oval ``oval``.

    FamilyA: x = -cot(s); s in (0, pi) is the sheet w > 0 starting from the
    point over x = -infinity, s in (pi, 2 pi) the other sheet.
    M-curve bounded oval k (0-based): x = mid - half cos(s), starting at the
    left root with the upper-half-plane boundary branch of y on (0, pi).
    M-curve unbounded oval (index g): w = 1/(x - c) = -cos(s)/h, starting at
    the leftmost root.
    """
    g = curve.genus
    if curve.family is Family.FAMILY_A:
        c = curve.params

        def deriv(s):
            sn, cs = np.sin(s), np.cos(s)
            q = np.sqrt(np.prod([cj * sn * sn + cs * cs for cj in c], axis=0))
            return np.stack([sn / q, -cs / q], axis=-1)

        return deriv

    roots = np.asarray(curve.params)
    if oval < g:
        k = oval + 1
        lo, hi = roots[2 * k - 1], roots[2 * k]
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        others = np.delete(roots, [2 * k - 1, 2 * k])
        sigma = (-1) ** (g + 1 - k)

        def deriv(s):
            x = mid - half * np.cos(s)
            rest = np.sqrt(np.abs(np.prod(x[:, None] - others, axis=-1)))
            return sigma * _monomials(x, g) / rest[:, None]

        return deriv

    c = 0.5 * (roots[0] + roots[-1])
    h = 0.5 * (roots[-1] - roots[0])
    inner = roots[1:-1]

    def deriv(s):
        w = -np.cos(s) / h
        rest = np.sqrt(np.prod(1.0 + (c - inner)[None, :] * w[:, None], axis=-1))
        cols = [(c * w + 1.0) ** j * w ** (g - 1 - j) for j in range(g)]
        return -np.stack(cols, axis=-1) / (h * rest[:, None])

    return deriv


def _cumulative_eta(deriv, n_samples: int, spec: QuadratureSpec, max_points: int = 2 ** 20):
    """Cumulative eta integrals at s_k = 2 pi k / n_samples, refined until stable."""
    factor = max(1, -(-4096 // n_samples))
    prev = None
    while True:
        n = n_samples * factor
        s = 2 * math.pi * np.arange(n) / n
        cum, total = periodic_antiderivative(deriv(s), 2 * math.pi)
        sub = np.vstack([cum[::factor], total[None, :]])
        if prev is not None:
            err = float(np.max(np.abs(sub - prev)))
            scale = float(np.max(np.abs(sub)))
            if err <= max(spec.abs_tol, spec.rel_tol * scale):
                return cum[::factor], total
        if n * 2 > max_points:
            raise SamplingError(f"oval integrals did not stabilize (last change {err:.3e})")
        prev = sub
        factor *= 2


def _m_curve_offsets_and_labels(curve, periods, spec):
    """Lifted omega-coordinates and component labels of each oval's start point."""
    g = curve.genus
    A, G = m_curve_raw_periods(curve, spec)
    Ainv = np.linalg.inv(A)
    Tinv = np.linalg.inv(periods.T)
    offsets, labels = [], []
    for k in range(1, g + 1):
        # path along the upper edge from a_1 to a_{2k}: gaps 1..k and upper halves of ovals 1..k-1
        real = Ainv @ (A[:, : k - 1].sum(axis=1) / 2) if k > 1 else np.zeros(g)
        imag = (Ainv @ (G[:, :k].sum(axis=1) / 2)).imag
        coeff = 2 * (Tinv @ imag)
        label = np.rint(coeff)
        if np.max(np.abs(coeff - label)) > 1e-6:
            raise SamplingError(f"half-period bookkeeping failed for oval {k}: {coeff}")
        offsets.append(real)
        labels.append(tuple(int(v) % 2 for v in label))
    offsets.append(np.zeros(g))
    labels.append((0,) * g)
    return offsets, labels


def abel_jacobi_real_polyline(curve: RealHyperellipticCurve, periods: ComessattiPeriods,
                              n_samples: int = 512,
                              spec: QuadratureSpec | None = None) -> list[TorusPolyline]:
    """Abel-Jacobi image of each real oval in omega-coordinates.

    FamilyA uses the base point over x = -infinity on the sheet w > 0 and
    returns a single polyline with the trivial label.  M-curves use the
    leftmost root as base point; the bounded ovals come first, followed by
    the oval through infinity.
    """
    if n_samples < 64:
        raise ValueError("n_samples must be at least 64")
    spec = spec or QuadratureSpec()
    g = periods.g
    Ainv = np.linalg.inv(periods.a_periods)
    n_ovals = curve.n_ovals
    if curve.family is Family.FAMILY_A:
        offsets, labels = [np.zeros(g)], [()]
    else:
        offsets, labels = _m_curve_offsets_and_labels(curve, periods, spec)

    def one(oval):
        cum, total = _cumulative_eta(_oval_eta_derivative(curve, oval), n_samples, spec)
        lifted = offsets[oval] + cum @ Ainv.T
        advance = Ainv @ total
        rounded = np.rint(advance)
        defect = float(np.max(np.abs(advance - rounded)))
        if defect > 1e-4:
            raise SamplingError(f"oval {oval} does not close up mod Z^g (defect {defect:.3e})")
        s = 2 * math.pi * np.arange(n_samples) / n_samples
        points = np.mod(lifted, 1.0)
        points[points >= 1.0] = 0.0  # mod of a tiny negative rounds up to 1
        return TorusPolyline(g=g, points=points, component_label=labels[oval],
                             closed=True, lifted=lifted, s=s, oval_id=oval,
                             closure_defect=defect, advance=tuple(int(v) for v in rounded))

    return pmap(one, range(n_ovals))


def polyline_length(poly: TorusPolyline, T) -> float:
    """Sum of segment lengths in the canonical metric, including the closing segment."""
    pts = poly.lifted
    if poly.closed:
        pts = np.vstack([pts, pts[:1] + np.asarray(poly.advance)])
    d = np.diff(pts, axis=0)
    Tinv = np.linalg.inv(np.asarray(T))
    return float(np.sum(np.sqrt(np.einsum("ni,ij,nj->n", d, Tinv, d))))


def to_theta(T, omega: np.ndarray) -> np.ndarray:
    """Orthonormal coordinates theta = C^T omega (row-wise)."""
    C = orthonormal_frame(T)
    return np.asarray(omega) @ C


def polylines_to_csv(polylines: list[TorusPolyline]) -> str:
    buf = io.StringIO()
    g = polylines[0].g if polylines else 0
    buf.write(",".join(["oval_id", "s"] + [f"x{i + 1}" for i in range(g)]) + "\n")
    for poly in polylines:
        for s, p in zip(poly.s, poly.points):
            buf.write(",".join([str(poly.oval_id), f"{s:.12g}"] + [f"{v:.12g}" for v in p]) + "\n")
    return buf.getvalue()
