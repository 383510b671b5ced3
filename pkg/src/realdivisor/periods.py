"""Period matrices in Comessatti form Pi = [I | M/2 + iT].

For both supported families the holomorphic differentials are
eta_j = x^j dx / y (j = 0..g-1); the a-periods ``A`` and b-periods ``B`` of
these forms give the Riemann matrix tau = A^{-1} B, from which the integer
reflection matrix M = 2 Re(tau) and T = Im(tau) are read off.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import pmap
from .curves import Family, RealHyperellipticCurve
from .numerics import (QuadratureSpec, SingularIntegrand, Singularity,
                       complete_elliptic_K, integrate_singular)


class PeriodError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ComessattiPeriods:
    """Comessatti data of a real curve.

    ``a_periods[j, k]`` is the integral of eta_j over the k-th a-cycle; it
    is real and maps the eta basis to the a-normalized basis
    omega = A^{-1} eta.
    """

    g: int
    M: np.ndarray
    T: np.ndarray
    residuals: dict = field(default_factory=dict)
    a_periods: np.ndarray | None = None

    def __post_init__(self):
        M = np.asarray(self.M)
        if not np.array_equal(M, M.T):
            raise PeriodError("reflection matrix must be symmetric")
        if M.shape != (self.g, self.g) or np.asarray(self.T).shape != (self.g, self.g):
            raise PeriodError("M and T must be g x g")

    @property
    def tau(self) -> np.ndarray:
        return 0.5 * self.M + 1j * self.T

    def to_dict(self) -> dict:
        out = {
            "g": int(self.g),
            "M": np.asarray(self.M).astype(int).tolist(),
            "T": np.asarray(self.T).tolist(),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
        }
        if self.a_periods is not None:
            out["a_periods"] = np.asarray(self.a_periods).tolist()
        return out


def _from_tau(tau: np.ndarray, A: np.ndarray) -> ComessattiPeriods:
    g = tau.shape[0]
    twice_re = 2.0 * tau.real
    M = np.rint(twice_re).astype(int)
    T = tau.imag
    sym = float(np.max(np.abs(tau - tau.T)))
    T = 0.5 * (T + T.T)
    eig = float(np.min(np.linalg.eigvalsh(T)))
    residuals = {
        "symmetry_defect": sym,
        "integrality_defect": float(np.max(np.abs(twice_re - M))),
        "min_eigenvalue_T": eig,
    }
    if not np.array_equal(M, M.T):
        raise PeriodError(f"reflection matrix is not symmetric: {M.tolist()}")
    if eig <= 0:
        raise PeriodError(f"Im(tau) is not positive definite (min eigenvalue {eig:.3e})")
    if residuals["integrality_defect"] > 1e-6 or sym > 1e-6:
        raise PeriodError(f"period matrix fails the Riemann relations: {residuals}")
    return ComessattiPeriods(g=g, M=M, T=T, residuals=residuals, a_periods=A)


def family_a_integrals(curve: RealHyperellipticCurve,
                       spec: QuadratureSpec | None = None) -> dict[str, float]:
    """The four real integrals over [c1, c2] and [c2, c3].

    A1, B1 integrate dt / sqrt(t |f(-t)|), A2, B2 integrate dt / sqrt(|f(-t)|).
    """
    spec = spec or QuadratureSpec()
    c1, c2, c3 = curve.params
    both = Singularity.INV_SQRT_BOTH
    jobs = {
        "A1": SingularIntegrand(lambda t: 1.0 / np.sqrt(t * (c3 - t)), both, (c1, c2)),
        "B1": SingularIntegrand(lambda t: 1.0 / np.sqrt(t * (t - c1)), both, (c2, c3)),
        "A2": SingularIntegrand(lambda t: 1.0 / np.sqrt(c3 - t), both, (c1, c2)),
        "B2": SingularIntegrand(lambda t: 1.0 / np.sqrt(t - c1), both, (c2, c3)),
    }
    values = pmap(lambda f: integrate_singular(f, spec)[0], jobs.values())
    return dict(zip(jobs, values))


def periods_family_a(curve: RealHyperellipticCurve,
                     spec: QuadratureSpec | None = None) -> ComessattiPeriods:
    if curve.family is not Family.FAMILY_A:
        raise PeriodError("periods_family_a needs a FamilyA curve")
    I = family_a_integrals(curve, spec)
    # rows: eta_0 = dz/w, eta_1 = z dz/w; columns: cycles
    A = np.array([[2 * I["A1"], 0.0], [0.0, 2 * I["B2"]]])
    B = np.array([[1j * I["B1"], I["A1"]], [I["B2"], 1j * I["A2"]]])
    return _from_tau(np.linalg.solve(A, B), A)


def family_a_closed_form_T(eps: float) -> tuple[float, float]:
    """Diagonal of T for c = ((1-eps)^2, 1, (1+eps)^2) as ratios of K values."""
    m1 = (1 - eps) ** 2 * (2 + eps) / 4
    m2 = (1 + eps) ** 2 * (2 - eps) / 4
    m3 = (2 - eps) / 4
    m4 = (2 + eps) / 4
    K = complete_elliptic_K
    return K(m1) / (2 * K(m2)), K(m3) / (2 * K(m4))


def _m_curve_interval_integrals(roots: np.ndarray, g: int, i: int,
                                spec: QuadratureSpec) -> np.ndarray:
    """Integrals of x^j / sqrt|p(x)| over (roots[i], roots[i+1]), j = 0..g-1."""
    lo, hi = roots[i], roots[i + 1]
    others = np.delete(roots, [i, i + 1])

    def rest(x):
        return np.sqrt(np.abs(np.prod(x[..., None] - others, axis=-1)))

    out = np.empty(g)
    for j in range(g):
        f = SingularIntegrand(lambda x, j=j: x ** j / rest(x), Singularity.INV_SQRT_BOTH, (lo, hi))
        out[j] = integrate_singular(f, spec)[0]
    return out


def m_curve_raw_periods(curve: RealHyperellipticCurve,
                        spec: QuadratureSpec | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Integrals of eta_j over the bounded ovals and over the negative gaps.

    Uses the branch of y that is the boundary value from the upper half
    plane, y = i^n sqrt|p| with n the number of roots to the right of x.
    Returns ``(A, G)``: A is g x g and real (oval k traversed once, both
    sheets), G is g x (g+1) and purely imaginary (gap k doubled).
    """
    spec = spec or QuadratureSpec()
    roots = np.asarray(curve.params)
    g = curve.genus
    raw = pmap(lambda i: _m_curve_interval_integrals(roots, g, i, spec), range(2 * g + 1))
    A = np.empty((g, g))
    G = np.empty((g, g + 1), dtype=complex)
    for k in range(1, g + 2):
        # gap (a_{2k-1}, a_{2k}) has 2g + 3 - 2k roots to its right
        n = 2 * g + 3 - 2 * k
        G[:, k - 1] = 2 * raw[2 * k - 2] / (1j ** n)
        if k <= g:
            A[:, k - 1] = 2 * (-1) ** (g + 1 - k) * raw[2 * k - 1]
    return A, G


def periods_m_curve(curve: RealHyperellipticCurve,
                    spec: QuadratureSpec | None = None) -> ComessattiPeriods:
    """Comessatti data for an M-curve.

    The a-cycles are the bounded ovals.  The k-th b-cycle is the lift of a
    loop encircling the gaps 1..k, so its period is the cumulative sum of
    gap integrals; with single gaps the resulting tau is not symmetric.
    The orientation of all b-cycles is chosen to make Im(tau) positive.
    """
    if curve.family is not Family.M_CURVE:
        raise PeriodError("periods_m_curve needs an M-curve")
    A, G = m_curve_raw_periods(curve, spec)
    cond = np.linalg.cond(A)
    if not cond < 1e12:
        raise PeriodError(f"a-period matrix is ill-conditioned (condition number {cond:.3e})")
    B = np.cumsum(G[:, :-1], axis=1)
    tau = np.linalg.solve(A, B)
    eig = np.linalg.eigvalsh(0.5 * (tau.imag + tau.imag.T))
    if eig.max() < 0:
        tau = -tau
    return _from_tau(tau, A)


def compute_periods(curve: RealHyperellipticCurve,
                    spec: QuadratureSpec | None = None) -> ComessattiPeriods:
    if curve.family is Family.FAMILY_A:
        return periods_family_a(curve, spec)
    return periods_m_curve(curve, spec)


def _block_diag(*blocks: np.ndarray) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=int)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


def antidiagonal(s: int) -> np.ndarray:
    """s x s matrix with ones on the principal antidiagonal."""
    return np.fliplr(np.eye(s, dtype=int))


def reflection_normal_form(gt: int, r: int, m: int, base: str) -> np.ndarray:
    """Normal form of the reflection matrix for a Natanzon model (gt, r, m).

    ``gt`` is the genus of the quotient surface, ``r`` the number of real
    ovals and ``m`` the number of cross-caps; ``base`` is "S_r" or "R_m".
    The genus is g = 2 gt + m + r - 1.
    """
    if gt < 0 or r < 0 or m < 0:
        raise ValueError("gt, r, m must be non-negative")
    g = 2 * gt + m + r - 1
    if g < 1:
        raise ValueError(f"(gt, r, m) = ({gt}, {r}, {m}) gives genus {g} < 1")
    J = antidiagonal(2 * gt)
    if base == "S_r":
        if r == 0:
            raise ValueError("base S_r requires r > 0")
        return _block_diag(J, np.eye(m, dtype=int), np.zeros((r - 1, r - 1), dtype=int))
    if base == "R_m":
        if m == 0:
            raise ValueError("base R_m requires m > 0")
        k = m - 1 + r
        tail = np.ones((k, k), dtype=int)
        tail[: m - 1, : m - 1] -= np.eye(m - 1, dtype=int)
        return _block_diag(J, tail)
    raise ValueError(f"unknown base {base!r}; expected 'S_r' or 'R_m'")


def comessatti_component_count(g: int, r: int) -> int:
    """Number of components of the real Jacobian predicted from (g, r)."""
    if r > 0:
        return 2 ** (r - 1)
    return 1 if g % 2 == 0 else 2
