"""Special functions, singular quadrature and small dense linear algebra.

Everything here is a pure function of its inputs.  The quadrature is a
tanh-sinh (double exponential) rule in which inverse square-root endpoint
factors are applied analytically, using endpoint distances computed without
cancellation, so that integrands such as 1/sqrt(t(1-t)) are resolved to
near machine precision.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import expit


class NumericsError(ValueError):
    """Base class for domain errors raised by this module."""


class DomainError(NumericsError):
    pass


class QuadratureError(NumericsError):
    """Refinement exhausted before the requested tolerance was met."""

    def __init__(self, message: str, value: float, err_est: float):
        super().__init__(message)
        self.value = value
        self.err_est = err_est


class FactorizationError(NumericsError):
    """Raised when a matrix is not symmetric positive definite."""

    def __init__(self, message: str, minor: int):
        super().__init__(message)
        self.minor = minor


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_levels: int = 12

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol}")
        if not self.rel_tol > 0:
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol}")
        if int(self.max_levels) != self.max_levels or self.max_levels < 1:
            raise ValueError(f"max_levels must be a positive integer, got {self.max_levels}")

    def to_dict(self) -> dict:
        return {"method": "tanh-sinh", "abs_tol": self.abs_tol,
                "rel_tol": self.rel_tol, "max_levels": int(self.max_levels)}


class Singularity(enum.Flag):
    """Endpoint behaviour of an integrand.

    The inverse square-root flags mean the full integrand is
    ``smooth_part(t) * (t - a)**-0.5`` (left), ``* (b - t)**-0.5`` (right)
    or both.  DECAY_AT_INFINITY marks an infinite upper limit where the
    integrand falls off at least like t**-1.5; it combines with
    INV_SQRT_LEFT.
    """

    NONE = 0
    INV_SQRT_LEFT = enum.auto()
    INV_SQRT_RIGHT = enum.auto()
    DECAY_AT_INFINITY = enum.auto()
    INV_SQRT_BOTH = INV_SQRT_LEFT | INV_SQRT_RIGHT


@dataclass(frozen=True)
class SingularIntegrand:
    """An integrand ``smooth_part`` times the factors named by ``pattern``.

    ``smooth_part`` must accept and return numpy arrays.
    """

    smooth_part: Callable[[np.ndarray], np.ndarray]
    pattern: Singularity
    interval: tuple[float, float]

    def __post_init__(self):
        a, b = self.interval
        if not a < b:
            raise DomainError(f"empty interval ({a}, {b})")
        if math.isinf(a):
            raise DomainError("lower limit must be finite")
        infinite = math.isinf(b)
        if infinite != bool(self.pattern & Singularity.DECAY_AT_INFINITY):
            raise DomainError("an infinite upper limit requires DECAY_AT_INFINITY and vice versa")
        if infinite and self.pattern & Singularity.INV_SQRT_RIGHT:
            raise DomainError("INV_SQRT_RIGHT is meaningless at an infinite endpoint")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        a, b = self.interval
        out = np.asarray(self.smooth_part(t), dtype=float)
        if self.pattern & Singularity.INV_SQRT_LEFT:
            out = out / np.sqrt(t - a)
        if self.pattern & Singularity.INV_SQRT_RIGHT:
            out = out / np.sqrt(b - t)
        return out

    def split(self, c: float) -> tuple["SingularIntegrand", "SingularIntegrand"]:
        """Two integrands on [a, c] and [c, b] whose integrals add up to this one."""
        a, b = self.interval
        if not a < c < b:
            raise DomainError(f"split point {c} not interior to ({a}, {b})")
        f, p = self.smooth_part, self.pattern
        left_pat = p & Singularity.INV_SQRT_LEFT
        right_pat = p & (Singularity.INV_SQRT_RIGHT | Singularity.DECAY_AT_INFINITY)

        def left_smooth(t):
            out = np.asarray(f(t), dtype=float)
            if p & Singularity.INV_SQRT_RIGHT:
                out = out / np.sqrt(b - t)
            return out

        def right_smooth(t):
            out = np.asarray(f(t), dtype=float)
            if p & Singularity.INV_SQRT_LEFT:
                out = out / np.sqrt(t - a)
            return out

        return (SingularIntegrand(left_smooth, left_pat, (a, c)),
                SingularIntegrand(right_smooth, right_pat, (c, b)))


# Truncation of the tanh-sinh abscissae: at |t| = 6 the node sits within
# ~1e-270 of the endpoint, far past anything that contributes.
_T_MAX = 6.0


def _tanh_sinh_finite(smooth, a: float, b: float, left: bool, right: bool,
                      spec: QuadratureSpec) -> tuple[float, float]:
    half = 0.5 * (b - a)

    def level_sum(ts):
        u = 0.5 * math.pi * np.sinh(ts)
        # distances to the endpoints, each accurate near its own endpoint
        dl = 2.0 * half * expit(2.0 * u)
        dr = 2.0 * half * expit(-2.0 * u)
        # nodes this close to an endpoint contribute O(sqrt(distance)) and
        # may push the smooth part (e.g. a mapped infinite tail) to overflow
        keep = np.minimum(dl, dr) > 1e-30 * half
        u, ts, dl, dr = u[keep], ts[keep], dl[keep], dr[keep]
        x = np.where(u < 0, a + dl, b - dr)
        sech2 = 4.0 * expit(2.0 * u) * expit(-2.0 * u)
        w = half * 0.5 * math.pi * np.cosh(ts) * sech2
        vals = np.asarray(smooth(x), dtype=float)
        if left:
            vals = vals / np.sqrt(dl)
        if right:
            vals = vals / np.sqrt(dr)
        terms = w * vals
        if not np.all(np.isfinite(terms)):
            raise QuadratureError("integrand not finite at a quadrature node",
                                  float("nan"), float("inf"))
        return float(np.sum(terms))

    h = 1.0
    ts = np.arange(-_T_MAX, _T_MAX + 0.5 * h, h)
    total = level_sum(ts)
    estimate = h * total
    err = float("inf")
    for level in range(1, int(spec.max_levels) + 1):
        h *= 0.5
        k = np.arange(1, int(round(2 * _T_MAX / h)) + 1, 2)
        total += level_sum(-_T_MAX + k * h)
        new = h * total
        err = abs(new - estimate)
        estimate = new
        if level >= 3 and err <= max(spec.abs_tol, spec.rel_tol * abs(estimate)):
            return estimate, err
    raise QuadratureError(
        f"tanh-sinh refinement exhausted after {spec.max_levels} levels "
        f"(estimate {estimate!r}, error estimate {err:.3e})", estimate, err)


def integrate_singular(f: SingularIntegrand,
                       spec: QuadratureSpec | None = None) -> tuple[float, float]:
    """Integrate ``f`` over its interval, returning ``(value, err_est)``.

    Infinite upper limits are split at a + 1 and the tail is mapped to
    (0, 1] with t = a + 1/s, which turns t**-1.5 decay into an inverse
    square-root endpoint at s = 0.
    """
    spec = spec or QuadratureSpec()
    a, b = f.interval
    left = bool(f.pattern & Singularity.INV_SQRT_LEFT)
    right = bool(f.pattern & Singularity.INV_SQRT_RIGHT)
    if not math.isinf(b):
        return _tanh_sinh_finite(f.smooth_part, a, b, left, right, spec)

    head, herr = _tanh_sinh_finite(f.smooth_part, a, a + 1.0, left, False, spec)
    smooth = f.smooth_part

    def tail(s):
        s = np.asarray(s, dtype=float)
        t = a + 1.0 / s
        with np.errstate(over="ignore"):
            out = np.asarray(smooth(t), dtype=float) / (s * s)
        if left:
            out = out * np.sqrt(s)  # (t - a)**-0.5 == sqrt(s)
        # remaining growth is absorbed as an s**-0.5 endpoint factor
        return out * np.sqrt(s)

    tval, terr = _tanh_sinh_finite(tail, 0.0, 1.0, True, False, spec)
    return head + tval, herr + terr


def complete_elliptic_K(m: float) -> float:
    """Complete elliptic integral of the first kind with parameter m = k**2."""
    m = float(m)
    if not 0.0 <= m < 1.0:
        raise DomainError(f"complete_elliptic_K requires 0 <= m < 1, got {m}")
    a, b = 1.0, math.sqrt(1.0 - m)
    for _ in range(64):
        if abs(a - b) <= 4e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (a + b)


def carlson_rf(x: float, y: float, z: float) -> float:
    """Carlson's symmetric integral R_F by duplication (at most one zero argument)."""
    if min(x, y, z) < 0 or (x == 0) + (y == 0) + (z == 0) > 1:
        raise DomainError(f"carlson_rf undefined for ({x}, {y}, {z})")
    for _ in range(100):
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
        mu = (x + y + z) / 3.0
        dx, dy, dz = 1 - x / mu, 1 - y / mu, 1 - z / mu
        if max(abs(dx), abs(dy), abs(dz)) < 1e-4:
            break
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    return (1 - e2 / 10 + e3 / 14 + e2 * e2 / 24 - 3 * e2 * e3 / 44) / math.sqrt(mu)


def incomplete_elliptic_F(a: float, k: float) -> float:
    """F(a, k) = integral over [0, a] of dt / sqrt((1 - t^2)(1 - k^2 t^2)).

    ``a`` is the sine amplitude.  Moduli with k > 1 are allowed as long as
    k*a < 1, which keeps the integrand real.
    """
    a, k = float(a), float(k)
    if not 0.0 <= a <= 1.0:
        raise DomainError(f"amplitude must lie in [0, 1], got {a}")
    k2a2 = k * k * a * a
    if k2a2 >= 1.0:
        raise DomainError(f"k^2 a^2 = {k2a2} >= 1: integrand not real on [0, a)")
    if a == 0.0:
        return 0.0
    if a == 1.0:
        return complete_elliptic_K(k * k)
    return a * carlson_rf(1.0 - a * a, 1.0 - k2a2, 1.0)


def spd_sqrt_factor(T) -> np.ndarray:
    """Upper-triangular B with positive diagonal and B^T B = T.

    Raises FactorizationError naming the first leading minor that is not
    positive.
    """
    T = np.asarray(T, dtype=float)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise FactorizationError(f"expected a square matrix, got shape {T.shape}", 0)
    scale = max(1.0, float(np.max(np.abs(T))))
    if np.max(np.abs(T - T.T)) > 1e-12 * scale:
        raise FactorizationError("matrix is not symmetric", 0)
    g = T.shape[0]
    B = np.zeros_like(T)
    for j in range(g):
        d = T[j, j] - B[:j, j] @ B[:j, j]
        if not d > 0:
            raise FactorizationError(
                f"leading minor of order {j + 1} is not positive (pivot {d:.3e})", j + 1)
        B[j, j] = math.sqrt(d)
        for k in range(j + 1, g):
            B[j, k] = (T[j, k] - B[:j, j] @ B[:j, k]) / B[j, j]
    return B


def rank_mod2(M) -> int:
    """Rank over the field with two elements."""
    A = np.asarray(M, dtype=np.int64) % 2
    if A.size == 0:
        return 0
    A = A.astype(np.uint8).copy()
    rows, cols = A.shape
    rank = 0
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if A[r, c]), None)
        if pivot is None:
            continue
        A[[rank, pivot]] = A[[pivot, rank]]
        below = np.nonzero(A[:, c])[0]
        for r in below:
            if r != rank:
                A[r] ^= A[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def periodic_antiderivative(values: np.ndarray, period: float) -> tuple[np.ndarray, np.ndarray]:
    """Spectral cumulative integral of periodic samples.

    ``values`` has shape (N, ...) sampled at s_k = k * period / N.  Returns
    ``(cumulative, total)`` where ``cumulative[k]`` is the integral from 0
    to s_k and ``total`` the integral over one period.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[0]
    coeffs = np.fft.rfft(values, axis=0)
    mean = coeffs[0].real / n
    freqs = np.arange(coeffs.shape[0])
    shape = (-1,) + (1,) * (values.ndim - 1)
    omega = (2.0 * math.pi / period) * freqs.reshape(shape)
    integ = np.zeros_like(coeffs)
    integ[1:] = coeffs[1:] / (1j * omega[1:])
    if n % 2 == 0:
        integ[-1] = 0.0  # Nyquist mode has no well-defined antiderivative
    periodic = np.fft.irfft(integ, n=n, axis=0)
    s = (np.arange(n) * period / n).reshape(shape)
    cumulative = mean * s + periodic - periodic[0]
    return cumulative, mean * period
