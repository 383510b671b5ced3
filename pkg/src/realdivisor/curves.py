"""Real hyperelliptic curve models.

Two families are supported:

* ``FamilyA``: w^2 = (c1 + z^2)(c2 + z^2)(c3 + z^2) with 0 < c1 < c2 < c3.
  Genus 2, no real branch points, a single real oval.
* ``MCurve``: y^2 = prod (x - a_i) over 2g + 2 distinct real roots, which
  has the maximal number g + 1 of real ovals.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np


class CurveError(ValueError):
    pass


class Family(str, enum.Enum):
    FAMILY_A = "FamilyA"
    M_CURVE = "MCurve"


@dataclass(frozen=True)
class RealHyperellipticCurve:
    family: Family
    params: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.family is Family.FAMILY_A:
            _check_family_a(self.params)
        else:
            _check_m_curve(self.params)

    @property
    def genus(self) -> int:
        if self.family is Family.FAMILY_A:
            return 2
        return len(self.params) // 2 - 1

    @property
    def topo_type(self) -> tuple[int, int, int]:
        return topological_type(self)

    @property
    def n_ovals(self) -> int:
        return self.topo_type[1]

    def poly(self, x):
        """The right-hand side of the model evaluated at real x.

        For FamilyA this is f(x^2); for an M-curve the product of (x - a_i).
        """
        x = np.asarray(x, dtype=float)
        if self.family is Family.FAMILY_A:
            t = x * x
            c1, c2, c3 = self.params
            return (c1 + t) * (c2 + t) * (c3 + t)
        out = np.ones_like(x)
        for a in self.params:
            out = out * (x - a)
        return out

    def curve_id(self) -> str:
        body = ",".join(f"{p:.12g}" for p in self.params)
        return f"{self.family.value}({body})"

    def to_dict(self) -> dict:
        return {"family": self.family.value, "params": list(self.params)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "RealHyperellipticCurve":
        try:
            family = Family(data["family"])
            params = data["params"]
        except (KeyError, TypeError, ValueError) as exc:
            raise CurveError(f"malformed curve description: {data!r}") from exc
        if family is Family.FAMILY_A:
            return make_family_a(*params)
        return make_m_curve(params)

    @classmethod
    def from_json(cls, text: str) -> "RealHyperellipticCurve":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CurveError(f"curve JSON does not parse: {exc}") from exc
        return cls.from_dict(data)


def _check_family_a(params):
    if len(params) != 3:
        raise CurveError(f"FamilyA takes three parameters, got {len(params)}")
    c1, c2, c3 = params
    if not all(math.isfinite(c) for c in params):
        raise CurveError("FamilyA parameters must be finite")
    if not 0 < c1:
        raise CurveError(f"FamilyA requires c1 > 0, got {c1}")
    if not c1 < c2 < c3:
        raise CurveError(f"FamilyA requires c1 < c2 < c3 (distinct roots), got {params}")


def _check_m_curve(roots):
    if len(roots) % 2 or len(roots) < 4:
        raise CurveError(f"an M-curve needs an even number >= 4 of roots, got {len(roots)}")
    if not all(math.isfinite(a) for a in roots):
        raise CurveError("roots must be finite")
    if any(b <= a for a, b in zip(roots, roots[1:])):
        raise CurveError("roots must be strictly increasing (sorted and distinct)")


def make_family_a(c1: float, c2: float, c3: float) -> RealHyperellipticCurve:
    return RealHyperellipticCurve(Family.FAMILY_A, (c1, c2, c3))


def family_a_eps(eps: float) -> RealHyperellipticCurve:
    """The one-parameter curve with c = ((1 - eps)^2, 1, (1 + eps)^2)."""
    if not 0 < eps < 1:
        raise CurveError(f"eps must lie in (0, 1), got {eps}")
    return make_family_a((1 - eps) ** 2, 1.0, (1 + eps) ** 2)


def eps_of(curve: RealHyperellipticCurve, tol: float = 1e-12) -> float | None:
    """Recover eps if ``curve`` is a member of the one-parameter subfamily."""
    if curve.family is not Family.FAMILY_A:
        return None
    c1, c2, c3 = curve.params
    if abs(c2 - 1.0) > tol:
        return None
    eps = math.sqrt(c3) - 1.0
    if 0 < eps < 1 and abs((1 - eps) ** 2 - c1) <= 10 * tol:
        return eps
    return None


def make_m_curve(roots) -> RealHyperellipticCurve:
    roots = [float(a) for a in roots]
    if len(roots) == 2:
        raise CurveError("two roots give genus 0; an M-curve needs genus >= 1")
    if sorted(roots) != roots:
        raise CurveError("roots must be given in increasing order")
    return RealHyperellipticCurve(Family.M_CURVE, tuple(roots))


def is_admissible(g: int, r: int, a: int) -> bool:
    """Topological type constraints for a smooth real curve of genus g."""
    if g < 0 or r < 0 or a not in (0, 1) or r > g + 1:
        return False
    if a == 0:
        return r >= 1 and (r - g - 1) % 2 == 0
    return r != g + 1


def topological_type(curve: RealHyperellipticCurve) -> tuple[int, int, int]:
    if curve.family is Family.FAMILY_A:
        return (2, 1, 0)
    g = len(curve.params) // 2 - 1
    return (g, g + 1, 0)


def real_ovals(curve: RealHyperellipticCurve) -> list[tuple[float, float]]:
    """x-intervals of the real ovals of an M-curve.

    The bounded ovals come first, one per interval [a_{2k}, a_{2k+1}]; the
    last entry ``(a_{2g+2}, a_1)`` stands for the oval through infinity.
    """
    if curve.family is not Family.M_CURVE:
        raise CurveError("real_ovals is defined for M-curves only")
    a = curve.params
    g = curve.genus
    bounded = [(a[2 * k - 1], a[2 * k]) for k in range(1, g + 1)]
    return bounded + [(a[-1], a[0])]


def sign_changes(curve: RealHyperellipticCurve, samples: int = 1000) -> int:
    """Count sign changes of the model polynomial along the real line."""
    if curve.family is Family.FAMILY_A:
        xs = np.linspace(-50, 50, samples)
    else:
        a = np.asarray(curve.params)
        span = a[-1] - a[0]
        gaps = np.concatenate([[a[0] - span], 0.5 * (a[1:] + a[:-1]), [a[-1] + span]])
        xs = gaps
    s = np.sign(curve.poly(xs))
    return int(np.count_nonzero(s[1:] != s[:-1]))
