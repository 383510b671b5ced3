"""Metric invariants of the real part of a Jacobian from its Comessatti data."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .numerics import spd_sqrt_factor, rank_mod2
from .periods import ComessattiPeriods


@dataclass(frozen=True)
class RealJacobianReport:
    g: int
    gamma: int
    component_count: int
    vol_identity: float
    vol_total: float
    lattice_side_lengths: tuple[float, ...]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lattice_side_lengths"] = list(self.lattice_side_lengths)
        return d


def vol_identity_component(T) -> float:
    """Volume of the identity component, det(T)^(-1/2)."""
    B = spd_sqrt_factor(T)
    return float(1.0 / np.prod(np.diag(B)))


def real_component_count(M) -> int:
    M = np.asarray(M)
    return 2 ** (M.shape[0] - rank_mod2(M))


def lattice_side_lengths(T) -> tuple[float, ...]:
    """Canonical-metric lengths of the real lattice generators, sqrt((T^-1)_ii)."""
    spd_sqrt_factor(T)  # validates
    Tinv = np.linalg.inv(np.asarray(T, dtype=float))
    return tuple(float(math.sqrt(Tinv[i, i])) for i in range(Tinv.shape[0]))


def vol_real(periods: ComessattiPeriods) -> RealJacobianReport:
    gamma = rank_mod2(periods.M)
    count = 2 ** (periods.g - gamma)
    vol0 = vol_identity_component(periods.T)
    return RealJacobianReport(
        g=periods.g,
        gamma=gamma,
        component_count=count,
        vol_identity=vol0,
        vol_total=count * vol0,
        lattice_side_lengths=lattice_side_lengths(periods.T),
    )
