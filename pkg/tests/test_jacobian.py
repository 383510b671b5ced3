import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from realdivisor.curves import family_a_eps, make_m_curve
from realdivisor.numerics import complete_elliptic_K as K, rank_mod2
from realdivisor.periods import compute_periods, reflection_normal_form
from realdivisor.jacobian import (lattice_side_lengths, real_component_count, vol_identity_component,
                                  vol_real)


def _moduli(eps):
    return ((1 - eps) ** 2 * (2 + eps) / 4, (1 + eps) ** 2 * (2 - eps) / 4,
            (2 - eps) / 4, (2 + eps) / 4)


def test_vol_identity_examples():
    assert vol_identity_component(np.eye(3)) == pytest.approx(1.0)
    assert vol_identity_component(np.diag([0.5, 0.5])) == pytest.approx(2.0)


def test_vol_x025_against_elliptic_formula(x025):
    m1, m2, m3, m4 = _moduli(0.25)
    ref = 1 / math.sqrt(K(m1) / (2 * K(m2)) * K(m3) / (2 * K(m4)))
    assert vol_identity_component(x025[1].T) == pytest.approx(ref, rel=1e-9)


def test_component_counts():
    assert real_component_count(np.array([[0, 1], [1, 0]])) == 1
    assert real_component_count(np.zeros((2, 2), dtype=int)) == 4
    assert real_component_count(reflection_normal_form(0, 0, 5, "R_m")) == 1


def test_side_lengths_x025(x025):
    m1, m2, _, _ = _moduli(0.25)
    l1, _ = lattice_side_lengths(x025[1].T)
    assert l1 == pytest.approx(math.sqrt(2 * K(m2) / K(m1)), rel=1e-9)


def test_side_lengths_small_eps():
    l1, l2 = vol_real(compute_periods(family_a_eps(1e-4))).lattice_side_lengths
    assert l1 == pytest.approx(math.sqrt(2), abs=1e-3)
    assert l2 == pytest.approx(math.sqrt(2), abs=1e-3)


def test_identity_T():
    T = np.eye(3)
    assert lattice_side_lengths(T) == pytest.approx((1.0, 1.0, 1.0))


@pytest.mark.parametrize("curve", [family_a_eps(0.3), make_m_curve([0, 1, 2, 3, 4, 5]),
                                   make_m_curve([0, 1, 2.5, 3, 4, 6, 7, 9])], ids=str)
def test_total_volume_formula(curve):
    p = compute_periods(curve)
    rep = vol_real(p)
    r = curve.topo_type[1]
    assert rep.component_count == 2 ** (r - 1)
    assert rep.vol_total == pytest.approx(2 ** (r - 1) / math.sqrt(np.linalg.det(p.T)), rel=1e-12)
    assert set(rep.to_dict()) >= {"gamma", "component_count", "vol_identity", "vol_total"}


@given(st.integers(1, 5), st.floats(0.1, 10), st.integers(0, 2 ** 32 - 1))
def test_scaling(g, c, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(g, g))
    T = X @ X.T + g * np.eye(g)
    assert vol_identity_component(c * T) == pytest.approx(
        c ** (-g / 2) * vol_identity_component(T), rel=1e-12)
    assert np.allclose(lattice_side_lengths(c * T), np.array(lattice_side_lengths(T)) / math.sqrt(c),
                       rtol=1e-12)


@given(st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
def test_unimodular_congruence(g, seed):
    rng = np.random.default_rng(seed)
    M = rng.integers(0, 2, size=(g, g))
    M = np.triu(M) + np.triu(M, 1).T
    while True:
        U = rng.integers(-2, 3, size=(g, g))
        if rank_mod2(U) == g:
            break
    assert real_component_count(U.T @ M @ U) == real_component_count(M)
