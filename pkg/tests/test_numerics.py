import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate
from scipy.special import ellipk

from realdivisor.numerics import (DomainError, FactorizationError, QuadratureError, QuadratureSpec,
                                  SingularIntegrand, Singularity, carlson_rf, complete_elliptic_K,
                                  incomplete_elliptic_F, integrate_singular, periodic_antiderivative,
                                  rank_mod2, spd_sqrt_factor)

# frozen from scipy.special.ellipk and scipy.integrate.quad
K_HALF = 1.8540746773013719
K_0316 = 1.7236114974339793
F_025 = 0.8482386269761321


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0)
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=-1)
    with pytest.raises(ValueError):
        QuadratureSpec(max_levels=0)
    assert QuadratureSpec().to_dict()["method"] == "tanh-sinh"


def test_integrand_declaration_checked():
    with pytest.raises(DomainError):
        SingularIntegrand(lambda t: t, Singularity.NONE, (1.0, 0.0))
    with pytest.raises(DomainError):
        SingularIntegrand(lambda t: t, Singularity.NONE, (0.0, math.inf))
    with pytest.raises(DomainError):
        SingularIntegrand(lambda t: t, Singularity.DECAY_AT_INFINITY, (0.0, 1.0))


def test_K_values():
    assert complete_elliptic_K(0.0) == pytest.approx(math.pi / 2, abs=1e-15)
    assert complete_elliptic_K(0.5) == pytest.approx(K_HALF, rel=1e-14)
    assert complete_elliptic_K(0.31640625) == pytest.approx(K_0316, rel=1e-13)
    assert K_0316 == pytest.approx(ellipk(0.31640625), rel=1e-15)


@pytest.mark.parametrize("m", [-0.1, 1.0, 1.5])
def test_K_domain(m):
    with pytest.raises(DomainError):
        complete_elliptic_K(m)


def test_K_matches_defining_integral_random():
    rng = np.random.default_rng(1)
    for m in rng.uniform(0, 0.99, 100):
        f = SingularIntegrand(lambda t, m=m: 1 / np.sqrt((1 + t) * (1 - m * t * t)),
                              Singularity.INV_SQRT_RIGHT, (0.0, 1.0))
        val, _ = integrate_singular(f)
        assert complete_elliptic_K(m) == pytest.approx(val, rel=1e-10)


def test_F_values():
    assert incomplete_elliptic_F(0.0, 0.7) == 0.0
    assert incomplete_elliptic_F(1.0, math.sqrt(0.5)) == complete_elliptic_K(0.5)
    eps = 0.25
    a = math.sqrt(2 * eps - eps * eps)
    k = 2 / ((eps + 1) * math.sqrt(2 - eps))
    assert k > 1
    assert incomplete_elliptic_F(a, k) == pytest.approx(F_025, rel=1e-12)
    ref = integrate.quad(lambda t: 1 / math.sqrt((1 - t * t) * (1 - k * k * t * t)), 0, a,
                         epsabs=1e-14, epsrel=1e-14)[0]
    assert F_025 == pytest.approx(ref, rel=1e-10)


def test_F_domain():
    with pytest.raises(DomainError):
        incomplete_elliptic_F(1.2, 0.5)
    with pytest.raises(DomainError):
        incomplete_elliptic_F(0.9, 2.0)


def test_carlson_rf_symmetric_point():
    assert carlson_rf(2.0, 2.0, 2.0) == pytest.approx(2 ** -0.5, rel=1e-14)
    assert carlson_rf(0.0, 1.0, 1.0) == pytest.approx(math.pi / 2, rel=1e-14)


@given(st.floats(0.0, 0.999), st.floats(0.0, 0.999), st.floats(0.0, 0.99))
def test_F_monotone_in_amplitude(a1, a2, m):
    lo, hi = sorted((a1, a2))
    k = math.sqrt(m)
    assert incomplete_elliptic_F(lo, k) <= incomplete_elliptic_F(hi, k) + 1e-15


@given(st.floats(0.0, 0.99))
def test_F_at_one_is_K(m):
    assert incomplete_elliptic_F(1.0, math.sqrt(m)) == pytest.approx(complete_elliptic_K(m), rel=1e-12)


def test_arcsine_integral():
    f = SingularIntegrand(lambda t: np.ones_like(t), Singularity.INV_SQRT_BOTH, (0.0, 1.0))
    val, err = integrate_singular(f)
    assert val == pytest.approx(math.pi, abs=1e-12)
    assert err < 1e-9


def test_rational_integrals_infinite_interval():
    f = SingularIntegrand(lambda t: 1 / ((t + 0.75) * np.sqrt(1 + t)),
                          Singularity.INV_SQRT_LEFT | Singularity.DECAY_AT_INFINITY, (0.0, math.inf))
    assert integrate_singular(f)[0] == pytest.approx(4 * math.pi / (3 * math.sqrt(3)), abs=1e-10)
    g = SingularIntegrand(lambda t: 1 / ((t + 0.75) * np.sqrt(1 + t)),
                          Singularity.DECAY_AT_INFINITY, (0.0, math.inf))
    assert integrate_singular(g)[0] == pytest.approx(math.log(9), abs=1e-10)


def test_refinement_exhausted_carries_estimate():
    f = SingularIntegrand(lambda t: np.cos(40 * t), Singularity.INV_SQRT_LEFT, (0.0, 10.0))
    with pytest.raises(QuadratureError) as info:
        integrate_singular(f, QuadratureSpec(1e-14, 1e-14, max_levels=2))
    assert math.isfinite(info.value.value)


@given(st.floats(0.05, 0.95), st.sampled_from(list(Singularity)[:4]))
def test_bisection_invariance(frac, pattern):
    if pattern & Singularity.DECAY_AT_INFINITY:
        pattern = Singularity.INV_SQRT_BOTH
    a, b = 0.5, 2.5
    f = SingularIntegrand(lambda t: np.exp(-t) / (1 + t * t), pattern, (a, b))
    c = a + frac * (b - a)
    left, right = f.split(c)
    spec = QuadratureSpec()
    whole = integrate_singular(f, spec)[0]
    parts = integrate_singular(left, spec)[0] + integrate_singular(right, spec)[0]
    assert abs(whole - parts) <= 2 * spec.abs_tol


@given(st.floats(1.5, 20.0))
def test_bisection_invariance_infinite(c):
    f = SingularIntegrand(lambda t: 1 / ((t + 0.75) * np.sqrt(1 + t)),
                          Singularity.INV_SQRT_LEFT | Singularity.DECAY_AT_INFINITY, (0.0, math.inf))
    left, right = f.split(c)
    total = integrate_singular(left)[0] + integrate_singular(right)[0]
    assert abs(total - integrate_singular(f)[0]) <= 2e-10


def test_spd_factor_examples(x025):
    assert np.array_equal(spd_sqrt_factor(np.eye(2)), np.eye(2))
    assert np.allclose(spd_sqrt_factor(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=0)
    T = x025[1].T
    B = spd_sqrt_factor(T)
    assert np.max(np.abs(B.T @ B - T)) < 1e-12
    assert np.linalg.det(B) > 0


def test_spd_factor_reports_minor():
    with pytest.raises(FactorizationError) as info:
        spd_sqrt_factor(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert info.value.minor == 2
    with pytest.raises(FactorizationError):
        spd_sqrt_factor(np.array([[1.0, 0.5], [0.0, 1.0]]))


@given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_spd_round_trip_against_numpy(g, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(g, g))
    T = X @ X.T + g * np.eye(g)
    B = spd_sqrt_factor(T)
    assert np.max(np.abs(B.T @ B - T)) <= 1e-12 * np.max(np.abs(T))
    assert np.allclose(B, np.linalg.cholesky(T).T, rtol=1e-10, atol=1e-12)
    assert np.allclose(B, np.triu(B))


def test_rank_mod2_examples():
    assert rank_mod2(np.zeros((3, 3), dtype=int)) == 0
    assert rank_mod2(np.fliplr(np.eye(2, dtype=int))) == 2
    assert rank_mod2(np.ones((3, 3), dtype=int) - np.eye(3, dtype=int)) == 2


@pytest.mark.parametrize("n", range(1, 9))
def test_rank_ones_minus_identity(n):
    M = np.ones((n, n), dtype=int) - np.eye(n, dtype=int)
    assert rank_mod2(M) == (n if n % 2 == 0 else n - 1)


@given(st.integers(1, 7), st.integers(1, 7), st.integers(0, 2 ** 32 - 1))
def test_rank_mod2_transpose_and_bounds(r, c, seed):
    M = np.random.default_rng(seed).integers(-3, 4, size=(r, c))
    k = rank_mod2(M)
    assert k == rank_mod2(M.T)
    assert 0 <= k <= min(r, c)
    assert k == rank_mod2(M % 2 + 2 * M)


def test_periodic_antiderivative_trig():
    n = 64
    s = 2 * math.pi * np.arange(n) / n
    cum, total = periodic_antiderivative(np.cos(s) + 0.5, 2 * math.pi)
    assert np.allclose(cum, np.sin(s) + 0.5 * s, atol=1e-13)
    assert total == pytest.approx(math.pi, abs=1e-13)
