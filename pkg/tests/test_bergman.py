import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from realdivisor.bergman import (SamplingError, TorusPolyline, abel_jacobi_real_polyline,
                                 ell_integral, eta_metric, family_a_frame_prefactors,
                                 orthonormal_frame, polyline_length, polylines_to_csv,
                                 real_locus_length, to_theta)
from realdivisor.bounds import K_HALF, QUARTER_SCALE, xeps_closed_form_prefactors, xeps_quarter_points
from realdivisor.curves import family_a_eps, make_m_curve
from realdivisor.periods import compute_periods

# canonical-metric lengths, cross-checked against polyline sums at n = 4096
LEN_X025 = 1.2079090518
LEN_M6 = 3.6972176802


def test_frame_examples():
    assert np.allclose(orthonormal_frame(np.eye(2)), np.eye(2))
    assert np.allclose(orthonormal_frame(np.diag([4.0, 0.25])), np.diag([0.5, 2.0]))


@given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_frame_orthonormal(g, seed):
    X = np.random.default_rng(seed).normal(size=(g, g))
    T = X @ X.T + 0.5 * np.eye(g)
    C = orthonormal_frame(T)
    assert np.max(np.abs(C.T @ T @ C - np.eye(g))) < 1e-12 * max(1.0, np.linalg.cond(T))


def test_family_a_prefactors_are_elliptic(x025):
    eps = 0.25
    h1, h2 = xeps_closed_form_prefactors(eps)
    p1, p2 = family_a_frame_prefactors(x025[1])
    assert p1 == pytest.approx(math.sqrt(eps) * h1, rel=1e-9)
    assert p2 == pytest.approx(math.sqrt(eps) * h2, rel=1e-9)


def test_eta_metric_inverts_gram(x025):
    p = x025[1]
    A = np.asarray(p.a_periods)
    assert np.allclose(eta_metric(p) @ (A @ p.T @ A.T), np.eye(2), atol=1e-12)


def test_lengths(x025, mcurve6):
    assert real_locus_length(*x025) == pytest.approx(LEN_X025, rel=1e-9)
    assert real_locus_length(*mcurve6) == pytest.approx(LEN_M6, rel=1e-9)


def test_length_bounded_by_ell(x025):
    # the comparison holds for the quarter-scale frame; canonical lengths are 4x larger
    eps = 0.25
    L = real_locus_length(*x025)
    bound = math.sqrt(2) / (4 * K_HALF) * math.sqrt(eps) * ell_integral(eps)
    assert QUARTER_SCALE * L <= bound
    assert L > bound


def test_ell_limits():
    assert abs(ell_integral(0.01) - math.pi) < 0.15
    for eps in (0.05, 0.1, 0.25, 0.45):
        assert ell_integral(eps) < 4


def test_length_scaling(x025):
    curve, p = x025
    doubled = dataclasses.replace(p, T=2 * p.T)
    assert real_locus_length(curve, doubled) == pytest.approx(
        real_locus_length(curve, p) / math.sqrt(2), rel=1e-12)


def test_family_a_polyline(x025, x025_polyline):
    poly = x025_polyline
    assert poly.closed and poly.component_label == ()
    assert poly.closure_defect < 1e-6
    assert np.all((poly.points >= 0) & (poly.points < 1))
    d = np.mod(poly.points - poly.lifted + 0.5, 1.0) - 0.5
    assert np.max(np.abs(d)) < 1e-12


def test_quarter_point(x025, x025_polyline):
    q = xeps_quarter_points(0.25, None, x025[1])
    n = len(x025_polyline.lifted)
    theta = to_theta(x025[1].T, x025_polyline.lifted[n // 4])
    assert theta == pytest.approx([q["u"], -q["v"]], abs=1e-6)


def test_family_a_reflection_symmetry(x025, x025_polyline):
    """z -> -z fixes x = 0 and x = inf and acts on theta as a reflection."""
    theta = to_theta(x025[1].T, x025_polyline.lifted)
    n = len(theta)
    u = xeps_quarter_points(0.25, None, x025[1])["u"]
    k = np.arange(1, n // 2)
    assert np.max(np.abs(theta[n // 2 - k, 0] - (2 * u - theta[k, 0]))) < 1e-9
    assert np.max(np.abs(theta[n // 2 - k, 1] - theta[k, 1])) < 1e-9


def test_m_curve_polylines(mcurve6):
    polys = abel_jacobi_real_polyline(*mcurve6, n_samples=256)
    assert len(polys) == 3
    assert len({p.component_label for p in polys}) == 3
    for p in polys:
        assert p.closure_defect < 1e-6
        assert p.advance == p.component_label or any(p.advance)


@pytest.mark.parametrize("which", ["x025", "mcurve6"])
def test_polyline_length_converges(which, request):
    curve, p = request.getfixturevalue(which)
    polys = abel_jacobi_real_polyline(curve, p, 4096)
    total = sum(polyline_length(q, p.T) for q in polys)
    assert total == pytest.approx(real_locus_length(curve, p), rel=5e-3)


def test_minimum_samples(x025):
    with pytest.raises(ValueError):
        abel_jacobi_real_polyline(*x025, n_samples=32)


def test_coarse_polyline_rejected():
    pts = np.array([[0.0, 0.0], [0.5, 0.0]])
    with pytest.raises(SamplingError):
        TorusPolyline(g=2, points=pts, component_label=(), closed=True, lifted=pts, s=np.zeros(2),
                      advance=(0, 0))


def test_csv(mcurve6):
    polys = abel_jacobi_real_polyline(*mcurve6, n_samples=64)
    lines = polylines_to_csv(polys).splitlines()
    assert lines[0] == "oval_id,s,x1,x2"
    assert len(lines) == 1 + 3 * 64
