import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from realdivisor.curves import (CurveError, Family, RealHyperellipticCurve, eps_of, family_a_eps,
                                is_admissible, make_family_a, make_m_curve, real_ovals,
                                sign_changes, topological_type)


def test_xeps_params():
    c = family_a_eps(0.25)
    assert c.params == (0.5625, 1.0, 1.5625)
    assert c.family is Family.FAMILY_A
    assert topological_type(c) == (2, 1, 0)
    assert eps_of(c) == pytest.approx(0.25)


def test_generic_family_a():
    c = make_family_a(1, 2, 3)
    assert c.genus == 2 and c.n_ovals == 1
    assert eps_of(c) is None


@pytest.mark.parametrize("params", [(1, 1, 2), (0, 1, 2), (-1, 1, 2), (3, 2, 1)])
def test_family_a_rejects(params):
    with pytest.raises(CurveError):
        make_family_a(*params)


def test_m_curves():
    c = make_m_curve([0, 1, 2, 3, 4, 5])
    assert c.genus == 2 and topological_type(c) == (2, 3, 0)
    assert topological_type(make_m_curve(range(8))) == (3, 4, 0)


@pytest.mark.parametrize("roots", [[-1, 1], [0, 1, 2], [0, 1, 1, 2, 3, 4], [1, 0, 2, 3, 4, 5]])
def test_m_curve_rejects(roots):
    with pytest.raises(CurveError):
        make_m_curve(roots)


def test_family_a_positive_on_real_line():
    c = family_a_eps(0.45)
    x = np.linspace(-50, 50, 1000)
    assert np.all(c.poly(x) > 0)
    assert sign_changes(c) == 0


@given(st.lists(st.floats(-50, 50), min_size=4, max_size=14, unique=True).filter(
    lambda v: len(v) % 2 == 0 and min(np.diff(sorted(v))) > 1e-3))
def test_m_curve_sign_pattern(roots):
    c = make_m_curve(sorted(roots))
    assert sign_changes(c) == len(roots)
    ovals = real_ovals(c)
    assert len(ovals) == c.genus + 1
    for lo, hi in ovals[:-1]:
        assert c.poly(np.array([0.5 * (lo + hi)]))[0] >= 0


@given(st.integers(1, 8), st.integers(0, 10), st.integers(0, 1))
def test_admissibility_rules(g, r, a):
    ok = is_admissible(g, r, a)
    if ok:
        assert r <= g + 1
        if r == 0:
            assert a == 1
        if r == g + 1:
            assert a == 0
        if a == 0:
            assert (r - g - 1) % 2 == 0


@given(st.floats(0.01, 0.99))
def test_emitted_types_admissible(eps):
    assert is_admissible(*topological_type(family_a_eps(eps)))


def test_json_round_trip():
    for c in (family_a_eps(0.3), make_m_curve([-2, -1, 0, 1.5, 2, 4])):
        back = RealHyperellipticCurve.from_json(c.to_json())
        assert back == c
        assert json.loads(c.to_json())["family"] == c.family.value


def test_from_dict_rejects_unknown_family():
    with pytest.raises(CurveError):
        RealHyperellipticCurve.from_dict({"family": "Quartic", "params": [1, 2]})
