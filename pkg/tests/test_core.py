import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thirring_walk import WalkParams, principal_arccos, reduce_to_zone
from thirring_walk.core import TOL_ENV, reduce_complex_momentum, sign_value, tol_scale, unitarity_error

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def test_arccos_examples():
    assert principal_arccos(1.0) == 0
    assert np.isclose(principal_arccos(0.0), np.pi / 2)
    w = principal_arccos(0.7)
    assert abs(np.cos(w) - 0.7) <= 1e-14
    assert np.isclose(w.real, 0.7953988301841436)


def test_arccos_on_cuts():
    w = principal_arccos(2.0)
    assert w.imag > 0 and abs(w.real) < 1e-15
    assert np.isclose(np.cos(w), 2.0)
    # arccos(-x) = pi - arccos(x) also on the cut
    assert np.isclose(principal_arccos(-2.0), np.pi - principal_arccos(2.0))


@given(st.floats(min_value=-1, max_value=1))
def test_arccos_real_interval(x):
    w = principal_arccos(x)
    assert w.imag == 0
    assert 0 <= w.real <= np.pi
    assert abs(np.cos(w.real) - x) <= 1e-14


@given(st.complex_numbers(max_magnitude=50, allow_nan=False, allow_infinity=False))
def test_arccos_is_inverse_everywhere(x):
    w = principal_arccos(x)
    assert 0 <= w.real <= np.pi
    assert abs(np.cos(w) - x) <= 1e-12 * max(1.0, abs(x))


def test_reduce_examples():
    assert reduce_to_zone(np.pi) == pytest.approx(np.pi)
    assert reduce_to_zone(-np.pi) == pytest.approx(np.pi)
    assert reduce_to_zone(1.5 * np.pi) == pytest.approx(-np.pi / 2)


@given(finite)
def test_reduce_properties(x):
    r = reduce_to_zone(x)
    assert -np.pi < r <= np.pi
    assert np.isclose(np.exp(1j * r), np.exp(1j * x), atol=1e-9)
    assert reduce_to_zone(r) == r
    assert np.isclose(reduce_to_zone(x + 2 * np.pi), r, atol=1e-9) or abs(abs(r) - np.pi) < 1e-9


def test_reduce_complex_keeps_imaginary_part():
    k = reduce_complex_momentum(3 * np.pi / 2 - 0.5j)
    assert np.isclose(k, -np.pi / 2 - 0.5j)


@given(st.floats(min_value=1e-6, max_value=1 - 1e-6), finite)
def test_params_invariants(m, chi):
    prm = WalkParams(m, chi)
    assert prm.mu == m and prm.mu > 0 and prm.nu > 0
    assert abs(prm.mu**2 + prm.nu**2 - 1) <= 1e-14
    assert -np.pi < prm.chi <= np.pi


@pytest.mark.parametrize("m", [0.0, 1.0, -0.2, 1.5])
def test_params_reject_bad_mass(m):
    with pytest.raises(ValueError):
        WalkParams(m)


def test_params_reject_nan_chi():
    with pytest.raises(ValueError):
        WalkParams(0.5, float("nan"))


def test_with_chi():
    prm = WalkParams(0.6).with_chi(3 * np.pi)
    assert prm.m == 0.6 and prm.chi == pytest.approx(np.pi)


def test_tolerance_scale_env(monkeypatch):
    monkeypatch.delenv(TOL_ENV, raising=False)
    assert tol_scale() == 1.0
    monkeypatch.setenv(TOL_ENV, "10")
    assert tol_scale() == 10.0
    monkeypatch.setenv(TOL_ENV, "-1")
    with pytest.raises(ValueError):
        tol_scale()


def test_sign_value():
    assert sign_value("+") == 1 and sign_value(-1) == -1
    with pytest.raises(ValueError):
        sign_value(0)


def test_unitarity_error():
    assert unitarity_error(np.eye(3)) == 0
    assert unitarity_error(2 * np.eye(2)) == pytest.approx(3)
