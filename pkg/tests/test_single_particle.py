import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thirring_walk import WalkParams
from thirring_walk.core import unitarity_error
from thirring_walk.single_particle import (
    SupportError,
    dispersion,
    eigenvector,
    g_s,
    norm_factor,
    position_step,
    walk_matrix,
)

momenta = st.floats(min_value=-np.pi, max_value=np.pi)
masses = st.floats(min_value=0.05, max_value=0.95)


def test_dispersion_examples():
    prm = WalkParams(0.6)  # nu = 0.8
    assert np.isclose(dispersion(0.0, prm), 0.6435011087932844)
    assert np.isclose(np.cos(dispersion(0.0, prm)), 0.8)
    assert np.isclose(dispersion(np.pi / 2, prm), np.pi / 2)
    assert np.isclose(dispersion(np.pi, prm), np.pi - np.arccos(0.8))


@given(momenta, masses)
def test_dispersion_even_and_pi_shift(p, m):
    prm = WalkParams(m)
    w = dispersion(p, prm)
    assert 0 <= w <= np.pi
    assert np.isclose(dispersion(-p, prm), w)
    assert np.isclose(dispersion(p + np.pi, prm), np.pi - w)


def test_g_s_examples():
    prm = WalkParams(0.6)
    assert np.isclose(g_s(0.0, 1, prm), -0.6j)
    assert np.isclose(g_s(0.0, -1, prm), 0.6j)
    assert np.isclose(g_s(np.pi / 2, 1, prm), -1.8j)


@pytest.mark.parametrize("kappa", [-0.5, -5.0, -20.0, 7.0])
def test_g_s_stable_far_off_axis(kappa):
    prm = WalkParams(0.7)
    for base in (0.3, 0.3 + np.pi / 2, 1.2 + np.pi):
        p = base + 1j * kappa
        gp, gm = g_s(p, 1, prm), g_s(p, -1, prm)
        # g_+ g_- = mu^2 exactly, also where one branch is exponentially small
        assert np.isclose(gp * gm, prm.mu**2, rtol=1e-12)
        # agrees with the literal definition where that one is accurate
        w = np.arccos(prm.nu * np.cos(p))
        lit = [-1j * (s * np.sin(w) + prm.nu * np.sin(p)) for s in (1, -1)]
        big = max(lit, key=abs)
        assert np.isclose(big, gp if abs(gp) > abs(gm) else gm, rtol=1e-12)


def test_walk_matrix_examples():
    prm = WalkParams(0.6)
    assert np.allclose(walk_matrix(0, prm), [[0.8, -0.6j], [-0.6j, 0.8]])
    assert np.allclose(walk_matrix(np.pi, prm), [[-0.8, -0.6j], [-0.6j, -0.8]])


@given(momenta, masses)
def test_walk_matrix_unitary_with_expected_spectrum(p, m):
    prm = WalkParams(m)
    w = walk_matrix(p, prm)
    assert unitarity_error(w) <= 1e-13
    assert np.isclose(abs(np.linalg.det(w)), 1)
    ev = np.linalg.eigvals(w)
    om = dispersion(p, prm)
    expected = np.array([np.exp(-1j * om), np.exp(1j * om)])
    assert np.abs(ev[:, None] - expected[None, :]).min(axis=1).max() <= 1e-12
    assert np.abs(ev[:, None] - expected[None, :]).min(axis=0).max() <= 1e-12


def test_eigenvector_at_zero():
    prm = WalkParams(0.6)
    v = eigenvector(0.0, 1, prm).vec
    assert np.allclose(v, [-1j / np.sqrt(2), -1j / np.sqrt(2)])


@given(momenta, masses, st.sampled_from([1, -1]))
def test_eigen_relation(p, m, s):
    prm = WalkParams(m)
    ev = eigenvector(p, s, prm)
    w = walk_matrix(p, prm)
    assert np.linalg.norm(w @ ev.vec - ev.eigenvalue(prm) * ev.vec) <= 1e-12
    assert np.isclose(np.linalg.norm(ev.vec), 1)
    assert np.isclose(norm_factor(p, s, prm) ** 2, prm.mu**2 + abs(g_s(p, s, prm)) ** 2)


def test_eigen_residual_example():
    prm = WalkParams(0.6)
    ev = eigenvector(1.1, -1, prm)
    assert np.linalg.norm(walk_matrix(1.1, prm) @ ev.vec - ev.eigenvalue(prm) * ev.vec) <= 1e-12


@given(momenta, masses)
def test_branches_orthogonal(p, m):
    prm = WalkParams(m)
    a, b = eigenvector(p, 1, prm).vec, eigenvector(p, -1, prm).vec
    assert abs(np.vdot(a, b)) <= 1e-12


def test_position_step_norm(rng):
    prm = WalkParams(0.6)
    psi = rng.normal(size=(2, 64)) + 1j * rng.normal(size=(2, 64))
    out = position_step(psi, prm)
    assert abs(np.linalg.norm(out) - np.linalg.norm(psi)) <= 1e-12


def test_position_step_translation_limit():
    prm = WalkParams(1e-8)
    psi = np.zeros((2, 16), dtype=complex)
    psi[0, 5] = 1
    out = position_step(psi, prm)
    assert abs(out[0, 6] - 1) < 1e-8 and np.abs(out[0, :6]).max() < 1e-8


@pytest.mark.parametrize("p", [0.0, 2 * np.pi * 5 / 48, -2 * np.pi * 17 / 48])
@pytest.mark.parametrize("s", [1, -1])
def test_position_step_plane_wave(p, s):
    # kernel exp(-i p x): the plane wave picks up exp(-i s omega(p))
    prm = WalkParams(0.6)
    x = np.arange(48)
    ev = eigenvector(p, s, prm)
    psi = np.outer(ev.vec, np.exp(-1j * p * x))
    out = position_step(psi, prm)
    assert np.abs(out - ev.eigenvalue(prm) * psi).max() <= 1e-10


def test_position_step_open_window_guard():
    prm = WalkParams(0.6)
    psi = np.zeros((2, 8), dtype=complex)
    psi[0, 3] = 1
    assert np.isclose(np.linalg.norm(position_step(psi, prm, periodic=False)), 1)
    psi[0, -1] = 1
    with pytest.raises(SupportError):
        position_step(psi, prm, periodic=False)
    psi = np.zeros((2, 8), dtype=complex)
    psi[1, 0] = 1
    with pytest.raises(SupportError):
        position_step(psi, prm, periodic=False)


def test_position_step_shape_check():
    with pytest.raises(ValueError):
        position_step(np.zeros(5), WalkParams(0.5))
