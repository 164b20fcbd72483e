import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_hermitian, random_unitary
from perturblab.funcalc import LineFn, LinePoly, LineTrig
from perturblab.linalg_core import Rng
from perturblab.specshift import (
    circle_ssf_coeffs, koplienko_eta_sample, ssf2_sample, ssf_breakpoints, ssf_mass, verify_trace_formula_sa,
)
from perturblab.trigpoly import TrigPoly
from perturblab.linalg_core import expi

seeds = st.integers(0, 2 ** 32 - 1)


def gauss():
    return LineFn([lambda x: np.exp(-x ** 2), lambda x: -2 * x * np.exp(-x ** 2),
                   lambda x: (4 * x ** 2 - 2) * np.exp(-x ** 2)])


def test_tent_for_scalar_pair():
    k = 0.8
    t = np.linspace(-1.5, 1.5, 31)
    s = ssf2_sample([[0.0]], [[k]], grid=t)
    np.testing.assert_allclose(s.values, np.clip(k - np.abs(s.grid), 0, None), atol=1e-12)
    assert ssf_mass([[0.0]], [[k]]) == pytest.approx(k ** 2)
    np.testing.assert_allclose(ssf_breakpoints([[0.0]], [[k]]), [-k, 0.0, k])


def test_zero_perturbation():
    a = random_hermitian(0, 4)
    s = ssf2_sample(a, np.zeros((4, 4)))
    assert np.all(s.values == 0)
    assert ssf_mass(a, np.zeros((4, 4))) == 0.0


def test_grid_jitter_moves_points_off_eigenvalues():
    s = ssf2_sample([[0.0]], [[1.0]], grid=[0.0, 0.5, 1.0])
    assert s.jittered == 2
    assert s.grid[1] == 0.5 and s.grid[0] != 0.0


@given(seeds, st.integers(1, 10), st.floats(1e-3, 3.0))
def test_positivity_and_decomposition(seed, dim, scale):
    a = random_hermitian(seed, dim)
    k = random_hermitian(seed ^ 11, dim, scale)
    s = ssf2_sample(a, k, points=512)
    ep = koplienko_eta_sample(a, k, s.grid)
    em = koplienko_eta_sample(a, -k, s.grid)
    tol = 1e-9 * max(1.0, scale * dim)
    assert s.values.min() >= -tol
    assert min(ep.values.min(), em.values.min()) >= -tol
    np.testing.assert_allclose(s.values, ep.values + em.values, atol=tol)


@given(seeds, st.integers(1, 12), st.floats(1e-3, 3.0))
def test_mass_identity(seed, dim, scale):
    a = random_hermitian(seed, dim)
    k = random_hermitian(seed ^ 13, dim, scale)
    tk = np.real(np.trace(k @ k))
    assert ssf_mass(a, k) == pytest.approx(tk, rel=1e-8)


@given(seeds, st.integers(1, 8))
def test_trace_formula(seed, dim):
    a = random_hermitian(seed, dim)
    k = random_hermitian(seed ^ 17, dim, 0.5)
    for f in (gauss(), LineTrig(TrigPoly.random(Rng(seed), 4))):
        rep = verify_trace_formula_sa(a, k, f)
        assert rep.rel_residual <= 1e-6


def test_trace_formula_quadratic_is_mass():
    # f = x^2 has f'' = 2, so both sides are 2 trace(K^2)
    a = random_hermitian(3, 5)
    k = random_hermitian(4, 5)
    rep = verify_trace_formula_sa(a, k, LinePoly([0, 0, 1]))
    assert rep.lhs.real == pytest.approx(2 * np.real(np.trace(k @ k)), rel=1e-10)
    assert rep.abs_residual <= 1e-9


@given(seeds, st.integers(1, 8))
def test_circle_tau_against_matrix_powers(seed, dim):
    u = random_unitary(seed, dim)
    a = random_hermitian(seed ^ 19, dim, 0.3)
    a = a * min(1.0, 3.0 / np.linalg.norm(a, 2))
    cs = circle_ssf_coeffs(u, a, 3)
    wp, wm = expi(a) @ u, expi(-a) @ u
    for n in (1, 2, 3, -2):
        mp = np.linalg.matrix_power
        ref = np.trace(mp(wp, n) - 2 * mp(u, n) + mp(wm, n))
        assert abs(cs.tau[n] - ref) <= 1e-9 * dim
        assert cs.coeffs[-n] == pytest.approx(-cs.tau[n] / n ** 2)
    assert cs.coeffs[0] is None


def test_circle_requires_small_generator():
    with pytest.raises(ValueError):
        circle_ssf_coeffs(np.eye(2), 4 * np.eye(2), 2)
