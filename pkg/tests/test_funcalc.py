import itertools
from math import comb, factorial

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from conftest import random_hermitian, random_unitary
from perturblab.funcalc import (
    CapabilityError, LineFn, LinePoly, LineTrig, apply_fn, contraction_poly_diff, dd_table, divided_diff, doi,
    higher_diff_sa, higher_diff_unitary_m2, matrix_fn, moi, quasicommutator, spectral_table,
)
from perturblab.linalg_core import Rng, eig_hermitian, eig_unitary, svd
from perturblab.trigpoly import TrigPoly

seeds = st.integers(0, 2 ** 32 - 1)


def plain_dd(f, xs):
    # textbook recursion; the oracle for well-separated points
    if len(xs) == 1:
        return f(np.array([xs[0]]))[0]
    return (plain_dd(f, xs[:-1]) - plain_dd(f, xs[1:])) / (xs[0] - xs[-1])


def sin_fn():
    return LineFn([np.sin, np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x)])


@given(seeds, st.integers(1, 4))
def test_dd_matches_recursion_when_separated(seed, k):
    h = TrigPoly.random(Rng(seed), 6)
    f = LineTrig(h)
    xs = np.sort(Rng(seed).uniform(-3, 3, size=k + 1))
    xs = xs[0] + np.arange(k + 1) * 0.7 + (xs - xs[0]) * 0.01
    assert abs(divided_diff(f, xs) - plain_dd(f, xs)) <= 1e-10 * np.abs(h.coeffs).sum()


@given(seeds, st.integers(1, 4))
def test_dd_symmetric(seed, k):
    f = LineTrig(TrigPoly.random(Rng(seed), 8))
    xs = Rng(seed ^ 1).uniform(-2, 2, size=k + 1)
    base = divided_diff(f, xs)
    for perm in itertools.permutations(range(k + 1)):
        assert abs(divided_diff(f, xs[list(perm)]) - base) <= 1e-9 * max(1, abs(base))


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_confluent_limit_is_taylor_coefficient(k):
    f = LineTrig(TrigPoly.random(Rng(5), 7))
    x = 0.37
    ref = f.deriv(k, np.array([x]))[0] / factorial(k)
    assert abs(divided_diff(f, [x] * (k + 1)) - ref) <= 1e-10 * max(1, abs(ref))
    # and continuity into the confluent point
    near = x + 1e-7 * np.arange(k + 1)
    assert abs(divided_diff(f, near) - ref) <= 1e-5 * max(1, abs(ref))


def test_polynomial_dd_closed_form():
    # D^k x^k = 1 and D^k of lower degree vanishes
    for k in range(1, 6):
        p = LinePoly([0] * k + [1])
        assert divided_diff(p, np.linspace(-1, 2, k + 1)) == pytest.approx(1.0)
        assert divided_diff(p, [0.5] * (k + 1)) == pytest.approx(1.0)
        assert abs(divided_diff(LinePoly([1, 2]), np.linspace(0, 1, k + 2))) < 1e-12 if k >= 1 else True


def test_circle_dd_closed_form():
    # (zeta^n - tau^n) / (zeta - tau) = sum_a zeta^a tau^(n-1-a)
    n = 5
    f = TrigPoly.monomial(n)
    z, t = np.exp(0.4j), np.exp(2.1j)
    ref = sum(z ** a * t ** (n - 1 - a) for a in range(n))
    assert abs(divided_diff(f, [z, t]) - ref) <= 1e-12
    assert abs(divided_diff(f, [z, z]) - n * z ** (n - 1)) <= 1e-12
    g = TrigPoly.monomial(-2)
    assert abs(divided_diff(g, [z, t]) - (z ** -2 - t ** -2) / (z - t)) <= 1e-12


def test_capability_error_for_finite_derivative_list():
    f = LineFn([np.sin, np.cos])
    assert abs(divided_diff(f, [0.0, 1.0]) - np.sin(1.0)) < 1e-14
    with pytest.raises(CapabilityError):
        divided_diff(f, [0.0, 1e-9])
    with pytest.raises(CapabilityError):
        divided_diff(f, [0.0, 0.5, 1e-9])
    # exactly confluent tuples need only the derivative of the tuple's order
    assert abs(divided_diff(f, [0.3, 0.3]) - np.cos(0.3)) < 1e-15
    # a longer list covers the same near-confluent tuple
    g = LineFn([np.sin, np.cos, lambda x: -np.sin(x)])
    assert abs(divided_diff(g, [0.0, 1e-9]) - np.sin(1e-9) / 1e-9) < 1e-15


def test_dd_table_shape_and_values():
    f = sin_fn()
    g1, g2 = np.array([0.0, 1.0]), np.array([2.0, 3.0, 4.0])
    t = dd_table(f, g1, g2)
    assert t.shape == (2, 3)
    assert abs(t[1, 2] - (np.sin(1.0) - np.sin(4.0)) / (1.0 - 4.0)) < 1e-14
    with pytest.raises(ValueError):
        divided_diff(f, [0.0, 1.0], k=2)


@given(seeds, st.integers(1, 8))
def test_matrix_fn_against_expm(seed, dim):
    a = random_hermitian(seed, dim)
    f = LineTrig(TrigPoly.monomial(1))  # exp(i x)
    np.testing.assert_allclose(matrix_fn(a, f), scipy.linalg.expm(1j * a), atol=1e-10)
    u = random_unitary(seed, dim)
    np.testing.assert_allclose(matrix_fn(u, TrigPoly.from_dict({2: 1.0, -1: 0.5})),
                               u @ u + 0.5 * u.conj().T, atol=1e-10)


def test_domain_mismatch():
    with pytest.raises(ValueError):
        apply_fn(eig_hermitian(np.eye(2)), TrigPoly.monomial(1))
    with pytest.raises(ValueError):
        apply_fn(eig_unitary(np.eye(2)), LinePoly([0, 1]))


@given(seeds, st.integers(1, 10), st.floats(1e-6, 2.0))
def test_doi_reproduces_difference(seed, dim, scale):
    a = random_hermitian(seed, dim)
    b = a + random_hermitian(seed ^ 7, dim, scale)
    f = LineTrig(TrigPoly.random(Rng(seed), 12))
    ea, eb = eig_hermitian(a), eig_hermitian(b)
    lhs = doi(spectral_table(f, ea, eb), ea, eb, a - b)
    ref = apply_fn(ea, f) - apply_fn(eb, f)
    # the direct difference carries rounding of order eps * ||f(A)||
    floor = 1e-13 * np.linalg.norm(apply_fn(ea, f))
    assert np.linalg.norm(lhs - ref) <= 1e-9 * np.linalg.norm(ref) + floor


@pytest.mark.parametrize("m", [1, 2, 3])
@given(seed=seeds, dim=st.integers(1, 6))
def test_higher_diff_routes_agree(m, seed, dim):
    a = random_hermitian(seed, dim)
    k = random_hermitian(seed ^ 3, dim, 0.3)
    f = LineTrig(TrigPoly.random(Rng(seed), 8))
    d = higher_diff_sa(a, k, m, f)
    e = higher_diff_sa(a, k, m, f, route="moi")
    assert np.linalg.norm(d - e) <= 1e-8 * max(1.0, np.linalg.norm(d))


def test_quadratic_second_difference():
    a = random_hermitian(1, 5)
    k = random_hermitian(2, 5)
    d = higher_diff_sa(a, k, 2, LinePoly([0, 0, 1]))
    np.testing.assert_allclose(d, 2 * k @ k, atol=1e-10)
    assert np.allclose(higher_diff_sa(a, 0 * k, 2, LinePoly([0, 0, 1])), 0)


@given(seeds, st.integers(1, 6))
def test_unitary_formula_route(seed, dim):
    u = random_unitary(seed, dim)
    a = random_hermitian(seed ^ 9, dim, 0.2)
    h = TrigPoly.random(Rng(seed), 6)
    d = higher_diff_unitary_m2(u, a, h)
    e = higher_diff_unitary_m2(u, a, h, route="formula")
    assert np.linalg.norm(d - e) <= 1e-8 * max(1.0, np.linalg.norm(d))


@given(seeds, st.integers(1, 8))
def test_quasicommutator_routes(seed, dim):
    a = random_hermitian(seed, dim)
    b = random_hermitian(seed ^ 5, dim)
    q = np.random.default_rng(seed).standard_normal((dim, dim))
    f = LineTrig(TrigPoly.random(Rng(seed), 8))
    d = quasicommutator(a, b, q, f)
    e = quasicommutator(a, b, q, f, route="doi")
    assert np.linalg.norm(d - e) <= 1e-9 * max(1.0, np.linalg.norm(d))
    # commuting Q and A = B give zero
    assert np.allclose(quasicommutator(a, a, np.eye(dim), f), 0, atol=1e-12)


def test_moi_argument_checks():
    e = eig_hermitian(np.eye(2))
    with pytest.raises(ValueError):
        moi(np.ones((2, 2)), [e, e], [np.eye(2), np.eye(2)])
    with pytest.raises(ValueError):
        higher_diff_sa(np.eye(2), np.eye(2), 4, LinePoly([1]), route="moi")


@given(seeds, st.integers(1, 6), st.integers(1, 3))
def test_contraction_direct_powers(seed, dim, m):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((2, dim, dim))
    t = g[0] * (0.9 / np.linalg.norm(g[0], 2))
    r = g[1] * (0.9 / np.linalg.norm(g[1], 2))
    n = 4
    f = TrigPoly.monomial(n)
    ref = sum((-1) ** k * comb(m, k) * np.linalg.matrix_power(t + (k / m) * (r - t), n) for k in range(m + 1))
    np.testing.assert_allclose(contraction_poly_diff(t, r, f, m), ref, atol=1e-12)
    assert np.allclose(contraction_poly_diff(t, t, f, m), 0, atol=1e-13)


def test_contraction_closed_forms():
    rng = np.random.default_rng(0)
    t = rng.standard_normal((4, 4))
    t *= 0.5 / np.linalg.norm(t, 2)
    r = rng.standard_normal((4, 4))
    r *= 0.5 / np.linalg.norm(r, 2)
    np.testing.assert_allclose(contraction_poly_diff(t, r, TrigPoly.monomial(3)),
                               np.linalg.matrix_power(t, 3) - np.linalg.matrix_power(r, 3), atol=1e-14)
    np.testing.assert_allclose(contraction_poly_diff(t, r, TrigPoly.monomial(2), 2),
                               (r - t) @ (r - t) / 2, atol=1e-14)
    with pytest.raises(ValueError):
        contraction_poly_diff(t, r, TrigPoly.monomial(-1))
    with pytest.raises(ValueError):
        contraction_poly_diff(2 * np.eye(2), np.eye(2), TrigPoly.monomial(1))
    assert svd(t).s0 <= 1
