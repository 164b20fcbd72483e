import numpy as np
import pytest
from hypothesis import given, strategies as st

from perturblab.besov import bernstein_split
from perturblab.funcalc import CapabilityError
from perturblab.hankel import (
    block_T, corner_diff_section, corner_lower_constant, hankel_matrix, hankel_section, lacunary_g,
    orthogonality_defect, rho_partition, smallest_lower_constant, sv_envelope_check,
)
from perturblab.linalg_core import Rng
from perturblab.trigpoly import TrigPoly


def test_hankel_matrix_layout():
    m = hankel_matrix([1, 2, 3], 2)
    np.testing.assert_array_equal(m, [[1, 2], [2, 3]])
    h = TrigPoly.from_dict({-1: 5.0, -2: 7.0, 3: 1.0})
    np.testing.assert_array_equal(hankel_section(h, 2).matrix, [[5, 7], [7, 0]])
    np.testing.assert_array_equal(hankel_section(h, 2, "analytic").matrix, [[0, 0], [0, 1]])
    with pytest.raises(ValueError):
        hankel_section(h, 2, "sideways")


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 24), st.floats(-np.pi, np.pi))
def test_section_spectrum_rotation_invariant(seed, N, lam):
    # rotating the symbol multiplies entries by e^{i(j+k+1)lam}: a diagonal
    # unitary on each side, so singular values are unchanged
    h = TrigPoly.random(Rng(seed), 2 * N)
    s = hankel_section(h, N).spectrum().values
    np.testing.assert_allclose(s, np.linalg.svd(hankel_section(h, N).matrix, compute_uv=False),
                               atol=1e-6 * max(s[0], 1e-300))
    np.testing.assert_allclose(hankel_section(h.rotate(lam), N).spectrum().values, s, atol=1e-6 * max(s[0], 1e-300))


def test_lacunary_symbol():
    g = lacunary_g(0.5, 2)
    assert g.degree == 16
    assert g.coef(4) == pytest.approx(0.5) and g.coef(-16) == pytest.approx(0.25) and g.coef(8) == 0
    with pytest.raises(ValueError):
        lacunary_g(0.0, 2)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.0])
def test_block_orthogonality(alpha):
    g = lacunary_g(alpha, 4)
    for n in range(1, 5):
        assert block_T(g, n).shape == (3 * 4 ** (n - 1),) * 2
        assert orthogonality_defect(g, alpha, n) <= 1e-10


def test_constant_symbol_has_zero_sections():
    c = TrigPoly.constant(3.0)
    assert np.all(hankel_section(c, 8).spectrum().values == 0)
    assert np.all(corner_diff_section(c, 8).spectrum().values == 0)


def test_corner_matches_operator_model():
    # build U (backward shift) and V on a periodic window large enough that
    # the wrap-around does not reach the corner blocks of a degree-d symbol
    d, N = 3, 6
    L = 4 * N
    n = 2 * L
    U = np.zeros((n, n), complex)
    U[(np.arange(n) - 1) % n, np.arange(n)] = 1.0  # z^j -> z^{j-1}
    zero = L  # index of z^0
    V = U.copy()
    V[zero - 1, zero] = -1.0  # V 1 = -zbar
    h = TrigPoly.random(Rng(2), d)

    def fn(W):
        w, vec = np.linalg.eig(W)
        return (vec * h(w)) @ np.linalg.inv(vec)

    full = fn(V) - fn(U)
    block = full[zero - N:zero + N, zero - N:zero + N]
    np.testing.assert_allclose(corner_diff_section(h, N).matrix, block, atol=1e-10)


def test_corner_spectrum_is_full_spectrum():
    h = TrigPoly.random(Rng(4), 12)
    c = corner_diff_section(h, 16)
    np.testing.assert_allclose(c.spectrum().values, np.linalg.svd(c.matrix, compute_uv=False), atol=1e-9)


def test_envelope_on_lacunary_symbol():
    alpha = 0.5
    g = lacunary_g(alpha, 4)
    rep = sv_envelope_check(g, alpha, 256)
    assert all(rep.lower_flags.values())
    assert np.isfinite(rep.c_upper)
    assert rep.seminorm == pytest.approx(2.0, rel=1e-10)


def test_rank_of_bernstein_low_part():
    alpha = 0.5
    g = lacunary_g(alpha, 4)
    sp = bernstein_split(g, 16)
    # a degree-d symbol gives corner blocks of rank <= d each
    rank = corner_diff_section(sp.f1, 64).spectrum().rank(1e-10)
    assert rank <= 2 * 16 + 1


def test_rho_partition_identity():
    rho = rho_partition()
    theta = np.linspace(0, 2 * np.pi, 1001)
    z = np.exp(1j * theta)
    np.testing.assert_allclose(rho(z) + rho(1j * z), 1.0, atol=1e-8)
    near = np.abs(z - 1) < np.sin(np.pi / 16)
    assert np.abs(rho(z[near])).max() <= 1e-6
    # even
    np.testing.assert_allclose(rho(z), rho(np.conj(z)), atol=1e-10)


def test_rho_partition_capability():
    with pytest.raises(CapabilityError, match="need D >="):
        rho_partition(8)


def test_lower_constants_finite_and_infinite():
    alpha = 0.5
    g = lacunary_g(alpha, 3)
    rep = smallest_lower_constant(g, alpha, count=8)
    assert np.isfinite(rep.c_min) and rep.c_min > 0
    assert smallest_lower_constant(TrigPoly.constant(1.0), alpha, count=4, N=8).c_min == np.inf
    assert corner_lower_constant(TrigPoly.constant(1.0), alpha, 4, 8) == np.inf
