import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_hermitian
from perturblab import _backend
from perturblab.linalg_core import JACOBI_MAX_SWEEPS, JACOBI_TOL

KERNELS = _backend.kernels()


def test_python_fallback_always_available():
    assert "python" in KERNELS
    assert _backend.BACKEND in ("compiled", "python")


@pytest.mark.skipif("compiled" not in KERNELS, reason="compiled core not built")
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 20))
def test_backends_agree(seed, dim):
    h = random_hermitian(seed, dim)
    wc, vc, _, offc = KERNELS["compiled"](h, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    wp, vp, _, offp = KERNELS["python"](h, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    tol = 1e-11 * max(1.0, np.linalg.norm(h))
    np.testing.assert_allclose(np.sort(wc), np.sort(wp), atol=tol)
    for w, v in ((wc, vc), (wp, vp)):
        np.testing.assert_allclose((v * w) @ v.conj().T, h, atol=tol)


def test_zero_matrix():
    for fn in KERNELS.values():
        w, v, sweeps, off = fn(np.zeros((3, 3), complex), JACOBI_TOL, JACOBI_MAX_SWEEPS)
        assert np.all(w == 0) and np.array_equal(v, np.eye(3))


def test_env_forces_fallback():
    env = dict(os.environ, PERTURBLAB_BACKEND="python")
    out = subprocess.run(
        [sys.executable, "-c", "from perturblab import _backend; print(_backend.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
