import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def rng():
    from perturblab.linalg_core import Rng

    return Rng(12345)


def random_hermitian(seed, dim, scale=1.0):
    g = np.random.default_rng(seed).standard_normal((dim, dim, 2)) @ np.array([1.0, 1j])
    return scale * 0.5 * (g + g.conj().T)


def random_unitary(seed, dim):
    g = np.random.default_rng(seed).standard_normal((dim, dim, 2)) @ np.array([1.0, 1j])
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
