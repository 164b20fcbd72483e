"""Kernel selection: compiled Jacobi core when importable, numpy fallback otherwise.

Set ``PERTURBLAB_BACKEND=python`` to force the fallback (used by the parity
tests and the kernel benchmark).
"""

import os

from . import _jacobi_py

BACKEND = "python"
jacobi_eigh = _jacobi_py.jacobi_eigh

if os.environ.get("PERTURBLAB_BACKEND", "").lower() != "python":
    try:
        from ._jacobi import jacobi_eigh  # noqa: F401,F811
        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on build
        pass


def kernels():
    """Return ``{name: jacobi_eigh}`` for every backend available in this build."""
    out = {"python": _jacobi_py.jacobi_eigh}
    try:
        from ._jacobi import jacobi_eigh as compiled
        out["compiled"] = compiled
    except ImportError:  # pragma: no cover
        pass
    return out
