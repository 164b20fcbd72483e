"""Schatten-von Neumann and general ideal functionals of singular spectra,
Cesaro averages and probe-based Boyd dilation estimates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .linalg_core import SingularSpectrum


def _seq(s) -> np.ndarray:
    if isinstance(s, SingularSpectrum):
        return s.values
    a = np.asarray(s, dtype=float)
    if a.ndim != 1:
        raise ValueError("expected a one-dimensional sequence")
    return a


def _check_p(p):
    if not p > 0:
        raise ValueError(f"p must be positive, got {p}")


def _lp(a, p):
    # scaled to avoid overflow/underflow for large p
    top = np.max(a) if a.size else 0.0
    if top == 0.0:
        return 0.0
    if np.isinf(p):
        return float(top)
    return float(top * np.sum((a / top) ** p) ** (1.0 / p))


def schatten_norm(s, p: float, l: int | None = None) -> float:
    """``(sum_j s_j^p)^{1/p}``; with ``l`` only the terms ``j <= l`` are kept."""
    _check_p(p)
    a = _seq(s)
    if l is not None:
        if l < 0:
            raise ValueError("l must be >= 0")
        a = a[: l + 1]
    return _lp(a, p)


def weak_norm(s, p: float) -> float:
    """``sup_j (1+j)^{1/p} s_j``, the ``S_{p,inf}`` quasinorm."""
    _check_p(p)
    a = _seq(s)
    if a.size == 0:
        return 0.0
    return float(np.max((1.0 + np.arange(a.size)) ** (1.0 / p) * a))


def sigma_seq(s, length: int | None = None) -> np.ndarray:
    """Cesaro means ``sigma_n = (s_0 + ... + s_n)/(n+1)``.

    ``length`` extends the output past ``len(s)`` treating the tail of ``s`` as
    zero (sigma itself does not vanish there).
    """
    a = _seq(s)
    n = len(a) if length is None else int(length)
    b = np.zeros(n)
    b[: min(n, len(a))] = a[:n]
    return np.cumsum(b) / np.arange(1, n + 1)


@dataclass(frozen=True)
class IdealSpec:
    """A symmetric (quasi)norm given by its functional on nonincreasing sequences."""

    name: str
    psi: Callable[[np.ndarray], float]
    params: dict = field(default_factory=dict)

    def __call__(self, s) -> float:
        return float(self.psi(_seq(s)))


def schatten_ideal(p: float) -> IdealSpec:
    _check_p(p)
    return IdealSpec(f"S_{p:g}", lambda a: _lp(a, p), {"p": p})


def weak_ideal(p: float) -> IdealSpec:
    _check_p(p)
    return IdealSpec(f"S_{p:g},inf", lambda a: weak_norm(a, p), {"p": p})


def truncated_ideal(p: float, l: int) -> IdealSpec:
    _check_p(p)
    return IdealSpec(f"S_{p:g}^{l}", lambda a: schatten_norm(a, p, l), {"p": p, "l": l})


def log_ideal() -> IdealSpec:
    """``sup_n (s_0 + ... + s_n) / log(2 + n)``."""

    def psi(a):
        if a.size == 0:
            return 0.0
        return float(np.max(np.cumsum(a) / np.log(2.0 + np.arange(a.size))))

    return IdealSpec("S_Omega", psi, {})


def ideal_power_norm(s, spec: IdealSpec, p: float) -> float:
    """Quasinorm of ``I^{{p}}``: ``psi({s_j^p})^{1/p}``.

    ``s_j^p`` is formed explicitly (``psi`` need not be homogeneous), so
    entries outside roughly ``[1e-300, 1e300]^{1/p}`` under- or overflow.
    """
    _check_p(p)
    a = _seq(s)
    return spec(a ** p) ** (1.0 / p)


def dilate(s, d: int) -> np.ndarray:
    """Singular values of the ``d``-fold direct sum: ``s_{floor(n/d)}``."""
    return np.repeat(_seq(s), int(d))


def default_probes(length: int = 4096) -> list[np.ndarray]:
    j = np.arange(length, dtype=float)
    probes = [(1.0 + j) ** -g for g in np.round(np.arange(0.1, 2.01, 0.1), 10)]
    probes += [q ** j for q in (0.5, 0.9, 0.99)]
    for width in (1, 2, 8, 64, 512):
        block = np.zeros(length)
        block[:width] = 1.0
        probes.append(block)
    return probes


def boyd_beta_d(spec: IdealSpec, d: int, probes=None) -> float:
    """Lower estimate of the dilation quasinorm ``beta_{I,d}`` over a probe family."""
    if d < 1:
        raise ValueError("d must be >= 1")
    probes = default_probes() if probes is None else probes
    if not len(probes):
        raise ValueError("probe family is empty")
    best = 0.0
    for probe in probes:
        a = _seq(probe)
        base = spec(a)
        if base == 0.0:
            if np.any(a > 0):
                raise ValueError(f"{spec.name}: psi vanishes on a nonzero probe")
            continue
        best = max(best, spec(dilate(a, d)) / base)
    return best


def averaging_constant_bound(spec: IdealSpec, kmax: int = 8, probes=None) -> float:
    """Partial sum ``3 * sum_{k <= kmax} 2^{-k} beta_{I,2^k}`` of the averaging
    constant, with probe estimates of the dilation norms."""
    if probes is None:
        probes = default_probes(512)
    return 3.0 * sum(2.0 ** -k * boyd_beta_d(spec, 2 ** k, probes) for k in range(kmax + 1))


def averaging_bound_check(spec: IdealSpec, s, C: float, length: int | None = None) -> bool:
    """``psi(sigma(s)) <= C * psi(s)``."""
    if not C > 0:
        raise ValueError("C must be positive")
    return spec(sigma_seq(s, length)) <= C * spec(s)


def averaging_ratio(spec: IdealSpec, s, length: int | None = None) -> float:
    return spec(sigma_seq(s, length)) / spec(s)


def schatten_averaging_constant(p: float) -> float:
    """Closed form ``3 (1 - 2^{1/p - 1})^{-1}``, finite for ``p > 1``."""
    if not p > 1:
        raise ValueError("requires p > 1")
    return 3.0 / (1.0 - 2.0 ** (1.0 / p - 1.0))
