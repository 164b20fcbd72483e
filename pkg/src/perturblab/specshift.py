"""Second-order spectral shift for finite Hermitian pairs and its circle analog.

For ramps ``r_t(x) = (x - t)_+`` one has ``r_t'' = delta_t``, so the density
representing ``trace(f(A+K) - 2 f(A) + f(A-K))`` against ``f''`` is

    varsigma(t) = trace(r_t(A+K) - 2 r_t(A) + r_t(A-K)),

a piecewise linear function with kinks at the eigenvalues of the three
matrices.  The Koplienko density ``eta`` replaces the second difference by the
first-order remainder ``f(A+K) - f(A) - d/ds f(A+sK)|_0``.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .funcalc import apply_fn
from .linalg_core import as_hermitian, as_unitary, eig_hermitian, eig_unitary, expi, svd

DEFAULT_POINTS = 2048
EIG_CLEARANCE = 1e-9
JITTER = 1e-7
HULL_PAD = 0.05
SIMPSON_PANELS = 4096


def _fingerprint(*mats) -> str:
    h = hashlib.sha1()
    for m in mats:
        h.update(np.ascontiguousarray(m).tobytes())
    return h.hexdigest()[:12]


def _ramp_trace(eigs: np.ndarray, t: np.ndarray) -> np.ndarray:
    return np.clip(eigs[:, None] - t[None, :], 0.0, None).sum(axis=0)


@dataclass
class ShiftSample:
    grid: np.ndarray
    values: np.ndarray
    fingerprint: str
    jittered: int = 0
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class _Pair:
    A: np.ndarray
    K: np.ndarray
    lam: np.ndarray  # A
    lam_plus: np.ndarray  # A + K
    lam_minus: np.ndarray  # A - K
    knorm: float


def _pair(A, K) -> _Pair:
    A = as_hermitian(A)
    K = as_hermitian(K)
    if A.shape != K.shape:
        raise ValueError("dimension mismatch")
    return _Pair(
        A, K,
        eig_hermitian(A).values,
        eig_hermitian(A + K).values,
        eig_hermitian(A - K).values,
        svd(K).s0,
    )


def _grid(pair: _Pair, grid, points: int):
    lo = pair.lam[0] - pair.knorm
    hi = pair.lam[-1] + pair.knorm
    width = max(hi - lo, 1.0)
    if grid is None:
        pad = HULL_PAD * width
        grid = np.linspace(lo - pad, hi + pad, points)
    t = np.array(grid, dtype=float)
    eigs = np.concatenate([pair.lam, pair.lam_plus, pair.lam_minus])
    close = np.min(np.abs(t[:, None] - eigs[None, :]), axis=1) < EIG_CLEARANCE
    t[close] += JITTER * width
    return t, int(close.sum())


def ssf2_sample(A, K, grid=None, points: int = DEFAULT_POINTS) -> ShiftSample:
    """``varsigma(t)`` on ``grid`` (default: ``points`` uniform over the padded
    hull ``[lambda_min - ||K||, lambda_max + ||K||]``); grid points within
    ``1e-9`` of an eigenvalue are moved by ``1e-7`` hull widths."""
    pair = _pair(A, K)
    t, moved = _grid(pair, grid, points)
    vals = _ramp_trace(pair.lam_plus, t) - 2.0 * _ramp_trace(pair.lam, t) + _ramp_trace(pair.lam_minus, t)
    return ShiftSample(t, vals, _fingerprint(pair.A, pair.K), moved, {"kind": "varsigma"})


def _eta(lam_a, vecs_a, lam_plus, K, t):
    diag = np.real(np.einsum("ij,ik,kj->j", vecs_a.conj(), K, vecs_a))
    above = lam_a[:, None] > t[None, :]
    return _ramp_trace(lam_plus, t) - _ramp_trace(lam_a, t) - (diag[:, None] * above).sum(axis=0)


def koplienko_eta_sample(A, K, grid=None, points: int = DEFAULT_POINTS) -> ShiftSample:
    """``eta(t) = trace((A+K-t)_+ - (A-t)_+) - trace(P_{(t, inf)}(A) K)``."""
    pair = _pair(A, K)
    t, moved = _grid(pair, grid, points)
    ea = eig_hermitian(pair.A)
    vals = _eta(ea.values, ea.vectors, pair.lam_plus, pair.K, t)
    return ShiftSample(t, vals, _fingerprint(pair.A, pair.K), moved, {"kind": "eta"})


def ssf_breakpoints(A, K) -> np.ndarray:
    pair = _pair(A, K)
    return np.unique(np.concatenate([pair.lam, pair.lam_plus, pair.lam_minus]))


def ssf_mass(A, K) -> float:
    """``int varsigma dx``, exact: trapezoid rule on the kinks of a piecewise
    linear function supported between the extreme kinks."""
    pair = _pair(A, K)
    x = np.unique(np.concatenate([pair.lam, pair.lam_plus, pair.lam_minus]))
    y = _ramp_trace(pair.lam_plus, x) - 2.0 * _ramp_trace(pair.lam, x) + _ramp_trace(pair.lam_minus, x)
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


def _simpson_nodes(breaks: np.ndarray, panels: int):
    # panels distributed over the smooth pieces between kinks, at least one each
    width = breaks[-1] - breaks[0]
    xs, ws = [], []
    for a, b in zip(breaks[:-1], breaks[1:]):
        k = max(1, int(round(panels * (b - a) / width)))
        x = np.linspace(a, b, 2 * k + 1)
        h = (b - a) / (2 * k)
        w = np.full(2 * k + 1, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        xs.append(x)
        ws.append(w * h / 3.0)
    return np.concatenate(xs), np.concatenate(ws)


@dataclass(frozen=True)
class TraceReport:
    lhs: complex
    rhs: complex
    abs_residual: float
    rel_residual: float
    panels: int


def verify_trace_formula_sa(A, K, f, panels: int = SIMPSON_PANELS) -> TraceReport:
    """Compare ``trace(f(A+K) - 2 f(A) + f(A-K))`` with ``int f'' varsigma dx``.

    ``f`` is a line function with exact ``f.deriv(2, x)``.  The quadrature is
    composite Simpson over the support with ``panels`` panels, aligned with the
    kinks of ``varsigma`` so each panel sees a smooth integrand.
    """
    pair = _pair(A, K)
    lhs = sum(
        c * np.trace(apply_fn(eig_hermitian(M), f))
        for c, M in ((1.0, pair.A + pair.K), (-2.0, pair.A), (1.0, pair.A - pair.K))
    )
    breaks = np.unique(np.concatenate([pair.lam, pair.lam_plus, pair.lam_minus]))
    if len(breaks) < 2:
        rhs = 0.0
    else:
        x, w = _simpson_nodes(breaks, panels)
        sig = _ramp_trace(pair.lam_plus, x) - 2.0 * _ramp_trace(pair.lam, x) + _ramp_trace(pair.lam_minus, x)
        rhs = complex(np.sum(w * f.deriv(2, x) * sig))
    lhs = complex(lhs)
    rhs = complex(rhs)
    err = abs(lhs - rhs)
    scale = max(abs(lhs), abs(rhs))
    return TraceReport(lhs, rhs, err, err / scale if scale > 0 else 0.0, panels)


@dataclass
class CircleShift:
    """``tau[n] = trace(W_+^n - 2 U^n + W_-^n)`` with ``W_+- = e^{+-iA} U`` and the
    Fourier coefficients ``coeffs[k]`` of the circle density, where
    ``coeffs[-n] = -tau[n] / n^2`` (second derivative in the arc parameter).
    ``coeffs[0]`` is ``None``: the density is determined modulo constants."""

    tau: dict
    coeffs: dict


def circle_ssf_coeffs(U, A, n_max: int) -> CircleShift:
    U = as_unitary(U)
    A = as_hermitian(A)
    if svd(A).s0 >= np.pi:
        raise ValueError("requires ||A|| < pi")
    ph = eig_unitary(U).values
    ph_plus = eig_unitary(expi(A) @ U).values
    ph_minus = eig_unitary(expi(-A) @ U).values
    tau, coeffs = {}, {0: None}
    for n in range(1, n_max + 1):
        for m in (n, -n):
            tau[m] = complex(
                np.exp(1j * m * ph_plus).sum() - 2.0 * np.exp(1j * m * ph).sum() + np.exp(1j * m * ph_minus).sum()
            )
            coeffs[-m] = -tau[m] / m ** 2
    return CircleShift(tau, coeffs)
