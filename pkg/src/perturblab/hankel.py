"""Finite Hankel sections, the lacunary symbol, the corner model of
``f(V) - f(U)`` for the rank-one unitary pair, and singular-value envelopes.

The pair is ``U z^j = z^{j-1}`` (bilateral backward shift on ``L^2``) and
``V = U`` except ``V 1 = -zbar``.  It is never truncated as an operator; the
matrix of ``f(V) - f(U)`` on ``{z^j : -N <= j < N}`` is written down entry by
entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .besov import lambda_seminorm, smooth_step
from .funcalc import CapabilityError
from .linalg_core import SingularSpectrum, svd
from .trigpoly import TrigPoly

PSI_SUPPORT = (np.pi / 8, 7 * np.pi / 8)
RHO_R0 = np.sin(np.pi / 16)
RHO_DEGREE = 256
RHO_SAMPLES = 1 << 16
FLAG_RTOL = 1e-12  # rounding allowance where a bound is attained exactly


def lacunary_g(alpha: float, n_max: int) -> TrigPoly:
    """``sum_{n=1}^{n_max} 4^{-alpha n} (zeta^{4^n} + zbar^{4^n})``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    d = 4 ** n_max
    c = np.zeros(2 * d + 1)
    for n in range(1, n_max + 1):
        c[d + 4 ** n] = c[d - 4 ** n] = 4.0 ** (-alpha * n)
    return TrigPoly(c)


@dataclass(frozen=True)
class HankelSection:
    """``N x N`` matrix ``M[j, k] = coeffs[j + k]``."""

    N: int
    matrix: np.ndarray
    side: str

    def spectrum(self) -> SingularSpectrum:
        return svd(self.matrix)


def hankel_matrix(seq, N: int) -> np.ndarray:
    seq = np.asarray(seq, dtype=np.complex128)
    if len(seq) < 2 * N - 1:
        seq = np.concatenate([seq, np.zeros(2 * N - 1 - len(seq))])
    idx = np.add.outer(np.arange(N), np.arange(N))
    return seq[idx]


def hankel_section(f: TrigPoly, N: int, side: str = "antianalytic") -> HankelSection:
    """Entries ``f^(j+k+1)`` (analytic side) or ``f^(-j-k-1)``, ``0 <= j, k < N``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    n = np.arange(1, 2 * N)
    if side == "analytic":
        seq = f.coef(n)
    elif side == "antianalytic":
        seq = f.coef(-n)
    else:
        raise ValueError(f"unknown side {side!r}")
    return HankelSection(N, hankel_matrix(seq, N), side)


@dataclass(frozen=True)
class CornerDiffSection:
    """Matrix of ``f(V) - f(U)`` on ``{z^j : -N <= j < N}``; row ``k``, column
    ``j`` at positions ``k + N``, ``j + N``."""

    N: int
    matrix: np.ndarray

    def blocks(self):
        """The two nonzero corners: rows ``k < 0`` x columns ``j >= 0`` and
        rows ``k >= 0`` x columns ``j < 0``."""
        N = self.N
        return self.matrix[:N, N:], self.matrix[N:, :N]

    def spectrum(self) -> SingularSpectrum:
        """Union of the corner blocks' singular values (the matrix is block
        anti-diagonal, so this is its full singular spectrum)."""
        upper, lower = self.blocks()
        vals = np.concatenate([svd(upper).values, svd(lower).values])
        return SingularSpectrum(np.sort(vals)[::-1])


def corner_diff_section(f: TrigPoly, N: int) -> CornerDiffSection:
    """``((f(V) - f(U)) z^j, z^k) = -2 f^(j - k)`` when ``j, k`` lie on
    opposite sides of zero, and 0 otherwise."""
    if N < 1:
        raise ValueError("N must be >= 1")
    j = np.arange(-N, N)
    diff = j[None, :] - j[:, None]
    cross = (j[None, :] >= 0) != (j[:, None] >= 0)
    m = np.where(cross, -2.0 * f.coef(diff), 0.0)
    return CornerDiffSection(N, m)


def block_T(g: TrigPoly, n: int) -> np.ndarray:
    """``{g^(j + k + 4^{n-1} + 1)}`` for ``0 <= j, k < 3 * 4^{n-1}``."""
    size = 3 * 4 ** (n - 1)
    idx = np.add.outer(np.arange(size), np.arange(size)) + 4 ** (n - 1) + 1
    return g.coef(idx)


def orthogonality_defect(g: TrigPoly, alpha: float, n: int) -> float:
    """``||4^{2 alpha n} T_n^T T_n - I||_F``."""
    T = block_T(g, n)
    return float(np.linalg.norm(4.0 ** (2 * alpha * n) * (T.T @ T) - np.eye(T.shape[0])))


def _block_slope(s: np.ndarray, m_max: int) -> float:
    # least squares over dyadic blocks 2^k <= 1+m < 2^{k+1} (log of the block
    # mean of 1+m against the mean of log s_m); every octave gets one point, so
    # the densely sampled top octave cannot dominate a staircase spectrum
    xs, ys = [], []
    k = 0
    while 2 ** (k + 1) <= m_max:
        m = np.arange(2 ** k - 1, 2 ** (k + 1) - 1)
        vals = s[m]
        if np.all(vals > 0):
            xs.append(np.log(np.mean(1.0 + m)))
            ys.append(np.mean(np.log(vals)))
        k += 1
    if len(xs) < 2:
        return float("nan")
    return float(np.polyfit(xs, ys, 1)[0])


@dataclass
class EnvelopeReport:
    alpha: float
    N: int
    singular_values: np.ndarray
    seminorm: float
    c_upper: float
    slope: float
    lower_flags: dict = field(default_factory=dict)
    lower_margins: dict = field(default_factory=dict)


def sv_envelope_check(f: TrigPoly, alpha: float, N: int, m_max: int | None = None,
                      side: str = "antianalytic", lower_scale: float = 1.0) -> EnvelopeReport:
    """Upper envelope ``s_m <= c_upper * ||f||_{Lambda_alpha} (1+m)^{-alpha}`` and
    the lower flags ``s_j >= lower_scale * 4^{-alpha n}`` for ``j < 3 * 4^{n-1}``,
    ``4^n <= N``.

    ``c_upper`` is the fitted constant over ``m < m_max`` (default ``N // 2``),
    ``slope`` the dyadic-block log-log slope over the same range.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    m_max = N // 2 if m_max is None else int(m_max)
    s = hankel_section(f, N, side).spectrum().values
    semi = lambda_seminorm(f, alpha)
    m = np.arange(m_max)
    c_upper = float(np.max(s[:m_max] * (1.0 + m) ** alpha) / semi) if semi > 0 else float("nan")
    report = EnvelopeReport(alpha, N, s, semi, c_upper, _block_slope(s, m_max))
    n = 1
    while 4 ** n <= N:
        count = 3 * 4 ** (n - 1)
        bound = lower_scale * 4.0 ** (-alpha * n)
        low = float(s[:count].min())
        report.lower_flags[n] = bool(low >= bound * (1.0 - FLAG_RTOL))
        report.lower_margins[n] = low / bound
        n += 1
    return report


# smooth partition with rho(zeta) + rho(i zeta) = 1 -----------------------------

def _psi(theta):
    a = np.abs(np.angle(np.exp(1j * theta)))
    lo, hi = PSI_SUPPORT
    width = (hi - lo) / 3.0
    return smooth_step((a - lo) / width) * smooth_step((hi - a) / width)


def _rho_exact(theta):
    def rho0(t):
        p = _psi(t) + _psi(t + np.pi)
        return p / (p + _psi(t + np.pi / 2) + _psi(t - np.pi / 2))

    return 0.5 * (rho0(theta) + rho0(-theta))


def _rho_truncated(D: int, coeffs: np.ndarray) -> TrigPoly:
    n = np.arange(-D, D + 1)
    return TrigPoly(coeffs[n % len(coeffs)].real)


def _arc_defect(rho: TrigPoly, samples: int = 4096) -> float:
    theta = 2 * np.pi * np.arange(samples) / samples
    z = np.exp(1j * theta)
    arc = (np.abs(z - 1) < RHO_R0) | (np.abs(z + 1) < RHO_R0)
    return float(np.abs(rho.grid_values(samples)[arc]).max())


def rho_partition(D: int = RHO_DEGREE, arc_tol: float = 1e-6, identity_tol: float = 1e-8) -> TrigPoly:
    """Degree-``D`` Fourier truncation of the even smooth ``rho`` with
    ``rho(zeta) + rho(i zeta) = 1`` that vanishes near ``{-1, 1}``.

    ``psi`` is a smooth-step bump on ``pi/8 < |theta| < 7pi/8``;
    ``rho0 = (psi(z) + psi(-z)) / (psi(z) + psi(iz) + psi(-z) + psi(-iz))`` and
    ``rho = (rho0(z) + rho0(zbar)) / 2``.  Raises :class:`CapabilityError`
    naming the required degree when ``|rho| > arc_tol`` on ``|zeta -+ 1| < r0``
    with ``r0 = sin(pi/16)``.
    """
    theta = 2 * np.pi * np.arange(RHO_SAMPLES) / RHO_SAMPLES
    coeffs = np.fft.fft(_rho_exact(theta)) / RHO_SAMPLES
    rho = _rho_truncated(D, coeffs)
    if _arc_defect(rho) > arc_tol:
        need = D
        while need < RHO_SAMPLES // 4 and _arc_defect(_rho_truncated(need, coeffs)) > arc_tol:
            need *= 2
        raise CapabilityError(f"rho truncated at degree {D} misses arc tolerance {arc_tol:g}; need D >= {need}")
    grid = rho.grid_values(4096)
    shifted = np.roll(grid, -1024)  # rho(i zeta) on the same grid
    if np.abs(grid + shifted - 1.0).max() > identity_tol:
        raise CapabilityError("partition identity fails at this truncation")
    return rho


@dataclass
class LowerConstantReport:
    alpha: float
    count: int
    singular_values: np.ndarray
    c_min: float


def smallest_lower_constant(symbol: TrigPoly, alpha: float, count: int = 64,
                            N: int | None = None) -> LowerConstantReport:
    """Smallest ``C`` with ``C * s_n(H_symbol) >= (n+1)^{-alpha}`` for ``n < count``.

    Finite sections give lower bounds for the singular values of the infinite
    Hankel matrix, so the reported ``C`` is an upper estimate for the symbol
    as given.
    """
    N = symbol.degree if N is None else int(N)
    s = hankel_section(symbol, N).spectrum().values[:count]
    if np.any(s <= 0):
        return LowerConstantReport(alpha, count, s, float("inf"))
    c = float(np.max((1.0 + np.arange(len(s))) ** -alpha / s))
    return LowerConstantReport(alpha, count, s, c)


def corner_lower_constant(h: TrigPoly, alpha: float, count: int, N: int) -> float:
    """Smallest ``c`` with ``c * s_m(h(V) - h(U)) >= (1+m)^{-alpha}``, ``m < count``."""
    s = corner_diff_section(h, N).spectrum().values[:count]
    if np.any(s <= 0):
        return float("inf")
    return float(np.max((1.0 + np.arange(len(s))) ** -alpha / s))
