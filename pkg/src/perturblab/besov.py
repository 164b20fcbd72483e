"""Littlewood-Paley pieces, Hoelder-Zygmund and Besov seminorms of
trigonometric polynomials, Bernstein-type splitting and moduli of continuity.

The dyadic bump is built from the standard smooth step
``sigma(t) / (sigma(t) + sigma(1 - t))`` with ``sigma(t) = exp(-1/t)``:
``w(x) = step(log2(x) + 1)`` on ``[1/2, 1]`` and ``1 - step(log2(x))`` on
``[1, 2]``, zero elsewhere.  Seminorm constants depend on this choice and
reports print it as ``W_PARAMETERIZATION``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .trigpoly import TrigPoly

W_PARAMETERIZATION = "w(x)=step(log2 x + 1) on [1/2,1], 1-step(log2 x) on [1,2]; step(t)=e^{-1/t}/(e^{-1/t}+e^{-1/(1-t)})"


def _sigma(t):
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)


def smooth_step(t):
    """0 for ``t <= 0``, 1 for ``t >= 1``, C-infinity and monotone in between."""
    t = np.asarray(t, dtype=float)
    a = _sigma(t)
    b = _sigma(1.0 - t)
    out = np.where(t <= 0, 0.0, np.where(t >= 1, 1.0, a / np.where(a + b > 0, a + b, 1.0)))
    return out if out.ndim else float(out)


def bump_w(x):
    """Dyadic bump supported in ``[1/2, 2]`` with ``w(x) + w(x/2) = 1`` on ``[1, 2]``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        lx = np.log2(np.where(x > 0, x, 1.0))
    up = smooth_step(lx + 1.0)
    down = 1.0 - smooth_step(lx)
    out = np.where((x >= 0.5) & (x <= 1.0), up, np.where((x > 1.0) & (x <= 2.0), down, 0.0))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class Piece:
    n: int
    plus: TrigPoly
    sharp: TrigPoly


def _top_band(degree: int) -> int:
    # largest n whose band (2^{n-1}, 2^{n+1}) meets [2, degree]
    return max(1, int(np.ceil(np.log2(max(degree, 2)))) + 1)


def lp_pieces(f: TrigPoly) -> list[Piece]:
    """Littlewood-Paley decomposition ``f = sum_n f*W_n + f*W_n^#``.

    ``n = 0`` carries ``c_{-1} zbar + c_0 + c_1 z`` with an empty sharp piece;
    for ``n >= 1`` the pieces multiply ``c_k`` and ``c_{-k}`` (``k >= 1``) by
    ``w(k / 2^n)``.
    """
    d = f.degree
    zero = TrigPoly([0.0])
    pieces = [Piece(0, TrigPoly(f.coef(np.arange(-1, 2))), zero)]
    if d < 2:
        return pieces
    k = np.arange(1, d + 1)
    pos = f.coef(k)
    neg = f.coef(-k)
    for n in range(1, _top_band(d) + 1):
        wk = bump_w(k / 2.0 ** n)
        live = wk > 0
        if not live.any():
            continue
        top = int(k[live].max())
        plus = np.zeros(2 * top + 1, dtype=np.complex128)
        sharp = np.zeros(2 * top + 1, dtype=np.complex128)
        plus[top + k[:top]] = pos[:top] * wk[:top]
        sharp[top - k[:top]] = neg[:top] * wk[:top]
        pieces.append(Piece(n, TrigPoly(plus), TrigPoly(sharp)))
    return pieces


def reconstruct(pieces: list[Piece]) -> TrigPoly:
    total = TrigPoly([0.0])
    for pc in pieces:
        total = total + pc.plus + pc.sharp
    return total


def lambda_seminorm(f: TrigPoly, alpha: float) -> float:
    """``sup_{n >= 1} 2^{n alpha} (||f*W_n||_inf + ||f*W_n^#||_inf)``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    best = 0.0
    for pc in lp_pieces(f):
        if pc.n == 0:
            continue
        best = max(best, 2.0 ** (pc.n * alpha) * (pc.plus.sup_norm() + pc.sharp.sup_norm()))
    return best


def besov_seminorm(f: TrigPoly, s: float, p: float, q: float) -> float:
    """``l^q`` norm over ``n >= 1`` of ``2^{ns} (||f*W_n||_p + ||f*W_n^#||_p)``."""
    if p < 1 or q < 1:
        raise ValueError("p and q must be >= 1")
    terms = np.array(
        [
            2.0 ** (pc.n * s) * (pc.plus.lp_norm(p) + pc.sharp.lp_norm(p))
            for pc in lp_pieces(f)
            if pc.n >= 1
        ]
    )
    if terms.size == 0:
        return 0.0
    if np.isinf(q):
        return float(terms.max())
    return float(np.sum(terms ** q) ** (1.0 / q))


@dataclass(frozen=True)
class BernsteinSplit:
    f1: TrigPoly
    f2: TrigPoly
    f2_sup: float
    bound: float | None
    const: float | None


def bernstein_split(f: TrigPoly, m: int, alpha: float | None = None) -> BernsteinSplit:
    """``f = f1 + f2`` with ``f1`` the pieces of frequency scale ``2^n <= m``.

    ``deg f1 <= 2m``.  With ``alpha`` given, ``bound`` is the certified
    ``||f2||_inf <= m^{-alpha} lambda_seminorm(f, alpha) / (1 - 2^{-alpha})``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    low = [pc for pc in lp_pieces(f) if 2 ** pc.n <= m]
    f1 = reconstruct(low).trim()
    d = max(f.degree, f1.degree)
    f2 = TrigPoly(f.padded(d) - f1.padded(d)).trim(1e-15 * max(1.0, float(np.abs(f.coeffs).max())))
    const = bound = None
    if alpha is not None:
        const = 1.0 / (1.0 - 2.0 ** -alpha)
        bound = const * m ** -alpha * lambda_seminorm(f, alpha)
    return BernsteinSplit(f1, f2, f2.sup_norm(), bound, const)


def modulus_of_continuity(f: TrigPoly, delta: float, order: int = 1, steps: int = 65) -> float:
    """``sup |(Delta_tau^order f)(zeta)|`` over the circle and ``|1 - tau| <= delta``.

    ``Delta_tau^n`` multiplies ``c_k`` by ``(tau^k - 1)^n``; ``tau = e^{it}``
    is sampled on ``steps`` points of ``|t| <= 2 arcsin(delta/2)``, endpoints
    included.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if order < 1:
        raise ValueError("order must be >= 1")
    tmax = 2.0 * np.arcsin(min(delta / 2.0, 1.0))
    k = np.arange(-f.degree, f.degree + 1)
    ts = np.linspace(-tmax, tmax, steps)
    coeffs = f.coeffs[None, :] * (np.exp(1j * ts[:, None] * k[None, :]) - 1.0) ** order
    # one batched FFT over all shifts, then refine the leading candidates
    size = 8 * (2 * f.degree + 1)
    buf = np.zeros((steps, size), dtype=np.complex128)
    buf[:, k % size] = coeffs
    coarse = np.abs(np.fft.ifft(buf, axis=1)).max(axis=1) * size
    best = float(coarse.max())
    for i in np.argsort(coarse)[::-1][:3]:
        best = max(best, TrigPoly(coeffs[i]).sup_norm())
    return best


def modulus_fit(f: TrigPoly, alpha: float, deltas, order: int = 1):
    """Fitted ``C = max omega(delta) / delta^alpha`` and the log-log slope."""
    deltas = np.asarray(deltas, dtype=float)
    om = np.array([modulus_of_continuity(f, d, order) for d in deltas])
    slope = float(np.polyfit(np.log(deltas), np.log(om), 1)[0])
    return float(np.max(om / deltas ** alpha)), slope

