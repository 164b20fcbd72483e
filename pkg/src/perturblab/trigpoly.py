"""Trigonometric (Laurent) polynomials on the unit circle."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar

OVERSAMPLE = 8


def _falling(n: np.ndarray, m: int) -> np.ndarray:
    out = np.ones(n.shape, dtype=float)
    for j in range(m):
        out = out * (n - j)
    return out


class TrigPoly:
    """``h(z) = sum_{|n| <= d} c_n z^n`` stored as ``coeffs[n + d]``.

    Also serves as a circle-domain smooth function for the functional calculus:
    ``deriv(m, z)`` is the complex derivative of the Laurent polynomial, which is
    what divided differences with unimodular denominators ``zeta - tau`` need.
    """

    domain = "circle"
    max_deriv = None

    def __init__(self, coeffs, degree: int | None = None):
        c = np.atleast_1d(np.asarray(coeffs, dtype=np.complex128))
        if c.ndim != 1 or len(c) % 2 == 0:
            raise ValueError("coefficient list must have odd length 2d+1")
        if degree is not None and len(c) != 2 * degree + 1:
            raise ValueError("coefficient length does not match degree")
        self.coeffs = c
        self.degree = (len(c) - 1) // 2

    # construction -------------------------------------------------------
    @classmethod
    def from_dict(cls, coeffs: dict) -> "TrigPoly":
        d = max((abs(int(n)) for n in coeffs), default=0)
        c = np.zeros(2 * d + 1, dtype=np.complex128)
        for n, v in coeffs.items():
            c[int(n) + d] += v
        return cls(c)

    @classmethod
    def monomial(cls, n: int, c: complex = 1.0) -> "TrigPoly":
        return cls.from_dict({n: c})

    @classmethod
    def constant(cls, c: complex) -> "TrigPoly":
        return cls([c])

    @classmethod
    def random(cls, rng, degree: int, decay: float = 0.0) -> "TrigPoly":
        n = np.arange(-degree, degree + 1)
        c = rng.complex_normal(2 * degree + 1) * (1.0 + np.abs(n)) ** -decay
        return cls(c)

    def coef(self, n) -> np.ndarray:
        """``c_n`` for integer (array) ``n``; zero outside the support."""
        n = np.asarray(n)
        idx = n + self.degree
        ok = (idx >= 0) & (idx < len(self.coeffs))
        out = np.zeros(n.shape, dtype=np.complex128)
        out[ok] = self.coeffs[idx[ok]]
        return out

    def padded(self, degree: int) -> np.ndarray:
        if degree < self.degree:
            raise ValueError("cannot pad to a smaller degree")
        return self.coef(np.arange(-degree, degree + 1))

    def trim(self, tol: float = 0.0) -> "TrigPoly":
        nz = np.nonzero(np.abs(self.coeffs) > tol)[0]
        if nz.size == 0:
            return TrigPoly([0.0])
        d = int(max(abs(nz[0] - self.degree), abs(nz[-1] - self.degree)))
        return TrigPoly(self.coef(np.arange(-d, d + 1)))

    @property
    def is_analytic(self) -> bool:
        return not np.any(self.coeffs[: self.degree])

    @property
    def bandwidth(self) -> float:
        return float(max(self.degree, 1))

    # evaluation ---------------------------------------------------------
    def _laurent(self, c, low, z):
        # sum_k c[k] z^(k + low): Horner in z, one power for the offset
        z = np.asarray(z, dtype=np.complex128)
        return np.polyval(c[::-1], z) * z ** low

    def __call__(self, z):
        return self._laurent(self.coeffs, -self.degree, z)

    def at_theta(self, theta):
        return self(np.exp(1j * np.asarray(theta, dtype=float)))

    def deriv(self, m: int, z):
        """``m``-th complex derivative at ``z``."""
        if m == 0:
            return self(z)
        n = np.arange(-self.degree, self.degree + 1)
        return self._laurent(self.coeffs * _falling(n.astype(float), m), -self.degree - m, z)

    def theta_derivative(self, m: int = 1) -> "TrigPoly":
        n = np.arange(-self.degree, self.degree + 1)
        return TrigPoly(self.coeffs * (1j * n) ** m)

    def grid_values(self, size: int | None = None) -> np.ndarray:
        """Values at ``exp(2 pi i k / size)``, ``k = 0..size-1``, by FFT."""
        size = OVERSAMPLE * (2 * self.degree + 1) if size is None else int(size)
        if size < 2 * self.degree + 1:
            raise ValueError("grid too coarse for exact sampling")
        buf = np.zeros(size, dtype=np.complex128)
        n = np.arange(-self.degree, self.degree + 1)
        np.add.at(buf, n % size, self.coeffs)
        return np.fft.ifft(buf) * size

    def sup_norm(self, refine: int = 3) -> float:
        """``max |h|`` on the circle: oversampled grid plus bounded refinement."""
        if not np.any(self.coeffs):
            return 0.0
        size = OVERSAMPLE * (2 * self.degree + 1)
        vals = np.abs(self.grid_values(size))
        best = float(vals.max())
        if self.degree == 0:
            return best
        h = 2.0 * np.pi / size
        # refine around the largest local maxima of the sample
        peaks = np.nonzero((vals >= np.roll(vals, 1)) & (vals >= np.roll(vals, -1)))[0]
        peaks = peaks[np.argsort(vals[peaks])[::-1][:refine]]
        for k in peaks:
            res = minimize_scalar(
                lambda t: -abs(self.at_theta(t)),
                bounds=(h * (k - 1), h * (k + 1)),
                method="bounded",
                options={"xatol": 1e-12 * max(1.0, h)},
            )
            best = max(best, float(-res.fun))
        return best

    def lp_norm(self, p: float) -> float:
        if np.isinf(p):
            return self.sup_norm()
        vals = np.abs(self.grid_values())
        return float(np.mean(vals ** p) ** (1.0 / p))

    # algebra -----------------------------------------------------------
    def _binary(self, other, op):
        if not isinstance(other, TrigPoly):
            other = TrigPoly.constant(other)
        d = max(self.degree, other.degree)
        return TrigPoly(op(self.padded(d), other.padded(d)))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return TrigPoly(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, TrigPoly):
            return TrigPoly(np.convolve(self.coeffs, other.coeffs))
        return TrigPoly(self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return TrigPoly(self.coeffs / c)

    def conj(self) -> "TrigPoly":
        """The function ``zeta -> conj(h(zeta))`` on the circle."""
        return TrigPoly(np.conj(self.coeffs[::-1]))

    def rotate(self, lam: float) -> "TrigPoly":
        """``zeta -> h(exp(-i lam) zeta)``."""
        n = np.arange(-self.degree, self.degree + 1)
        return TrigPoly(self.coeffs * np.exp(-1j * lam * n))

    def allclose(self, other, atol=1e-12) -> bool:
        d = max(self.degree, other.degree)
        return bool(np.allclose(self.padded(d), other.padded(d), rtol=0.0, atol=atol))

    def __repr__(self):
        return f"TrigPoly(degree={self.degree})"
