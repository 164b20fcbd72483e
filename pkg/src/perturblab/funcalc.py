"""Matrix functional calculus, divided differences and finite-dimensional
double / multiple operator integrals.

Smooth functions come in two domains.  ``circle`` functions are
:class:`~perturblab.trigpoly.TrigPoly` objects evaluated at unimodular
spectral points; their divided differences use the denominators
``zeta - tau`` and complex derivatives of the Laurent polynomial.  ``line``
functions (:class:`LineTrig`, :class:`LinePoly`, :class:`LineFn`) act on real
eigenvalues.

Divided differences are evaluated per tuple: tuples whose spread is below
``TAYLOR_FRACTION / bandwidth`` use a Taylor expansion about their mean (the
confluent limit is the special case of zero spread); wider tuples use the
recursion that splits off the most distant pair, so every denominator is at
least the Taylor radius.
"""

from __future__ import annotations

from math import comb, factorial

import numpy as np

from .linalg_core import EigenSystem, as_hermitian, as_matrix, eig_hermitian, eig_unitary, expi, svd
from .trigpoly import TrigPoly

TAYLOR_FRACTION = 0.5
TAYLOR_TERMS = 14
TAYLOR_ACCURACY = 13  # digits required of a truncated Taylor series
TABLE_CHUNK = 1 << 16


class CapabilityError(RuntimeError):
    """The request needs information the function object cannot supply."""


class LineTrig:
    """``f(x) = h(exp(i omega x))`` for a trigonometric polynomial ``h``.

    Band-limited with exact derivatives of every order; the periodic surrogate
    used for real-line experiments.
    """

    domain = "line"
    max_deriv = None

    def __init__(self, h: TrigPoly, omega: float = 1.0):
        self.h = h
        self.omega = float(omega)
        self._derivs = {0: h}

    @property
    def bandwidth(self) -> float:
        return max(self.h.degree, 1) * abs(self.omega)

    def __call__(self, x):
        return self.deriv(0, x)

    def deriv(self, m: int, x):
        if m not in self._derivs:
            self._derivs[m] = self.h.theta_derivative(m)
        return self.omega ** m * self._derivs[m].at_theta(self.omega * np.asarray(x, dtype=float))

    def translate(self, lam: float) -> "LineTrig":
        """``x -> f(x - lam)``."""
        return LineTrig(self.h.rotate(self.omega * lam), self.omega)


class LinePoly:
    """Polynomial ``sum_k c_k x^k`` (ascending coefficients) on the real line."""

    domain = "line"
    max_deriv = None
    bandwidth = 0.0

    def __init__(self, coeffs):
        self.poly = np.polynomial.Polynomial(np.asarray(coeffs, dtype=np.complex128))

    @property
    def degree(self) -> int:
        return self.poly.degree()

    def __call__(self, x):
        return self.poly(np.asarray(x))

    def deriv(self, m: int, x):
        if m > self.degree:
            return np.zeros(np.shape(x), dtype=np.complex128)
        return self.poly.deriv(m)(np.asarray(x)) if m else self.poly(np.asarray(x))


class LineFn:
    """Generic real-line function with a finite list of exact derivatives.

    ``derivs[m]`` evaluates ``f^{(m)}``; ``derivs[0]`` is ``f``.  Tuples closer
    than ``taylor_radius`` need derivatives beyond the divided-difference order
    and raise :class:`CapabilityError` once the list runs out.
    """

    domain = "line"

    def __init__(self, derivs, taylor_radius: float = 1e-4):
        self.derivs = list(derivs)
        if not self.derivs:
            raise ValueError("need at least the function itself")
        self.max_deriv = len(self.derivs) - 1
        self.taylor_radius = float(taylor_radius)

    @property
    def bandwidth(self) -> float:
        return TAYLOR_FRACTION / self.taylor_radius

    def __call__(self, x):
        return self.deriv(0, x)

    def deriv(self, m: int, x):
        if m > self.max_deriv:
            raise CapabilityError(f"derivative of order {m} requested, only {self.max_deriv} available")
        return np.asarray(self.derivs[m](np.asarray(x, dtype=float)), dtype=np.complex128)


def _domain_of(E: EigenSystem) -> str:
    return "circle" if E.kind == "unitary" else "line"


def apply_fn(E: EigenSystem, f) -> np.ndarray:
    """``V diag(f(lambda)) V*``; the function domain must match the spectrum."""
    if f.domain != _domain_of(E):
        raise ValueError(f"{f.domain} function applied to a {E.kind} spectrum")
    return E.compose(f(E.points))


def matrix_fn(m, f) -> np.ndarray:
    """``f(M)`` for Hermitian (line ``f``) or unitary (circle ``f``) ``M``."""
    E = eig_unitary(m) if f.domain == "circle" else eig_hermitian(m)
    return apply_fn(E, f)


# divided differences --------------------------------------------------------

def _taylor_radius(f) -> float:
    if isinstance(f, LinePoly):
        return np.inf
    if isinstance(f, LineFn):
        return f.taylor_radius
    return TAYLOR_FRACTION / f.bandwidth


def _taylor_terms(f, k: int, diam: float) -> int:
    if isinstance(f, LinePoly):
        return max(f.degree - k + 1, 1)
    if f.max_deriv is None:
        return TAYLOR_TERMS
    # the truncated series is accurate to about diam^J; exact when confluent
    need = 1 if diam == 0.0 else min(TAYLOR_TERMS, max(1, int(np.ceil(TAYLOR_ACCURACY / -np.log10(diam)))))
    have = f.max_deriv - k + 1
    if have < need:
        raise CapabilityError(
            f"divided difference of order {k} at spread {diam:.1e} needs derivatives up to order "
            f"{k + need - 1}, only {f.max_deriv} available"
        )
    return min(TAYLOR_TERMS, have)


def _dd_taylor(f, P: np.ndarray, k: int) -> np.ndarray:
    # sum_j f^{(k+j)}(c)/(k+j)! h_j(y), h_j complete homogeneous in y = P - c
    c = P.mean(axis=1)
    y = P - c[:, None]
    J = _taylor_terms(f, k, float(np.ptp(P.real, axis=1).max() + np.ptp(P.imag, axis=1).max()))
    H = np.zeros((J, P.shape[0]), dtype=np.complex128)
    H[0] = 1.0
    for i in range(k + 1):
        for j in range(1, J):
            H[j] = H[j] + y[:, i] * H[j - 1]
    out = np.zeros(P.shape[0], dtype=np.complex128)
    for j in range(J):
        out += f.deriv(k + j, c) / factorial(k + j) * H[j]
    return out


def _dd_rows(f, P: np.ndarray) -> np.ndarray:
    M, kp1 = P.shape
    k = kp1 - 1
    if k == 0:
        return np.asarray(f.deriv(0, P[:, 0]), dtype=np.complex128)
    out = np.empty(M, dtype=np.complex128)
    if M == 0:
        return out
    dist = np.abs(P[:, :, None] - P[:, None, :]).reshape(M, -1)
    flat = np.argmax(dist, axis=1)
    diam = dist[np.arange(M), flat]
    a, b = np.divmod(flat, kp1)
    near = diam <= _taylor_radius(f)
    if near.any():
        out[near] = _dd_taylor(f, P[near], k)
    far = ~near
    if far.any():
        Pf, af, bf = P[far], a[far], b[far]
        cols = np.arange(kp1)[None, :]
        without_b = Pf[cols != bf[:, None]].reshape(-1, k)
        without_a = Pf[cols != af[:, None]].reshape(-1, k)
        rows = np.arange(len(Pf))
        out[far] = (_dd_rows(f, without_b) - _dd_rows(f, without_a)) / (Pf[rows, af] - Pf[rows, bf])
    return out


def divided_diff(f, points, k: int | None = None) -> complex:
    """``(D^k f)(x_1, ..., x_{k+1})``; symmetric, confluent points allowed."""
    pts = np.asarray(points)
    if pts.ndim != 1 or pts.size == 0:
        raise ValueError("points must be a non-empty list")
    if k is None:
        k = pts.size - 1
    if pts.size != k + 1:
        raise ValueError(f"order {k} needs {k + 1} points, got {pts.size}")
    dtype = np.complex128 if f.domain == "circle" else float
    return complex(_dd_rows(f, pts.astype(dtype)[None, :])[0])


def dd_table(f, *grids) -> np.ndarray:
    """Array ``T[i_1, ..., i_{k+1}] = (D^k f)(g_1[i_1], ..., g_{k+1}[i_{k+1}])``."""
    if not grids:
        raise ValueError("need at least one grid")
    dtype = np.complex128 if f.domain == "circle" else float
    grids = [np.asarray(g).astype(dtype) for g in grids]
    shape = tuple(len(g) for g in grids)
    mesh = np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, len(grids))
    out = np.empty(len(mesh), dtype=np.complex128)
    for start in range(0, len(mesh), TABLE_CHUNK):
        out[start:start + TABLE_CHUNK] = _dd_rows(f, mesh[start:start + TABLE_CHUNK])
    return out.reshape(shape)


def spectral_table(f, *systems: EigenSystem) -> np.ndarray:
    for E in systems:
        if f.domain != _domain_of(E):
            raise ValueError(f"{f.domain} function on a {E.kind} spectrum")
    return dd_table(f, *(E.points for E in systems))


# operator integrals --------------------------------------------------------

def _kernel_table(phi, systems) -> np.ndarray:
    if callable(phi):
        mesh = np.meshgrid(*(E.points for E in systems), indexing="ij")
        return np.asarray(phi(*mesh), dtype=np.complex128)
    table = np.asarray(phi, dtype=np.complex128)
    if table.ndim == 0:
        table = np.full(tuple(E.dim for E in systems), table)
    if table.shape != tuple(E.dim for E in systems):
        raise ValueError(f"kernel table shape {table.shape} does not match spectra")
    return table


def moi(phi, systems, ops) -> np.ndarray:
    """Multiple operator integral ``int Phi dE_1 T_1 dE_2 ... T_r dE_{r+1}``.

    In mixed eigenbases entry ``(i_1, i_{r+1})`` is
    ``sum Phi[i_1..i_{r+1}] prod T'_t[i_t, i_{t+1}]`` with
    ``T'_t = V_t* T_t V_{t+1}``.
    """
    systems = list(systems)
    ops = [as_matrix(t) for t in ops]
    if len(systems) != len(ops) + 1:
        raise ValueError("need one more spectral measure than operators")
    if len(systems) > 5:
        raise ValueError("at most four operator slots are supported")
    n = systems[0].dim
    if any(E.dim != n for E in systems) or any(t.shape != (n, n) for t in ops):
        raise ValueError("dimension mismatch")
    table = _kernel_table(phi, systems)
    mixed = [systems[t].vectors.conj().T @ ops[t] @ systems[t + 1].vectors for t in range(len(ops))]
    idx = "abcde"[: len(systems)]
    spec = idx + "," + ",".join(idx[t] + idx[t + 1] for t in range(len(ops))) + "->" + idx[0] + idx[-1]
    core = np.einsum(spec, table, *mixed, optimize=True)
    return systems[0].vectors @ core @ systems[-1].vectors.conj().T


def doi(phi, EA: EigenSystem, EB: EigenSystem, Q) -> np.ndarray:
    """``V_A (Phi(lambda_i, mu_j) * (V_A* Q V_B)) V_B*``."""
    Q = as_matrix(Q)
    if Q.shape != (EA.dim, EB.dim):
        raise ValueError("dimension mismatch")
    table = _kernel_table(phi, [EA, EB])
    return EA.vectors @ (table * (EA.vectors.conj().T @ Q @ EB.vectors)) @ EB.vectors.conj().T


def moi3(phi, E1, E2, E3, K1, K2) -> np.ndarray:
    return moi(phi, [E1, E2, E3], [K1, K2])


# perturbation expressions ----------------------------------------------------

def higher_diff_sa(A, K, m: int, f, route: str = "direct") -> np.ndarray:
    """``(Delta_K^m f)(A) = sum_j (-1)^{m-j} C(m,j) f(A + jK)``.

    ``route="moi"`` evaluates ``m! int D^m f dE_A K dE_{A+K} ... K dE_{A+mK}``
    (``m <= 3``).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    A = as_hermitian(A)
    K = as_hermitian(K)
    systems = [eig_hermitian(A + j * K) for j in range(m + 1)]
    if route == "direct":
        return sum((-1) ** (m - j) * comb(m, j) * apply_fn(E, f) for j, E in enumerate(systems))
    if route == "moi":
        if m > 3:
            raise ValueError("moi route supports m <= 3")
        return factorial(m) * moi(spectral_table(f, *systems), systems, [K] * m)
    raise ValueError(f"unknown route {route!r}")


def higher_diff_unitary_m2(U, A, f: TrigPoly, route: str = "direct") -> np.ndarray:
    """``f(U) - 2 f(e^{iA} U) + f(e^{2iA} U)``.

    ``route="formula"`` uses
    ``2 int D^2 f dE_1 (U_1 - U_2) dE_2 (U_2 - U_3) dE_3
    + int D f dE_1 (U_1 - 2U_2 + U_3) dE_3``.
    """
    A = as_hermitian(A)
    U1 = as_matrix(U)
    U2 = expi(A) @ U1
    U3 = expi(2.0 * A) @ U1
    E1, E2, E3 = eig_unitary(U1), eig_unitary(U2), eig_unitary(U3)
    if route == "direct":
        return apply_fn(E1, f) - 2.0 * apply_fn(E2, f) + apply_fn(E3, f)
    if route == "formula":
        second = moi(spectral_table(f, E1, E2, E3), [E1, E2, E3], [U1 - U2, U2 - U3])
        first = doi(spectral_table(f, E1, E3), E1, E3, U1 - 2.0 * U2 + U3)
        return 2.0 * second + first
    raise ValueError(f"unknown route {route!r}")


def quasicommutator(A, B, Q, f, route: str = "direct") -> np.ndarray:
    """``f(A) Q - Q f(B)``, or its representation
    ``int D f dE_A (AQ - QB) dE_B`` with ``route="doi"``."""
    A = as_hermitian(A)
    B = as_hermitian(B)
    Q = as_matrix(Q)
    if not A.shape == B.shape == Q.shape:
        raise ValueError("dimension mismatch")
    EA, EB = eig_hermitian(A), eig_hermitian(B)
    if route == "direct":
        return apply_fn(EA, f) @ Q - Q @ apply_fn(EB, f)
    if route == "doi":
        return doi(spectral_table(f, EA, EB), EA, EB, A @ Q - Q @ B)
    raise ValueError(f"unknown route {route!r}")


def _poly_matrix(coeffs, X) -> np.ndarray:
    n = X.shape[0]
    acc = np.zeros_like(X)
    for c in coeffs[::-1]:
        acc = acc @ X
        acc[np.diag_indices(n)] += c
    return acc


def contraction_poly_diff(T, R, f: TrigPoly, m: int = 1) -> np.ndarray:
    """``sum_k (-1)^k C(m,k) f(T + (k/m)(R - T))`` for analytic ``f``.

    ``m = 1`` is ``f(T) - f(R)``.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if not f.is_analytic:
        raise ValueError("f must be analytic (no negative frequencies)")
    T = as_matrix(T)
    R = as_matrix(R)
    for name, X in (("T", T), ("R", R)):
        if svd(X).s0 > 1.0 + 1e-10:
            raise ValueError(f"{name} is not a contraction")
    coeffs = f.coeffs[f.degree:]
    D = R - T
    return sum((-1) ** k * comb(m, k) * _poly_matrix(coeffs, T + (k / m) * D) for k in range(m + 1))
