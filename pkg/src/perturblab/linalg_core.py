"""Dense complex linear algebra: spectral decompositions, singular values,
exponentials, Cayley transforms and seeded random ensembles.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; the
``as_hermitian`` / ``as_unitary`` validators enforce the structural tolerances
at the boundary of every routine that needs them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 60
CLUSTER_TOL = 1e-8
RECONSTRUCTION_TOL = 1e-9


class ConvergenceError(np.linalg.LinAlgError):
    """Eigensolver failed; ``residual`` carries the last measured error."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def as_hermitian(m) -> np.ndarray:
    """Validate Hermitian structure and return the exactly symmetrized matrix."""
    a = as_matrix(m)
    fro = np.linalg.norm(a)
    defect = np.max(np.abs(a - a.conj().T))
    if defect > HERMITIAN_TOL * fro:
        raise ValueError(f"matrix is not Hermitian: max |M - M*| = {defect:.3e}")
    return 0.5 * (a + a.conj().T)


def as_unitary(m) -> np.ndarray:
    a = as_matrix(m)
    n = a.shape[0]
    defect = np.linalg.norm(a.conj().T @ a - np.eye(n))
    if defect > UNITARY_TOL * np.sqrt(n):
        raise ValueError(f"matrix is not unitary: ||U*U - I||_F = {defect:.3e}")
    return a


@dataclass(frozen=True)
class EigenSystem:
    """Orthonormal eigenvectors (columns) with sorted real values.

    For ``kind == "unitary"`` the values are eigenphases in (-pi, pi] and the
    spectral points are ``exp(1j * values)``.
    """

    vectors: np.ndarray
    values: np.ndarray
    kind: str = "hermitian"

    @property
    def dim(self) -> int:
        return len(self.values)

    @property
    def points(self) -> np.ndarray:
        if self.kind == "unitary":
            return np.exp(1j * self.values)
        return self.values

    def compose(self, diag) -> np.ndarray:
        """``V diag(d) V*`` for spectral weights ``d``."""
        d = np.asarray(diag)
        return (self.vectors * d) @ self.vectors.conj().T

    def matrix(self) -> np.ndarray:
        return self.compose(self.points)

    def to_basis(self, m) -> np.ndarray:
        return self.vectors.conj().T @ m

    def residual(self, m) -> float:
        return float(np.linalg.norm(self.matrix() - m))


@dataclass(frozen=True)
class SingularSpectrum:
    """Nonincreasing singular values ``s_0 >= s_1 >= ... >= 0``."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or np.any(v < 0) or np.any(np.diff(v) > 0):
            raise ValueError("singular values must be a nonincreasing nonnegative list")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)

    def __getitem__(self, j):
        return self.values[j]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    @property
    def s0(self) -> float:
        return float(self.values[0]) if len(self.values) else 0.0

    def rank(self, tol=1e-8) -> int:
        return int(np.sum(self.values > tol))


def eig_hermitian(h) -> EigenSystem:
    """Spectral decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Raises :class:`ConvergenceError` if the off-diagonal mass has not fallen
    below ``JACOBI_TOL * ||H||_F`` after ``JACOBI_MAX_SWEEPS`` sweeps.
    """
    a = as_hermitian(h)
    values, vectors, sweeps, off = _backend.jacobi_eigh(a, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if sweeps < 0:
        raise ConvergenceError(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps", off)
    order = np.argsort(values, kind="stable")
    return EigenSystem(vectors[:, order], values[order], "hermitian")


def eig_unitary(u, cluster_tol=CLUSTER_TOL) -> EigenSystem:
    """Spectral decomposition of a unitary matrix.

    Diagonalizes ``(U + U*)/2`` first, then resolves each of its eigenclusters
    with ``(U - U*)/(2i)`` restricted to the cluster; the two commute because
    ``U`` is normal.
    """
    a = as_unitary(u)
    n = a.shape[0]
    re_part = 0.5 * (a + a.conj().T)
    im_part = (a - a.conj().T) / 2j
    first = eig_hermitian(re_part)
    vecs = first.vectors.copy()
    vals = first.values
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and vals[stop] - vals[stop - 1] <= cluster_tol:
            stop += 1
        if stop - start > 1:
            block = vecs[:, start:stop]
            sub = block.conj().T @ im_part @ block
            inner = eig_hermitian(0.5 * (sub + sub.conj().T))
            vecs[:, start:stop] = block @ inner.vectors
        start = stop
    rayleigh = np.einsum("ij,ij->j", vecs.conj(), a @ vecs)
    phases = np.angle(rayleigh)
    phases[phases <= -np.pi] = np.pi
    order = np.argsort(phases, kind="stable")
    es = EigenSystem(vecs[:, order], phases[order], "unitary")
    res = es.residual(a)
    if res > RECONSTRUCTION_TOL * np.linalg.norm(a):
        raise ConvergenceError("unitary eigensolver could not separate eigenclusters", res)
    return es


def svd(t) -> SingularSpectrum:
    """Singular values as square roots of the eigenvalues of ``T*T``.

    Exactly Hermitian input takes the shortcut ``|eig(T)|``, which is the same
    spectrum without squaring the condition number.
    """
    a = as_matrix(t)
    if np.array_equal(a, a.conj().T):
        s = np.abs(eig_hermitian(a).values)
    else:
        g = a.conj().T @ a
        s = np.sqrt(np.clip(eig_hermitian(0.5 * (g + g.conj().T)).values, 0.0, None))
    return SingularSpectrum(np.sort(s)[::-1])


def expi(a) -> np.ndarray:
    """``exp(iA)`` for Hermitian ``A``."""
    es = eig_hermitian(a)
    return es.compose(np.exp(1j * es.values))


def cayley(a) -> np.ndarray:
    """``(A - iI)(A + iI)^{-1}`` computed spectrally, hence exactly unitary."""
    es = eig_hermitian(a)
    lam = es.values
    return es.compose((lam - 1j) / (lam + 1j))


class Rng:
    """Philox-backed stream with Box-Muller complex Gaussians."""

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._gen = np.random.Generator(np.random.Philox(key=self.seed))

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._gen.uniform(low, high, size)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size)

    def complex_normal(self, size):
        """Standard complex Gaussians, ``E|z|^2 = 1``."""
        u1 = 1.0 - self._gen.random(size)  # (0, 1]
        u2 = self._gen.random(size)
        r = np.sqrt(-np.log(u1))
        return r * np.exp(2j * np.pi * u2)

    def normal(self, size):
        u1 = 1.0 - self._gen.random(size)
        u2 = self._gen.random(size)
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def rand_operator(kind: str, dim: int, seed: int, scale: float = 1.0) -> np.ndarray:
    """Seeded random matrix of the given kind.

    ``hermitian``: ``scale * (G + G*)/2``; ``unitary``: Haar unitary from the QR
    factorization of ``G`` (``scale`` unused); ``contraction``: ``G / s_0(G)``
    shrunk by ``min(scale, 1)``; ``general``: ``scale * G``.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    g = Rng(seed).complex_normal((dim, dim))
    if kind == "hermitian":
        return scale * 0.5 * (g + g.conj().T)
    if kind == "unitary":
        q, r = np.linalg.qr(g)
        d = np.diagonal(r)
        return q * (d / np.abs(d))
    if kind == "contraction":
        s0 = svd(g).s0
        return g * (min(scale, 1.0) / (s0 * (1.0 + 1e-12)))
    if kind == "general":
        return scale * g
    raise ValueError(f"unknown operator kind {kind!r}")


def hermitian_perturbation(rng: Rng, dim: int, scale: float, rank: int | None = None) -> np.ndarray:
    """Random Hermitian ``K`` with ``||K|| = scale`` and optional rank."""
    g = rng.complex_normal((dim, dim))
    k = 0.5 * (g + g.conj().T)
    if rank is not None and rank < dim:
        es = eig_hermitian(k)
        keep = np.argsort(-np.abs(es.values))[:rank]
        w = np.zeros(dim)
        w[keep] = es.values[keep]
        k = es.compose(w)
        k = 0.5 * (k + k.conj().T)
    norm = svd(k).s0
    return k * (scale / norm) if norm > 0 else k
