# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Cyclic complex Jacobi sweeps for dense Hermitian matrices (compiled core).

Complex entries are handled as interleaved (re, im) doubles to keep the inner
loops free of libm complex-multiply calls.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, hypot

cnp.import_array()


cdef double offdiag_norm(double* a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j, idx
    cdef double acc = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                idx = 2 * (i * n + j)
                acc += a[idx] * a[idx] + a[idx + 1] * a[idx + 1]
    return sqrt(acc)


cdef void rotate(double* a, double* v, Py_ssize_t n, Py_ssize_t p, Py_ssize_t q,
                 double skip) noexcept nogil:
    cdef Py_ssize_t k, ip, iq, jp, jq
    cdef Py_ssize_t pq = 2 * (p * n + q)
    cdef double xr = a[pq], xi = a[pq + 1]
    cdef double r = hypot(xr, xi)
    cdef double app, aqq, er, ei, zeta, t, c, s
    cdef double pr, pi, qr, qi
    if r <= skip:
        return
    app = a[2 * (p * n + p)]
    aqq = a[2 * (q * n + q)]
    er = xr / r
    ei = xi / r
    zeta = (aqq - app) / (2.0 * r)
    if fabs(zeta) > 1e150:
        t = 0.5 / zeta
    else:
        t = 1.0 / (fabs(zeta) + hypot(1.0, zeta))
        if zeta < 0.0:
            t = -t
    c = 1.0 / sqrt(1.0 + t * t)
    s = t * c
    # columns: new_p = c*x_p - s*conj(e)*x_q ; new_q = s*e*x_p + c*x_q
    # rows follow by Hermitian symmetry, so only off-block columns are rotated.
    for k in range(n):
        if k == p or k == q:
            continue
        ip = 2 * (k * n + p)
        iq = 2 * (k * n + q)
        pr = a[ip]; pi = a[ip + 1]
        qr = a[iq]; qi = a[iq + 1]
        a[ip] = c * pr - s * (er * qr + ei * qi)
        a[ip + 1] = c * pi - s * (er * qi - ei * qr)
        a[iq] = s * (er * pr - ei * pi) + c * qr
        a[iq + 1] = s * (er * pi + ei * pr) + c * qi
        jp = 2 * (p * n + k)
        jq = 2 * (q * n + k)
        a[jp] = a[ip]
        a[jp + 1] = -a[ip + 1]
        a[jq] = a[iq]
        a[jq + 1] = -a[iq + 1]
    a[pq] = 0.0
    a[pq + 1] = 0.0
    a[2 * (q * n + p)] = 0.0
    a[2 * (q * n + p) + 1] = 0.0
    a[2 * (p * n + p)] = app - t * r
    a[2 * (q * n + q)] = aqq + t * r
    for k in range(n):
        ip = 2 * (k * n + p)
        iq = 2 * (k * n + q)
        pr = v[ip]; pi = v[ip + 1]
        qr = v[iq]; qi = v[iq + 1]
        v[ip] = c * pr - s * (er * qr + ei * qi)
        v[ip + 1] = c * pi - s * (er * qi - ei * qr)
        v[iq] = s * (er * pr - ei * pi) + c * qr
        v[iq + 1] = s * (er * pi + ei * pr) + c * qi


def jacobi_eigh(m, double tol, int max_sweeps):
    """Diagonalize a Hermitian matrix with cyclic Jacobi rotations.

    Returns ``(values, vectors, sweeps, off)`` where ``off`` is the final
    off-diagonal Frobenius mass; ``sweeps == -1`` signals non-convergence.
    """
    cdef Py_ssize_t n = m.shape[0]
    a_arr = np.array(m, dtype=np.complex128, order="C", copy=True)
    v_arr = np.eye(n, dtype=np.complex128)
    cdef double[::1] a_view = a_arr.view(np.float64).reshape(-1)
    cdef double[::1] v_view = v_arr.view(np.float64).reshape(-1)
    cdef double* a = &a_view[0]
    cdef double* v = &v_view[0]
    cdef Py_ssize_t p, q
    cdef double fro = np.linalg.norm(a_arr)
    cdef double off, skip
    cdef int sweep = 0
    if fro == 0.0:
        return np.zeros(n), v_arr, 0, 0.0
    skip = 1e-300 + 1e-18 * fro
    with nogil:
        for p in range(n):
            a[2 * (p * n + p) + 1] = 0.0
        while True:
            off = offdiag_norm(a, n)
            if off <= tol * fro:
                break
            if sweep >= max_sweeps:
                sweep = -1
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    rotate(a, v, n, p, q, skip)
            sweep += 1
    values = np.real(np.diagonal(a_arr)).copy()
    return values, v_arr, sweep, off
