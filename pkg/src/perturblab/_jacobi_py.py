"""Pure-Python (numpy) Jacobi eigensolver, used when the compiled core is absent.

Rotations are applied in round-robin (tournament) order so that each step acts
on ``n // 2`` disjoint index pairs at once; a full sweep touches every pair
exactly once, as in the cyclic ordering of the compiled kernel.
"""

import numpy as np


def _tournament(n):
    # Even number of players; index n (if n odd) is a bye.
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        half = m // 2
        pairs = [(players[i], players[m - 1 - i]) for i in range(half)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n]
        rounds.append(np.array(pairs, dtype=np.intp).reshape(-1, 2))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(m, tol, max_sweeps):
    """Same contract as the compiled ``jacobi_eigh``."""
    a = np.array(m, dtype=np.complex128, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    fro = np.linalg.norm(a)
    if fro == 0.0:
        return np.zeros(n), v, 0, 0.0
    skip = 1e-300 + 1e-18 * fro
    a[np.diag_indices(n)] = a.diagonal().real
    rounds = _tournament(n)
    sweep = 0
    while True:
        off = np.linalg.norm(a - np.diag(a.diagonal()))
        if off <= tol * fro:
            break
        if sweep >= max_sweeps:
            sweep = -1
            break
        for pairs in rounds:
            if pairs.size == 0:
                continue
            p, q = pairs[:, 0], pairs[:, 1]
            apq = a[p, q]
            r = np.abs(apq)
            live = r > skip
            if not live.any():
                continue
            p, q, apq, r = p[live], q[live], apq[live], r[live]
            app = a[p, p].real
            aqq = a[q, q].real
            e = apq / r
            zeta = (aqq - app) / (2.0 * r)
            t = np.sign(zeta) / (np.abs(zeta) + np.hypot(1.0, zeta))
            t[zeta == 0.0] = 1.0
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            se = s * e
            sec = s * np.conj(e)
            cp, cq = a[:, p], a[:, q]
            a[:, p] = c * cp - sec * cq
            a[:, q] = se * cp + c * cq
            rp, rq = a[p, :], a[q, :]
            a[p, :] = c[:, None] * rp - se[:, None] * rq
            a[q, :] = sec[:, None] * rp + c[:, None] * rq
            a[p, q] = 0.0
            a[q, p] = 0.0
            a[p, p] = app - t * r
            a[q, q] = aqq + t * r
            vp, vq = v[:, p], v[:, q]
            v[:, p] = c * vp - sec * vq
            v[:, q] = se * vp + c * vq
        sweep += 1
    return a.diagonal().real.copy(), v, sweep, off
