"""Time the compiled Jacobi kernel against the numpy fallback.

    python benchmarks/bench_kernels.py --dims 8 16 32 64 --repeat 5

Prints one line per (backend, dim) with the best wall time, the sweep count
and the largest eigenvalue difference from ``numpy.linalg.eigvalsh``.
"""

import argparse
import time

import numpy as np

from perturblab._backend import kernels
from perturblab.linalg_core import JACOBI_MAX_SWEEPS, JACOBI_TOL, Rng


def bench(fn, m, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(m, JACOBI_TOL, JACOBI_MAX_SWEEPS)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[8, 16, 32, 64, 128])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    available = kernels()
    print(f"{'backend':>9} {'dim':>5} {'seconds':>11} {'sweeps':>6} {'max |dlam|':>11}")
    for dim in args.dims:
        g = Rng(args.seed).complex_normal((dim, dim))
        m = 0.5 * (g + g.conj().T)
        ref = np.linalg.eigvalsh(m)
        times = {}
        for name, fn in available.items():
            sec, (w, _, sweeps, _) = bench(fn, m, args.repeat)
            times[name] = sec
            print(f"{name:>9} {dim:>5} {sec:>11.3e} {sweeps:>6} {np.abs(np.sort(w) - ref).max():>11.2e}")
        if len(times) == 2:
            print(f"{'speedup':>9} {dim:>5} {times['python'] / times['compiled']:>11.1f}x")


if __name__ == "__main__":
    main()
