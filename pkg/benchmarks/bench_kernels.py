#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the CSR matvec and the full adaptive propagation of the collective-
decay model on both paths and prints a small table.  The same comparison
drives the runtime selection: set LSW_NO_NUMBA=1 to force the fallback
package-wide.
"""

import argparse
import time

import numpy as np

from lsw import models
from lsw._kernels import (
    csr_matvec_numba,
    csr_matvec_numpy,
    rk45_csr_numba,
    rk45_csr_numpy,
)
from lsw.superop import to_csr, vectorize


def timeit(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-spins", type=int, default=16)
    parser.add_argument("--t-max", type=float, default=200.0)
    parser.add_argument("--n-points", type=int, default=101)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    p = models.SuperradianceParams.from_sqrt_n_g(args.n_spins, 0.2, gamma=1.0, omega=0.2)
    m = models.superradiance_model(p)
    g = to_csr(m.l0 + m.v)
    y0 = vectorize(m.initial_state)
    times = np.linspace(0.0, args.t_max, args.n_points)
    dim = y0.size
    print(f"collective-decay model: N={args.n_spins}, dim={dim}, nnz={g.nnz}")

    data = g.data.astype(np.complex128)
    mv_args = (g.indptr, g.indices, data, y0)
    rk_args = (g.indptr, g.indices, data, y0, times, 1e-9, 1e-12, 10**8)

    rows = []
    t_np, _ = timeit(lambda: csr_matvec_numpy(*mv_args), max(args.repeats, 10))
    rows.append(("csr_matvec", "numpy", t_np, 1.0))
    if csr_matvec_numba is not None:
        csr_matvec_numba(*mv_args)  # compile
        t_nb, _ = timeit(lambda: csr_matvec_numba(*mv_args), max(args.repeats, 10))
        rows.append(("csr_matvec", "numba", t_nb, t_np / t_nb))

    t_np, (out_np, status, steps) = timeit(lambda: rk45_csr_numpy(*rk_args), args.repeats)
    rows.append((f"rk45 ({steps} steps)", "numpy", t_np, 1.0))
    if rk45_csr_numba is not None:
        rk45_csr_numba(*rk_args)  # compile
        t_nb, (out_nb, _, _) = timeit(lambda: rk45_csr_numba(*rk_args), args.repeats)
        rows.append((f"rk45 ({steps} steps)", "numba", t_nb, t_np / t_nb))
        drift = np.abs(out_np - out_nb).max()
        print(f"path agreement: max |state difference| = {drift:.3e}")

    print(f"{'kernel':<22} {'path':<7} {'best time':>12} {'speedup':>9}")
    for kernel, path, seconds, speedup in rows:
        print(f"{kernel:<22} {path:<7} {seconds:>10.4f} s {speedup:>8.1f}x")


if __name__ == "__main__":
    main()
