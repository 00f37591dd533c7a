"""Compare the numba and pure-numpy kernel backends.

    python benchmarks/bench_kernels.py [--points N] [--repeat R]

The numba timings exclude the first (compiling) call.
"""

import argparse
import time

import numpy as np

from sokkt import _kernels
from sokkt.catalog import random_function


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'n':>3}{'points':>10}{'numpy [ms]':>13}{'numba [ms]':>13}{'speedup':>9}")
    for n in (1, 2, 3):
        f = random_function(rng, n, n_terms=8, n_kinks=4)
        X = rng.uniform(-1, 1, (args.points, n))
        packed = f.packed
        _kernels.eval_points_numba(X[:10], *packed)
        a = _best(lambda: _kernels.eval_points_numpy(X, *packed), args.repeat)
        b = _best(lambda: _kernels.eval_points_numba(X, *packed), args.repeat)
        print(f"{'eval_points':<22}{n:>3}{args.points:>10}{a * 1e3:>13.2f}{b * 1e3:>13.2f}{a / b:>9.1f}")

    F = rng.uniform(0, 1, (args.points, 2))
    G = rng.uniform(-1, 1, (args.points, 2))
    f0 = np.zeros(2)  # nothing dominates: both kernels scan every row
    _kernels.first_dominating_numba(F[:10], G[:10], f0, 1e-9, 1e-10, False)
    a = _best(lambda: _kernels.first_dominating_numpy(F, G, f0, 1e-9, 1e-10, False), args.repeat)
    b = _best(lambda: _kernels.first_dominating_numba(F, G, f0, 1e-9, 1e-10, False), args.repeat)
    print(f"{'first_dominating':<22}{'':>3}{args.points:>10}{a * 1e3:>13.2f}{b * 1e3:>13.2f}{a / b:>9.1f}")


if __name__ == "__main__":
    main()
