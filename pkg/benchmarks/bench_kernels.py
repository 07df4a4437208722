"""Compare the numba and numpy point-scan backends.

Usage: python3 benchmarks/bench_kernels.py [--q 7] [--n 7] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fanstalk import kernels
from fanstalk.intlinalg import rank


def workload(n: int, q: int):
    # three two-term equations over n coordinates
    E1 = np.zeros((3, n), np.int64)
    E2 = np.zeros((3, n), np.int64)
    E1[0, 0], E2[0, 1] = 2, 3
    E1[1, 1], E1[1, 2], E2[1, n - 1] = 1, 2, 4
    E1[2, 0], E2[2, 2], E2[2, n - 2] = 3, 1, 2
    c1 = np.ones(3, np.int64)
    c2 = np.array([q - 1, q - 2, q - 3], np.int64)
    inv = np.zeros(n, bool)
    D = (E1 - E2).tolist()
    table = [rank([D[j] for j in range(3) if bits >> j & 1]) for bits in range(8)]
    return E1, E2, c1, c2, inv, table


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, default=7)
    ap.add_argument("--n", type=int, default=7)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    E1, E2, c1, c2, inv, table = workload(args.n, args.q)
    points = args.q ** args.n
    print(f"q={args.q} n={args.n} points={points} threads={kernels.thread_count()}")
    backends = ["numpy"] + (["numba"] if kernels.HAVE_NUMBA else [])
    results = {}
    for name in backends:
        # one untimed call compiles the numba kernels
        kernels.jacobian_violations(E1, E2, c1, c2, args.q, inv, table, name)
        t, out = timed(lambda: kernels.jacobian_violations(E1, E2, c1, c2, args.q, inv, table, name),
                       args.repeat)
        results[name] = out
        print(f"{name:6s} {t:8.3f} s  {points / t / 1e6:7.2f} Mpoints/s  {out.size} violations")
    if len(results) == 2:
        same = np.array_equal(results["numpy"], results["numba"])
        print(f"backends agree: {same}")


if __name__ == "__main__":
    main()
