"""Benchmark the compiled k-nearest-neighbor kernel against the fallback.

Times both kernels on the same random pools at several sizes, checks
that their outputs agree exactly, and prints one line per size with the
speedup of the compiled kernel. Run from the repository root:

    python3 benchmarks/bench_knn.py
"""

import argparse
import time

import numpy as np

from fairbalance import _knn_py

try:
    from fairbalance import _knn_cy
except ImportError:
    _knn_cy = None


def run_kernel(kernel, pool_x, query_x, pool_rows, query_rows, k, repeats):
    best = float("inf")
    result = None
    for _ in range(repeats):
        start = time.perf_counter()
        result = kernel.topk(pool_x, query_x, pool_rows, query_rows, k)
        best = min(best, time.perf_counter() - start)
    return result, best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--dims", type=int, default=12)
    parser.add_argument("--k", type=int, default=5)
    parser.add_argument("--queries", type=int, default=500)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument(
        "--sizes", type=int, nargs="+", default=[500, 2000, 8000, 32000]
    )
    args = parser.parse_args()

    if _knn_cy is None:
        print("compiled kernel not built; nothing to compare")
        return

    rng = np.random.default_rng(0)
    print(f"dims={args.dims} k={args.k} queries={args.queries} (best of {args.repeats})")
    print(f"{'pool':>8} {'python':>12} {'cython':>12} {'speedup':>8}")
    for n in args.sizes:
        pool_x = np.ascontiguousarray(rng.normal(size=(n, args.dims)))
        pool_rows = np.arange(n, dtype=np.int64)
        query_rows = rng.choice(n, size=min(args.queries, n), replace=False)
        query_x = np.ascontiguousarray(pool_x[query_rows])
        got_py, t_py = run_kernel(
            _knn_py, pool_x, query_x, pool_rows, query_rows, args.k, args.repeats
        )
        got_cy, t_cy = run_kernel(
            _knn_cy, pool_x, query_x, pool_rows, query_rows, args.k, args.repeats
        )
        if not np.array_equal(got_py, got_cy):
            raise SystemExit(f"kernel mismatch at pool size {n}")
        print(f"{n:>8} {t_py * 1e3:>10.2f}ms {t_cy * 1e3:>10.2f}ms {t_py / t_cy:>7.1f}x")


if __name__ == "__main__":
    main()
