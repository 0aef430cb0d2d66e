#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Times batched sampling and chain evaluation over a grid of model sizes,
including the default operating point of the optimizer (d=100, N=1024,
r=5, k=100).  Run after `pip install -e . --no-build-isolation`.
"""

import time

import numpy as np

from tesalocs import init_random
from tesalocs.kernels import available_backends, get_backend
from tesalocs.tt import scaled_suffix_interfaces

CASES = [
    # (d, n, r, k) — chain depth, nodes per mode, rank, batch size
    (4, 3, 2, 100_000),
    (10, 32, 5, 1_000),
    (100, 1024, 5, 100),
    (100, 64, 5, 1_000),
    (256, 16, 8, 500),
]


def time_call(fn, repeats=5):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    backends = [get_backend(name) for name in available_backends()]
    print(f"backends: {[b.NAME for b in backends]}")
    header = f"{'case (d,n,r,k)':>22s} | {'kernel':>12s}"
    for b in backends:
        header += f" | {b.NAME:>10s}"
    print(header)
    print("-" * len(header))

    for d, n, r, k in CASES:
        t = init_random(d, n, r, seed=0)
        units, _ = scaled_suffix_interfaces(t)
        uniforms = np.random.default_rng(1).random((k, d))
        indices = np.random.default_rng(2).integers(0, n, size=(k, d))

        row = f"{str((d, n, r, k)):>22s} | {'sample':>12s}"
        for b in backends:
            dt = time_call(lambda b=b: b.sample_indices(t.cores, units, uniforms))
            row += f" | {dt * 1e3:8.1f}ms"
        print(row)

        row = f"{'':>22s} | {'log_eval':>12s}"
        for b in backends:
            dt = time_call(lambda b=b: b.log_eval_many(t.cores, indices))
            row += f" | {dt * 1e3:8.1f}ms"
        print(row)


if __name__ == "__main__":
    main()
