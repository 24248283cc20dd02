"""Benchmark the sampling kernel: numba JIT path versus the pure-numpy fallback.

Both backends draw the identical counts (verified before timing), so the numbers
are a straight apples-to-apples throughput comparison of the hot loop that
dominates the Monte Carlo experiments.

    python3 benchmarks/kernel_bench.py [--runs N] [--m M] [--repeat K]
"""

import argparse
import time

import numpy as np

from nlaphase.kernels import NUMBA_AVAILABLE, categorical_counts, derive_key

PROBS = np.array([0.0376, 0.0376, 0.4624, 0.4624, 0.0])  # five-outcome working point


def best_time(backend, key, runs, m, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        categorical_counts(key, 0, runs, m, PROBS, backend=backend)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--runs", type=int, default=20_000, help="experiments per timing")
    parser.add_argument("--m", type=int, default=1000, help="trials per experiment")
    parser.add_argument("--repeat", type=int, default=3, help="repetitions, best-of")
    args = parser.parse_args()

    key = derive_key(12345, 0)
    trials = args.runs * args.m
    backends = ["numpy"]
    if NUMBA_AVAILABLE:
        backends.insert(0, "numba")
        # compile outside the timed region, then check the backends agree bit for bit
        a = categorical_counts(key, 0, 64, args.m, PROBS, backend="numba")
        b = categorical_counts(key, 0, 64, args.m, PROBS, backend="numpy")
        assert np.array_equal(a, b), "backends disagree; benchmark aborted"
        print("bit-identity check: OK (64 runs compared)")
    else:
        print("numba not importable; timing the numpy fallback only")

    print(f"workload: {args.runs} runs x {args.m} trials = {trials:.2e} categorical draws\n")
    times = {}
    for backend in backends:
        t = best_time(backend, key, args.runs, args.m, args.repeat)
        times[backend] = t
        print(f"{backend:>6}: {t:8.3f} s   ({trials / t / 1e6:8.1f} M trials/s)")
    if len(times) == 2:
        print(f"\nspeedup numba over numpy: {times['numpy'] / times['numba']:.1f}x")


if __name__ == "__main__":
    main()
