"""Time the numba kernels against their numpy fallbacks.

Run: python3 benchmarks/bench_kernels.py [--repeat N]
Results of both backends are compared before any timing is reported.
"""

import argparse
import time

import numpy as np

from toral_orbits import kernels

CASES = {
    "walk Arnold mod 300 (90k points)": lambda b: kernels.walk_functional_graph(
        kernels.successor_map([[2, 1], [1, 1]], 300), backend=b
    ),
    "walk [[4,4],[1,4]] mod 512 (262k points)": lambda b: kernels.walk_functional_graph(
        kernels.successor_map([[4, 4], [1, 4]], 512), backend=b
    ),
    "intertwiner scan mod 16": lambda b: kernels.scan_intertwiners(
        [[1, -1], [-1, 2]], [[2, 1], [1, 1]], 16, backend=b
    ),
    "recurrence period Fibonacci mod 10007": lambda b: kernels.recurrence_period(1, 1, 10007, backend=b),
}


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    print(f"{'case':45s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for name, case in CASES.items():
        first = case("numba")  # also triggers compilation
        if not _same(first, case("numpy")):
            raise SystemExit(f"backends disagree on {name}")
        t_numba = best_of(lambda: case("numba"), args.repeat)
        t_numpy = best_of(lambda: case("numpy"), args.repeat)
        print(f"{name:45s} {t_numba:10.4f} {t_numpy:10.4f} {t_numpy / t_numba:7.1f}x")


if __name__ == "__main__":
    main()
