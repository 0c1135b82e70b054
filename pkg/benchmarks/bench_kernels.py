"""Compiled kernels against their pure-Python twins.

    python benchmarks/bench_kernels.py [--sizes 1000 100000 1000000] [--repeat 5]

Prints the best-of-``repeat`` time per kernel and size, the speed-up, and
whether the two outputs are bit-identical.
"""
import argparse
import sys
import timeit

import numpy as np

from singtrace import _kernels_py as py

try:
    from singtrace import _kernels as cy
except ImportError:
    cy = None


def cases(size, rng):
    values = rng.standard_normal(size) * 10.0 ** rng.uniform(-8, 8, size)
    prefix = py.kahan_cumsum(values)
    n = max(1, size // 10)
    count = size + 1 - n
    return {
        "kahan_cumsum": ((values,), lambda m, a: m.kahan_cumsum(*a)),
        "compensated_sum": ((values,), lambda m, a: m.compensated_sum(*a)),
        "window_extrema": ((prefix, n, count), lambda m, a: m.window_extrema(*a)),
    }


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def same(a, b):
    if isinstance(a, np.ndarray):
        return bool(np.array_equal(a, b))
    return a == b


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1_000, 100_000, 1_000_000])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if cy is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation`")
        return 1
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<16} {'size':>9} {'python s':>11} {'compiled s':>11} {'speed-up':>9}  identical")
    for size in args.sizes:
        for name, (a, call) in cases(size, rng).items():
            t_py = best(lambda: call(py, a), args.repeat)
            t_cy = best(lambda: call(cy, a), args.repeat)
            print(f"{name:<16} {size:>9} {t_py:>11.4g} {t_cy:>11.4g} {t_py / t_cy:>8.1f}x  "
                  f"{same(call(py, a), call(cy, a))}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
