"""Time the numba kernels against their numpy / interpreted fallbacks.

    python benchmarks/bench_kernels.py --p 101 211 401 --repeat 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from markoff import kernels
from markoff._accel import USE_NUMBA
from markoff.ff import sqrt_table


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def level_edges(p, k):
    codes = kernels.level_codes(p, k)
    n = codes.shape[0]
    idx = np.arange(n, dtype=np.int64)
    vs = [np.searchsorted(codes, img) for img in kernels.move_codes(codes, p)]
    return n, np.concatenate([idx] * 3), np.concatenate(vs)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, nargs="+", default=[101, 211, 401])
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    if not USE_NUMBA:
        print("numba disabled (MARKOFF_NO_NUMBA set); compiled column repeats the fallback")

    loop = kernels._level_codes_loop
    uf = kernels._components_uf
    # warm up the JIT outside the timed region
    loop(7, 3, sqrt_table(7))
    uf(3, np.array([0, 1]), np.array([1, 2]))

    print(f"{'kernel':<12} {'p':>5} {'n':>9} {'numba':>9} {'numpy':>9} {'python':>9} {'speedup':>8}")
    for p in args.p:
        sq = sqrt_table(p)
        t_nb, a = best_of(lambda: loop(p, args.k, sq), args.repeat)
        t_np, b = best_of(lambda: kernels._level_codes_numpy(p, args.k, sq), args.repeat)
        t_py, c = best_of(lambda: loop.py_func(p, args.k, sq), 1) if p <= 211 else (float("nan"), a)
        assert np.array_equal(a, b) and np.array_equal(a, c)
        print(f"{'level':<12} {p:>5} {a.size:>9} {t_nb:>9.4f} {t_np:>9.4f} {t_py:>9.4f} {t_np / t_nb:>7.1f}x")

        n, u, v = level_edges(p, args.k)
        t_nb, a = best_of(lambda: uf(n, u, v), args.repeat)
        t_np, b = best_of(lambda: kernels._components_numpy(n, u, v), args.repeat)
        t_py, c = best_of(lambda: uf.py_func(n, u, v), 1) if p <= 101 else (float("nan"), a)
        assert np.array_equal(a, b) and np.array_equal(a, c)
        print(f"{'components':<12} {p:>5} {n:>9} {t_nb:>9.4f} {t_np:>9.4f} {t_py:>9.4f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
