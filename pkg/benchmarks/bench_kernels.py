#!/usr/bin/env python3
"""Benchmark the jitted kernels against the pure-numpy fallback lane.

Runs each hot kernel through both implementations on realistic workloads
and prints a timing table.  The numpy lane is what you get with
LLTWALK_PURE_NUMPY=1; here both lanes are called directly so a single
process can time the pair.

Usage: python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from lltwalk import _kernels as K
from lltwalk.spectral import lambda_axis


def timeit(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_dp_2d(n, width):
    offs = np.array(
        [[0, 0], [1, 0], [-1, 0], [0, 1], [0, -1], [2, 0], [-2, 0], [0, 2], [0, -2]],
        dtype=np.int64,
    )
    ws = np.array([0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1])
    cur = np.zeros((width, width))
    cur[width // 2, width // 2] = 1.0
    out = np.empty_like(cur)

    def run(step):
        c, o = cur.copy(), out.copy()
        for _ in range(n):
            step(c, o, offs, ws)
            c, o = o, c
        return c

    K._dp_step_2d_numba(cur.copy(), out.copy(), offs, ws)  # compile outside the clock
    t_nb, r_nb = timeit(run, K._dp_step_2d_numba, repeat=2)
    t_np, r_np = timeit(run, K._dp_step_2d_numpy, repeat=2)
    assert np.abs(r_nb - r_np).max() < 1e-13
    return ("forward DP 2d (%d steps, %d^2 box)" % (n, width), t_np, t_nb)


def bench_origin_returns(n, m):
    z = np.ascontiguousarray(
        (0.5 + 0.5 * np.cos(lambda_axis(m))).astype(np.complex128)
    )
    big = np.tile(z, max(1, 4_000_000 // m))[: 2_000_000]
    K._origin_returns_numba(big[:4096], 8)
    t_nb, r_nb = timeit(K._origin_returns_numba, big, n, repeat=2)
    t_np, r_np = timeit(K._origin_returns_numpy, big, n, repeat=2)
    assert np.abs(r_nb - r_np).max() < 1e-12
    return ("origin returns (n=%d, %.1fM cells)" % (n, big.size / 1e6), t_np, t_nb)


def bench_power_sum(n, m):
    z = np.ascontiguousarray(
        (0.5 + 0.5 * np.cos(lambda_axis(m))).astype(np.complex128)
    )
    big = np.tile(z, max(1, 4_000_000 // m))[: 2_000_000]
    r = (1.0 / np.sqrt(np.arange(1, n + 1))).astype(np.complex128)
    K._weighted_power_sum_numba(big[:4096], r[:8])
    t_nb, r_nb = timeit(K._weighted_power_sum_numba, big, r, repeat=2)
    t_np, r_np = timeit(K._weighted_power_sum_numpy, big, r, repeat=2)
    assert np.abs(r_nb - r_np).max() < 1e-10
    return ("weighted power sum (n=%d, %.1fM cells)" % (n, big.size / 1e6), t_np, t_nb)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="smaller workloads")
    args = ap.parse_args()

    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not importable; nothing to compare against")

    rows = []
    if args.quick:
        rows.append(bench_dp_2d(32, 257))
        rows.append(bench_origin_returns(64, 6561))
        rows.append(bench_power_sum(64, 6561))
    else:
        rows.append(bench_dp_2d(128, 513))
        rows.append(bench_origin_returns(384, 6561))
        rows.append(bench_power_sum(384, 6561))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'numpy':>9}  {'numba':>9}  {'speedup':>8}")
    for name, t_np, t_nb in rows:
        print(f"{name:<{width}}  {t_np:9.3f}s {t_nb:9.3f}s  {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
