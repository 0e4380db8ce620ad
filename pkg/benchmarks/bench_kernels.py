#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy twins.

Both backends are imported side by side (the env flag only fixes the
package-wide default), so one process can time them head to head:

    python benchmarks/bench_kernels.py
"""
import time

import numpy as np

from declab.kernels import (_eval_field_block_nb, _eval_field_block_np,
                            _count_j_nb, _count_j_np)
from declab._accel import HAS_NUMBA


def time_call(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t)
    return best


def bench_field_block():
    rng = np.random.default_rng(0)
    rows = []
    for (nq, nx, ny) in ((256, 257, 64), (1544, 1025, 64), (3072, 2049, 64)):
        xi = np.sort(rng.random(nq))
        amp = rng.random(nq) + 1j * rng.random(nq)
        args_np = (xi, amp, -128.0, 0.25, nx, -128.0, 0.25, ny)
        t_np = time_call(lambda: _eval_field_block_np(*args_np))
        t_nb = float("nan")
        if HAS_NUMBA:
            out_re = np.empty((ny, nx))
            out_im = np.empty((ny, nx))
            args_nb = (xi, amp.real.copy(), amp.imag.copy(), -128.0, 0.25,
                       nx, -128.0, 0.25, ny, out_re, out_im)
            _eval_field_block_nb(*args_nb)  # compile
            t_nb = time_call(lambda: _eval_field_block_nb(*args_nb))
        ne = nq * nx * ny
        rows.append((f"field {nq}x{nx}x{ny}", t_nb, t_np, ne))
    return rows


def bench_count():
    rows = []
    for x in (50, 120, 250):
        t_np = time_call(lambda: _count_j_np(x), repeat=2)
        t_nb = float("nan")
        if HAS_NUMBA:
            _count_j_nb(8)  # compile
            t_nb = time_call(lambda: _count_j_nb(x), repeat=2)
        rows.append((f"count_J X={x}", t_nb, t_np, x ** 3))
    return rows


def main():
    print(f"numba available: {HAS_NUMBA}")
    print(f"{'kernel':<24}{'numba [s]':>12}{'numpy [s]':>12}"
          f"{'speedup':>9}{'rate':>16}")
    for name, t_nb, t_np, work in bench_field_block() + bench_count():
        speed = t_np / t_nb if t_nb == t_nb else float("nan")
        rate = (work / t_nb / 1e9) if t_nb == t_nb else work / t_np / 1e9
        print(f"{name:<24}{t_nb:>12.4f}{t_np:>12.4f}{speed:>9.2f}"
              f"{rate:>13.2f} G/s")


if __name__ == "__main__":
    main()
