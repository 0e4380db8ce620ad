"""Hot numeric kernels: numba @njit versions with pure-numpy twins.

Two kernel families live here:

  * eval_field_block -- evaluate sum_q amp_q * e(xi_q*x1 + xi_q^2*x2) on a
    uniform (ny, nx) grid.  This is the inner loop of every norm, ratio and
    field build in the lab; phases advance by complex recurrences along x1.

  * tally kernels -- exact integer meet-in-the-middle accumulation for the
    solution-count operations, grouped by linear sum so memory stays O(X^2).

Backend selection is in _accel; see benchmarks/bench_kernels.py for a
side-by-side timing of the two paths.
"""
from __future__ import annotations

import numpy as np

from ._accel import USE_NUMBA

if USE_NUMBA:
    import numba
    from numba import njit
else:  # pragma: no cover - exercised via LAB_NO_NUMBA runs
    def njit(*args, **kwargs):
        def deco(f):
            return f
        if args and callable(args[0]):
            return args[0]
        return deco


# ---------------------------------------------------------------------------
# oscillatory field evaluation
# ---------------------------------------------------------------------------

@njit(cache=True)
def _eval_field_block_nb(xi, amp_re, amp_im, x0, hx, nx, y0, hy, ny,
                         out_re, out_im):
    two_pi = 2.0 * np.pi
    nq = xi.shape[0]
    st_re = np.empty(nq)
    st_im = np.empty(nq)
    cur_re = np.empty(nq)
    cur_im = np.empty(nq)
    for q in range(nq):
        ang = two_pi * xi[q] * hx
        st_re[q] = np.cos(ang)
        st_im[q] = np.sin(ang)
    for j in range(ny):
        y = y0 + hy * j
        for q in range(nq):
            ph = two_pi * (xi[q] * x0 + xi[q] * xi[q] * y)
            c = np.cos(ph)
            s = np.sin(ph)
            cur_re[q] = amp_re[q] * c - amp_im[q] * s
            cur_im[q] = amp_re[q] * s + amp_im[q] * c
        for i in range(nx):
            sr = 0.0
            si = 0.0
            for q in range(nq):
                sr += cur_re[q]
                si += cur_im[q]
                tr = cur_re[q] * st_re[q] - cur_im[q] * st_im[q]
                cur_im[q] = cur_re[q] * st_im[q] + cur_im[q] * st_re[q]
                cur_re[q] = tr
            out_re[j, i] = sr
            out_im[j, i] = si


def _eval_field_block_np(xi, amp, x0, hx, nx, y0, hy, ny):
    if xi.size == 0:
        return np.zeros((ny, nx), np.complex128)
    step = np.exp(2j * np.pi * xi * hx)
    u = np.empty((xi.size, nx), np.complex128)
    u[:, 0] = np.exp(2j * np.pi * xi * x0)
    if nx > 1:
        np.multiply.accumulate(
            np.broadcast_to(step[:, None], (xi.size, nx - 1)), axis=1, out=u[:, 1:])
        u[:, 1:] *= u[:, :1]
    yg = y0 + hy * np.arange(ny)
    v = np.exp(2j * np.pi * np.outer(yg, xi * xi)) * amp
    return v @ u


def eval_field_block(xi: np.ndarray, amp: np.ndarray,
                     x0: float, hx: float, nx: int,
                     y0: float, hy: float, ny: int) -> np.ndarray:
    """Evaluate the wave sum on the grid {x0+i*hx} x {y0+j*hy} -> (ny, nx)."""
    if USE_NUMBA:
        if xi.size == 0:
            return np.zeros((ny, nx), np.complex128)
        out_re = np.empty((ny, nx))
        out_im = np.empty((ny, nx))
        _eval_field_block_nb(xi, np.ascontiguousarray(amp.real),
                             np.ascontiguousarray(amp.imag),
                             x0, hx, nx, y0, hy, ny, out_re, out_im)
        return out_re + 1j * out_im
    return _eval_field_block_np(xi, amp, x0, hx, nx, y0, hy, ny)


@njit(cache=True)
def _eval_points_nb(xi, amp_re, amp_im, px, py, out_re, out_im):
    two_pi = 2.0 * np.pi
    for m in range(px.shape[0]):
        sr = 0.0
        si = 0.0
        for q in range(xi.shape[0]):
            ph = two_pi * (xi[q] * px[m] + xi[q] * xi[q] * py[m])
            c = np.cos(ph)
            s = np.sin(ph)
            sr += amp_re[q] * c - amp_im[q] * s
            si += amp_re[q] * s + amp_im[q] * c
        out_re[m] = sr
        out_im[m] = si


def eval_points(xi: np.ndarray, amp: np.ndarray,
                px: np.ndarray, py: np.ndarray) -> np.ndarray:
    """Evaluate the wave sum at scattered points (px, py)."""
    px = np.asarray(px, float)
    py = np.asarray(py, float)
    if xi.size == 0:
        return np.zeros(px.shape, np.complex128)
    if USE_NUMBA:
        out_re = np.empty(px.size)
        out_im = np.empty(px.size)
        _eval_points_nb(xi, np.ascontiguousarray(amp.real),
                        np.ascontiguousarray(amp.imag),
                        px.ravel(), py.ravel(), out_re, out_im)
        return (out_re + 1j * out_im).reshape(px.shape)
    ph = np.exp(2j * np.pi * (np.multiply.outer(px, xi)
                              + np.multiply.outer(py, xi * xi)))
    return ph @ amp


# ---------------------------------------------------------------------------
# exact counting
# ---------------------------------------------------------------------------

@njit(cache=True)
def _count_j_nb(x_max):
    total = 0
    q_buf = np.zeros(3 * x_max * x_max + 1, np.int64)
    touched = np.empty(x_max * x_max, np.int64)
    for lin in range(3, 3 * x_max + 1):
        n_t = 0
        lo1 = max(1, lin - 2 * x_max)
        hi1 = min(x_max, lin - 2)
        for x1 in range(lo1, hi1 + 1):
            rem = lin - x1
            lo2 = max(1, rem - x_max)
            hi2 = min(x_max, rem - 1)
            q1 = x1 * x1
            for x2 in range(lo2, hi2 + 1):
                x3 = rem - x2
                q = q1 + x2 * x2 + x3 * x3
                if q_buf[q] == 0:
                    touched[n_t] = q
                    n_t += 1
                q_buf[q] += 1
        for t in range(n_t):
            c = q_buf[touched[t]]
            total += c * c
            q_buf[touched[t]] = 0
    return total


def _count_j_np(x_max):
    total = 0
    xs = np.arange(1, x_max + 1, dtype=np.int64)
    for lin in range(3, 3 * x_max + 1):
        x1 = xs[(xs >= lin - 2 * x_max) & (xs <= lin - 2)]
        if x1.size == 0:
            continue
        rem = lin - x1
        x2 = xs[None, :]
        x3 = rem[:, None] - x2
        valid = (x3 >= 1) & (x3 <= x_max)
        q = (x1 * x1)[:, None] + x2 * x2 + x3 * x3
        counts = np.bincount(q[valid])
        total += int(np.sum(counts.astype(np.int64) ** 2))
    return total


def count_j_kernel(x_max: int) -> int:
    """Number of solutions of the two-equation system in [1, X]^6."""
    if USE_NUMBA:
        return int(_count_j_nb(x_max))
    return _count_j_np(x_max)


@njit(cache=True)
def _brute_j_nb(x_max):
    total = 0
    for x1 in range(1, x_max + 1):
        for x2 in range(1, x_max + 1):
            for x3 in range(1, x_max + 1):
                s1 = x1 + x2 + x3
                q1 = x1 * x1 + x2 * x2 + x3 * x3
                for y1 in range(1, x_max + 1):
                    for y2 in range(1, x_max + 1):
                        y3 = s1 - y1 - y2
                        if y3 < 1 or y3 > x_max:
                            continue
                        if y1 * y1 + y2 * y2 + y3 * y3 == q1:
                            total += 1
    return total


def _brute_j_np(x_max):
    total = 0
    xs = np.arange(1, x_max + 1, dtype=np.int64)
    for x1 in range(1, x_max + 1):
        for x2 in range(1, x_max + 1):
            for x3 in range(1, x_max + 1):
                s1 = x1 + x2 + x3
                q1 = x1 * x1 + x2 * x2 + x3 * x3
                y3 = s1 - xs[:, None] - xs[None, :]
                ok = (y3 >= 1) & (y3 <= x_max)
                qq = xs[:, None] ** 2 + xs[None, :] ** 2 + y3 * y3
                total += int(np.count_nonzero(ok & (qq == q1)))
    return total


def brute_force_j_kernel(x_max: int) -> int:
    """Direct six-fold loop; the independent oracle for count_j_kernel."""
    if USE_NUMBA:
        return int(_brute_j_nb(x_max))
    return _brute_j_np(x_max)


def paired_key_count(xs: np.ndarray, ys: np.ndarray) -> int:
    """sum over keys of T^2 where T tallies triples (x, y, y') by
    (x+y+y', x^2+y^2+y'^2); xs, ys are the admissible value sets."""
    if xs.size == 0 or ys.size == 0:
        return 0
    x = xs.astype(np.int64)
    y = ys.astype(np.int64)
    lin = x[:, None, None] + y[None, :, None] + y[None, None, :]
    quad = (x * x)[:, None, None] + (y * y)[None, :, None] + (y * y)[None, None, :]
    m = int(quad.max()) + 1
    keys = (lin.astype(np.int64) * m + quad).ravel()
    keys.sort()
    boundaries = np.flatnonzero(np.diff(keys)) + 1
    runs = np.diff(np.concatenate(([0], boundaries, [keys.size])))
    # int64 is exact: sum of squares <= (total triples)^2 and the caller
    # caps total triples near 2e8, far under 2^63
    return int(np.sum(runs * runs))


def weighted_paired_tally(values: np.ndarray) -> float:
    """||sum_n a_n e(n x + n^2 t)||_{L^6}^6 exactly, by tallying complex
    triple products over (sum, sum of squares) keys; values is the
    coefficient array for n = -N..N."""
    n_coef = values.size
    half = (n_coef - 1) // 2
    ns = np.arange(-half, half + 1, dtype=np.int64)
    w = values.astype(np.complex128)
    lin = ns[:, None, None] + ns[None, :, None] + ns[None, None, :]
    quad = (ns * ns)[:, None, None] + (ns * ns)[None, :, None] + (ns * ns)[None, None, :]
    prod = (w[:, None, None] * w[None, :, None] * w[None, None, :]).ravel()
    m = int(quad.max()) + 1
    keys = ((lin + 3 * half).astype(np.int64) * m + quad).ravel()
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    prod = prod[order]
    starts = np.concatenate(([0], np.flatnonzero(np.diff(keys)) + 1))
    seg = np.add.reduceat(prod, starts)
    return float(np.sum(seg.real * seg.real + seg.imag * seg.imag))
