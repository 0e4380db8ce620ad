"""Weights, L^p norms, and streaming weighted integrals.

Weighted integrals run over the truncated region K*B in ring order
(blocks sorted by distance from the weight center, near to far).  Once the
remaining region provably contributes less than tail_rtol relative to the
accumulated value it is skipped; with the default tail_rtol = 1e-17 the
result is the full truncated Riemann sum to float64 precision, while the
cost collapses to the region where the weight is non-negligible.
Summation order is fixed (shells ascending, row-major inside a shell,
row-major inside a block), so results are reproducible run to run.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import GridCoverageError, ParameterError
from .field import FieldGrid, build_field, grid_for_square
from .geometry import DyadicInterval, Square
from .kernels import eval_field_block
from .quadrature import DEFAULT_QUAD, QuadratureSpec, build_nodes, max_frequency
from .symbols import SymbolFunction

WEIGHT_EXP = 100  # decay exponent of the localization weight, fixed
_BLOCK = 64       # samples per block edge in streaming sums


def weight_value(square: Square, x: Tuple[float, float]) -> float:
    """w_B(x) = (1 + |x - c| / R)^(-100), R the side length."""
    dx = x[0] - square.center[0]
    dy = x[1] - square.center[1]
    r = np.hypot(dx, dy)
    return float((1.0 + r / square.side) ** (-WEIGHT_EXP))


def weight_block(square: Square, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    dx = xs[None, :] - square.center[0]
    dy = ys[:, None] - square.center[1]
    r = np.hypot(dx, dy)
    return (1.0 + r / square.side) ** (-WEIGHT_EXP)


def weight_subsamples(side: float, spacing: float) -> int:
    """Sub-samples per cell edge needed to resolve the weight.

    The weight concentrates its mass within ~R/50 of the center, far below
    the field sample spacing for small squares; weighted sums therefore
    integrate the weight per cell on a midpoint sub-grid while the field is
    sampled once per cell (it varies on unit scale, not on R/50)."""
    return int(min(64, max(1, math.ceil(200.0 * spacing / side))))


def weight_cell_avg(square: Square, xs: np.ndarray, ys: np.ndarray,
                    spacing: float) -> np.ndarray:
    """Cell averages of w_B over spacing-sized cells centered at (xs, ys)."""
    sub = weight_subsamples(square.side, spacing)
    if sub == 1:
        return weight_block(square, xs, ys)
    off = ((np.arange(sub) + 0.5) / sub - 0.5) * spacing
    dx = (xs[None, :, None] + off[None, None, :]) - square.center[0]
    dy = (ys[:, None, None] + off[None, None, :]) - square.center[1]
    r = np.hypot(dx[:, :, :, None], dy[:, :, None, :])
    w = (1.0 + r / square.side) ** (-WEIGHT_EXP)
    return w.mean(axis=(2, 3))


class NormResult(float):
    """A float norm value carrying the recorded truncation-tail bound."""
    tail_bound: float = 0.0

    def __new__(cls, value: float, tail_bound: float = 0.0):
        obj = super().__new__(cls, value)
        obj.tail_bound = tail_bound
        return obj


def norm_lp(f: FieldGrid, domain: Square, p: float, *, weighted: bool = False,
            normalized: bool = False, quad: QuadratureSpec = DEFAULT_QUAD) -> NormResult:
    """Riemann-sum L^p norm of a sampled field.

    Unweighted: integrate |f|^p over `domain`.  Weighted: integrate
    |f|^p * w_domain over K*domain (K from `quad`); the discarded tail of
    the weight beyond K*domain is below K**-98 of its mass and is recorded
    in the result's tail_bound.  `normalized` divides the integral by
    |domain| before the 1/p power.
    """
    if p < 1:
        raise ParameterError(f"p must be >= 1, got {p}")
    region = domain.scaled(quad.weight_k) if weighted else domain
    if not f.covers(region):
        raise GridCoverageError(
            f"field grid does not cover {region} (weighted={weighted})")
    xs = f.x_coords()
    ys = f.y_coords()
    half = region.half + f.spacing * 1e-9
    ix = np.flatnonzero(np.abs(xs - region.center[0]) <= half)
    iy = np.flatnonzero(np.abs(ys - region.center[1]) <= half)
    sub = f.samples[np.ix_(iy, ix)]
    vals = np.abs(sub) ** p
    if weighted:
        vals = vals * weight_cell_avg(domain, xs[ix], ys[iy], f.spacing)
    total = float(np.sum(vals)) * f.spacing ** 2
    if normalized:
        total /= domain.side ** 2
    tail = quad.weight_k ** (-(WEIGHT_EXP - 2)) if weighted else 0.0
    return NormResult(total ** (1.0 / p), tail_bound=tail)


# ---------------------------------------------------------------------------
# streaming weighted sums over K*B with ring-ordered early exit
# ---------------------------------------------------------------------------

@dataclass
class _FieldSpec:
    g: SymbolFunction
    interval: DyadicInterval


def _block_shells(center: Tuple[float, float], origin: Tuple[float, float],
                  h: float, nx: int, ny: int):
    """Blocks of the grid grouped by Chebyshev distance ring from center.

    Returns (shells, block_area) where shells is a list, shells[k] a list of
    (j0, j1, i0, i1); blocks in shell k have min Chebyshev distance to the
    center in [k, k+1) block-widths.
    """
    bw = _BLOCK * h
    shells: dict[int, list] = {}
    for j0 in range(0, ny, _BLOCK):
        j1 = min(j0 + _BLOCK, ny)
        for i0 in range(0, nx, _BLOCK):
            i1 = min(i0 + _BLOCK, nx)
            x_lo = origin[0] + h * i0
            x_hi = origin[0] + h * (i1 - 1)
            y_lo = origin[1] + h * j0
            y_hi = origin[1] + h * (j1 - 1)
            dx = max(x_lo - center[0], center[0] - x_hi, 0.0)
            dy = max(y_lo - center[1], center[1] - y_hi, 0.0)
            d = max(dx, dy)
            shells.setdefault(int(d / bw), []).append((j0, j1, i0, i1))
    return [shells[k] for k in sorted(shells)], bw


def ring_weighted_sums(field_specs: Sequence[Tuple[SymbolFunction, DyadicInterval]],
                       base: Square,
                       combine: Callable[[List[np.ndarray], np.ndarray], np.ndarray],
                       n_out: int,
                       sup_bound: float,
                       quad: QuadratureSpec = DEFAULT_QUAD,
                       spacing: Optional[float] = None) -> np.ndarray:
    """Accumulate sum_x combine(fields(x), w_B(x)) * h^2 over the K*B grid.

    combine maps (list of complex sample blocks, weight block) to a vector
    of n_out per-block partial sums; sup_bound must dominate every
    component of the integrand divided by w_B(x), so the remaining-region
    contribution can be bounded and skipped once irrelevant.
    """
    h = quad.spacing if spacing is None else spacing
    region = base.scaled(quad.weight_k)
    (x0, y0), nx, ny = grid_for_square(region, h)
    shells, bw = _block_shells(base.center, (x0, y0), h, nx, ny)
    acc = np.zeros(n_out, np.complex128)
    h2 = h * h
    n_remaining = sum(len(s) for s in shells)
    r_side = base.side
    w_full = None
    if nx * ny <= 4_200_000:  # precompute the weight once when affordable
        w_full = weight_cell_avg(base, x0 + h * np.arange(nx),
                                 y0 + h * np.arange(ny), h)
    for k, shell in enumerate(shells):
        # remaining blocks (this shell on out) sit at distance >= k*bw
        if k > 0 and sup_bound > 0:
            w_bound = (1.0 + (k * bw) / r_side) ** (-WEIGHT_EXP)
            area_rem = n_remaining * bw * bw
            bound = w_bound * area_rem * sup_bound
            ref = float(np.max(np.abs(acc)))
            if ref > 0 and bound <= quad.tail_rtol * ref:
                break
        for (j0, j1, i0, i1) in sorted(shell):
            bx0 = x0 + h * i0
            by0 = y0 + h * j0
            x_mag = max(abs(bx0), abs(x0 + h * (i1 - 1)))
            y_mag = max(abs(by0), abs(y0 + h * (j1 - 1)))
            freq = max_frequency(x_mag, y_mag)
            blocks = []
            for g, interval in field_specs:
                xi, amp = build_nodes(g, interval, freq, quad)
                blocks.append(eval_field_block(xi, amp, bx0, h, i1 - i0,
                                               by0, h, j1 - j0))
            if w_full is not None:
                w = w_full[j0:j1, i0:i1]
            else:
                xs = bx0 + h * np.arange(i1 - i0)
                ys = by0 + h * np.arange(j1 - j0)
                w = weight_cell_avg(base, xs, ys, h)
            acc += combine(blocks, w) * h2
        n_remaining -= len(shell)
    return acc


def box_sums(field_specs: Sequence[Tuple[SymbolFunction, DyadicInterval]],
             box: Square,
             combine: Callable[[List[np.ndarray], np.ndarray], np.ndarray],
             n_out: int,
             quad: QuadratureSpec = DEFAULT_QUAD,
             spacing: Optional[float] = None) -> np.ndarray:
    """Unweighted analogue of ring_weighted_sums over the box itself.

    combine receives a weight block of ones; every block is visited."""
    h = quad.spacing if spacing is None else spacing
    (x0, y0), nx, ny = grid_for_square(box, h)
    acc = np.zeros(n_out, np.complex128)
    h2 = h * h
    for j0 in range(0, ny, _BLOCK):
        j1 = min(j0 + _BLOCK, ny)
        for i0 in range(0, nx, _BLOCK):
            i1 = min(i0 + _BLOCK, nx)
            bx0 = x0 + h * i0
            by0 = y0 + h * j0
            x_mag = max(abs(bx0), abs(x0 + h * (i1 - 1)))
            y_mag = max(abs(by0), abs(y0 + h * (j1 - 1)))
            freq = max_frequency(x_mag, y_mag)
            blocks = []
            for g, interval in field_specs:
                xi, amp = build_nodes(g, interval, freq, quad)
                blocks.append(eval_field_block(xi, amp, bx0, h, i1 - i0,
                                               by0, h, j1 - j0))
            ones = np.ones((j1 - j0, i1 - i0))
            acc += combine(blocks, ones) * h2
    return acc


# ---------------------------------------------------------------------------
# convenience wrappers used throughout the functionals
# ---------------------------------------------------------------------------

def weighted_norm_pow(g: SymbolFunction, interval: DyadicInterval, base: Square,
                      p: float, quad: QuadratureSpec = DEFAULT_QUAD,
                      normalized: bool = False) -> float:
    """integral of |E_J g|^p * w_B over K*B (optionally / |B|)."""
    sup = g.mass_bound(interval) ** p

    def combine(blocks, w):
        return np.array([np.sum(np.abs(blocks[0]) ** p * w)], np.complex128)

    val = float(ring_weighted_sums([(g, interval)], base, combine, 1, sup,
                                   quad).real[0])
    if normalized:
        val /= base.side ** 2
    return val


def weighted_norm(g, interval, base, p, quad=DEFAULT_QUAD, normalized=False) -> float:
    return weighted_norm_pow(g, interval, base, p, quad, normalized) ** (1.0 / p)


def box_norm_pow(g: SymbolFunction, interval: DyadicInterval, box: Square,
                 p: float, quad: QuadratureSpec = DEFAULT_QUAD,
                 normalized: bool = False) -> float:
    """integral of |E_J g|^p over the box (optionally / |box|)."""
    def combine(blocks, w):
        return np.array([np.sum(np.abs(blocks[0]) ** p * w)], np.complex128)

    val = float(box_sums([(g, interval)], box, combine, 1, quad).real[0])
    if normalized:
        val /= box.side ** 2
    return val


def box_bilinear(g: SymbolFunction, i1: DyadicInterval, i2: DyadicInterval,
                 box: Square, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """integral over the box of |E_I1 g|^2 |E_I2 g|^4."""
    def combine(blocks, w):
        e1, e2 = blocks
        a2 = np.abs(e2) ** 2
        return np.array([np.sum((np.abs(e1) ** 2) * a2 * a2 * w)], np.complex128)

    return float(box_sums([(g, i1), (g, i2)], box, combine, 1, quad).real[0])


def weighted_bilinear(g: SymbolFunction, i1: DyadicInterval, i2: DyadicInterval,
                      base: Square, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """integral of |E_I1 g|^2 |E_I2 g|^4 * w_B over K*B."""
    sup = g.mass_bound(i1) ** 2 * g.mass_bound(i2) ** 4

    def combine(blocks, w):
        e1, e2 = blocks
        a2 = np.abs(e2) ** 2
        return np.array([np.sum((np.abs(e1) ** 2) * a2 * a2 * w)], np.complex128)

    return float(ring_weighted_sums([(g, i1), (g, i2)], base, combine, 1, sup,
                                    quad).real[0])


def pairing_matrix(g: SymbolFunction, sub_intervals: Sequence[DyadicInterval],
                   i2: DyadicInterval, base: Square,
                   quad: QuadratureSpec = DEFAULT_QUAD,
                   spacing: Optional[float] = None) -> np.ndarray:
    """P[a,b] = integral of E_Ja g * conj(E_Jb g) * |E_I2 g|^4 * w_B.

    All pairs in one sweep so the field evaluations are shared."""
    n = len(sub_intervals)
    masses = [g.mass_bound(j) for j in sub_intervals]
    sup = (max(masses, default=0.0) ** 2) * g.mass_bound(i2) ** 4

    def combine(blocks, w):
        e2 = blocks[-1]
        a2 = np.abs(e2) ** 2
        wt = (a2 * a2 * w).ravel()
        flat = np.stack([b.ravel() for b in blocks[:-1]])
        p = (flat * wt) @ np.conj(flat.T)
        return p.ravel()

    specs = [(g, j) for j in sub_intervals] + [(g, i2)]
    out = ring_weighted_sums(specs, base, combine, n * n, sup, quad,
                             spacing=spacing)
    return out.reshape(n, n)


def sup_norm(g: SymbolFunction, interval: DyadicInterval, box: Square,
             quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """max |E_I g| over the sample grid of the box."""
    f = build_field(g, interval, box, quad)
    return float(np.max(np.abs(f.samples)))
