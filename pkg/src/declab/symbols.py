"""Symbol functions g: [0,1] -> C, piecewise constant on a regular grid.

All decoupling functionals interrogate g only through extension operators
of grid-aligned intervals, so a piecewise-constant representation on the
finest relevant grid is closed under every operation the lab performs
(partition refinement, restriction, affine rescaling).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

import numpy as np

from .errors import DomainError
from .geometry import DyadicInterval


@dataclass(frozen=True)
class SymbolFunction:
    """g: [0,1] -> C, constant on n equal cells [k/n, (k+1)/n).

    kind is one of 'constant-one', 'single-bump', 'unimodular-random',
    'explicit'; it is provenance only, values are authoritative.
    """
    values: np.ndarray          # complex128, shape (n,)
    kind: str = "explicit"
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.ndim != 1 or v.size < 1:
            raise DomainError("symbol values must be a nonempty 1-d array")
        if not np.all(np.isfinite(v.view(np.float64))):
            raise DomainError("symbol values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def n_cells(self) -> int:
        return int(self.values.size)

    @property
    def cell(self) -> Fraction:
        return Fraction(1, self.n_cells)

    def sup_on(self, interval: DyadicInterval) -> float:
        """sup |g| over the interval (piecewise-constant, so a cell max)."""
        lo, hi = _cell_range(self, interval)
        if hi <= lo:
            return 0.0
        return float(np.max(np.abs(self.values[lo:hi])))

    def mass_bound(self, interval: DyadicInterval) -> float:
        """integral of |g| over the interval; bounds |E_I g| pointwise."""
        lo, hi = _cell_range(self, interval)
        if hi <= lo:
            return 0.0
        return float(np.sum(np.abs(self.values[lo:hi])) / self.n_cells)

    def scale(self, c: complex) -> "SymbolFunction":
        return SymbolFunction(self.values * c, "explicit", f"{self.label}*c")


def constant_one() -> SymbolFunction:
    return SymbolFunction(np.ones(1, np.complex128), "constant-one", "one")


def single_bump(interval: DyadicInterval) -> SymbolFunction:
    """Indicator of a grid interval (1 on it, 0 elsewhere)."""
    n = int(round(1 / float(interval.length)))
    if Fraction(1, n) != interval.length:
        raise DomainError(f"bump interval length {interval.length} must be 1/n")
    vals = np.zeros(n, np.complex128)
    lo = interval.left / interval.length
    if lo.denominator != 1:
        raise DomainError("bump interval must be grid aligned")
    vals[int(lo)] = 1.0
    return SymbolFunction(vals, "single-bump", f"bump{interval}")


def unimodular_random(seed: int, n_cells: int) -> SymbolFunction:
    """Unit-modulus coefficients with phases drawn from a seeded PCG64."""
    rng = np.random.default_rng(seed)
    phases = rng.random(n_cells)
    vals = np.exp(2j * np.pi * phases)
    return SymbolFunction(vals, "unimodular-random", f"uni(seed={seed},n={n_cells})")


def explicit(values) -> SymbolFunction:
    return SymbolFunction(np.asarray(values, np.complex128), "explicit")


def refine(g: SymbolFunction, n_cells: int) -> SymbolFunction:
    """Re-express g on a finer grid (n_cells must be a multiple of g's)."""
    if n_cells % g.n_cells != 0:
        raise DomainError(f"{n_cells} is not a multiple of {g.n_cells}")
    rep = n_cells // g.n_cells
    return SymbolFunction(np.repeat(g.values, rep), g.kind, g.label)


@dataclass(frozen=True)
class AffineMap:
    """x -> (s*(x1 + 2a*x2), s^2*x2), the change of variables that maps
    the wave of a length-s arc to the wave of the full parabola."""
    alpha: float
    sigma: float

    def __call__(self, x: Tuple[float, float]) -> Tuple[float, float]:
        x1, x2 = x
        return (self.sigma * (x1 + 2.0 * self.alpha * x2), self.sigma ** 2 * x2)


def rescale_symbol(g: SymbolFunction, interval: DyadicInterval):
    """Return (g_tilde, A) with |E_I g(x)| = sigma * |E_[0,1] g_tilde(A x)|.

    g_tilde(u) = g(alpha + sigma*u) for I = [alpha, alpha+sigma]; exact when
    I is aligned with g's grid, which partition-produced intervals are.
    """
    if not (0 <= interval.left and interval.right <= 1):
        raise DomainError(f"{interval} is not contained in [0, 1]")
    sigma = interval.length
    alpha = interval.left
    # cells of g covered by I; require alignment for an exact restriction
    start = alpha / g.cell
    count = sigma / g.cell
    if start.denominator != 1 or count.denominator != 1 or count.numerator < 1:
        raise DomainError(
            f"{interval} is not aligned with the {g.n_cells}-cell grid of g")
    lo = int(start)
    m = int(count)
    vals = g.values[lo:lo + m].copy()
    gt = SymbolFunction(vals, "explicit", f"{g.label}|{interval}")
    return gt, AffineMap(float(alpha), float(sigma))


def _cell_range(g: SymbolFunction, interval: DyadicInterval) -> Tuple[int, int]:
    n = g.n_cells
    lo = int(np.floor(float(interval.left) * n))
    hi = int(np.ceil(float(interval.right) * n))
    return max(lo, 0), min(hi, n)
