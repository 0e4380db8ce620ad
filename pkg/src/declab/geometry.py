"""Intervals, squares, and their regular partitions.

Intervals carry exact rational endpoints so that partition and divisibility
side-conditions are checked exactly, never through float rounding.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

from .errors import DivisibilityError, DomainError

RationalLike = Union[int, Fraction, str]


def as_fraction(x) -> Fraction:
    """Exact conversion; floats are accepted only if exactly dyadic."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        f = Fraction(x)
        return f
    raise TypeError(f"cannot convert {x!r} to an exact rational")


@dataclass(frozen=True)
class DyadicInterval:
    """Subinterval of [0,1] with exact rational endpoints.

    `left` and `length` are Fractions; length > 0 and left + length <= 1.
    Partitioning always produces lengths whose reciprocal is an integer.
    """
    left: Fraction
    length: Fraction

    def __post_init__(self):
        object.__setattr__(self, "left", as_fraction(self.left))
        object.__setattr__(self, "length", as_fraction(self.length))
        if not (0 <= self.left and self.length > 0 and self.left + self.length <= 1):
            raise DomainError(
                f"interval [{self.left}, {self.left + self.length}] not inside [0, 1]")

    @property
    def right(self) -> Fraction:
        return self.left + self.length

    @property
    def center(self) -> Fraction:
        return self.left + self.length / 2

    def contains(self, other: "DyadicInterval") -> bool:
        return self.left <= other.left and other.right <= self.right

    def __str__(self):
        return f"[{self.left},{self.right}]"


UNIT = DyadicInterval(Fraction(0), Fraction(1))


@dataclass(frozen=True)
class Square:
    """Axis-parallel square B(center, side) in R^2."""
    center: Tuple[float, float]
    side: float

    def __post_init__(self):
        if not self.side > 0:
            raise DomainError(f"square side must be positive, got {self.side}")

    @property
    def half(self) -> float:
        return self.side / 2.0

    def scaled(self, k: float) -> "Square":
        return Square(self.center, self.side * k)

    def __str__(self):
        return f"B(({self.center[0]:g},{self.center[1]:g}),{self.side:g})"


def partition_interval(interval: DyadicInterval, ell) -> list[DyadicInterval]:
    """Partition `interval` into contiguous pieces of exact length `ell`.

    Requires |interval| / ell to be a positive integer; pieces are returned
    in increasing order.
    """
    ell = as_fraction(ell)
    if ell <= 0:
        raise DomainError(f"partition length must be positive, got {ell}")
    ratio = interval.length / ell
    if ratio.denominator != 1 or ratio.numerator < 1:
        raise DivisibilityError(
            f"|{interval}| / {ell} = {ratio} is not a positive integer")
    n = ratio.numerator
    return [DyadicInterval(interval.left + k * ell, ell) for k in range(n)]


def partition_square(square: Square, ell: float) -> list[Square]:
    """Partition `square` into (side/ell)^2 axis-parallel sub-squares.

    Ordered row-major: y increasing, then x increasing.  side/ell must be
    a positive integer up to float roundoff.
    """
    if not ell > 0:
        raise DomainError(f"partition side must be positive, got {ell}")
    ratio = square.side / ell
    n = round(ratio)
    if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
        raise DivisibilityError(
            f"side {square.side} / {ell} = {ratio} is not a positive integer")
    cx, cy = square.center
    x0 = cx - square.side / 2.0
    y0 = cy - square.side / 2.0
    out = []
    for j in range(n):
        for i in range(n):
            out.append(Square((x0 + (i + 0.5) * ell, y0 + (j + 0.5) * ell), ell))
    return out


def interval_gap(a: DyadicInterval, b: DyadicInterval) -> Fraction:
    """Set distance between two intervals (0 when they overlap)."""
    if a.left > b.left:
        a, b = b, a
    return max(Fraction(0), b.left - a.right)


def base_point_distance(a: DyadicInterval, b: DyadicInterval) -> Fraction:
    """|left(a) - left(b)|.

    This is the separation quantity the shift-to-origin change of variables
    in the bilinear functionals actually uses, and the one all separation
    preconditions are stated in.  For equal-length intervals it coincides
    with the distance between centers.
    """
    return abs(a.left - b.left)


def in_regular_partition(piece: DyadicInterval, cell: Fraction) -> bool:
    """True when `piece` is a cell of the regular partition of [0,1] at `cell`."""
    cell = as_fraction(cell)
    if piece.length != cell:
        return False
    idx = piece.left / cell
    return idx.denominator == 1
