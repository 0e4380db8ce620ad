"""Extended-range nonnegative magnitudes.

The explicit-constant pipeline manipulates numbers like 200^200 ~ 1e460 and
logs of bounds like 10^(10^6); a float64 mantissa cannot even round-trip
exp(ln(x)) to 1e-12 once exponents reach 1e6.  ExtScalar therefore wraps a
40-digit mpmath value and exposes the canonical (mantissa in [1,10),
integer exponent) view for reporting.  The exponent must fit a signed
64-bit integer; crossing 10^(2^63 - 1) raises RangeError.
"""
from __future__ import annotations

from typing import Tuple, Union

import mpmath
from mpmath import mp, mpf

from .errors import RangeError

DPS = 40
_EXP_LIMIT = 2 ** 63 - 1

Number = Union[int, float, "ExtScalar"]


def _to_mpf(x) -> mpmath.mpf:
    if isinstance(x, ExtScalar):
        return x._v
    return mpf(x)


class ExtScalar:
    """Nonnegative magnitude mantissa * 10^exponent with exponent in int64."""

    __slots__ = ("_v",)

    def __init__(self, value: Number = 0):
        with mpmath.workdps(DPS):
            v = _to_mpf(value)
            if v < 0:
                raise RangeError("ExtScalar represents nonnegative magnitudes")
            if not mpmath.isfinite(v):
                raise RangeError("ExtScalar must be finite")
            self._v = v
            self._check_range()

    def _check_range(self):
        if self._v == 0:
            return
        e = mpmath.floor(mpmath.log10(self._v))
        if abs(int(e)) > _EXP_LIMIT:
            raise RangeError(f"exponent {int(e)} outside signed 64-bit range")

    @classmethod
    def from_parts(cls, mantissa: float, exponent: int) -> "ExtScalar":
        if mantissa == 0:
            return cls(0)
        if not 1 <= mantissa < 10:
            raise RangeError(f"mantissa {mantissa} outside [1, 10)")
        if abs(exponent) > _EXP_LIMIT:
            raise RangeError("exponent outside signed 64-bit range")
        with mpmath.workdps(DPS):
            return cls(mpf(mantissa) * mpmath.power(10, exponent))

    @classmethod
    def from_log10(cls, log10_value) -> "ExtScalar":
        with mpmath.workdps(DPS):
            out = cls.__new__(cls)
            out._v = mpmath.power(10, _to_mpf(log10_value))
            out._check_range()
            return out

    # -- canonical view ------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self._v == 0

    def parts(self) -> Tuple[float, int]:
        if self._v == 0:
            return 0.0, 0
        with mpmath.workdps(DPS):
            e = int(mpmath.floor(mpmath.log10(self._v)))
            m = self._v / mpmath.power(10, e)
            # guard the floor against log10 landing a hair under an integer
            if m >= 10:
                m /= 10
                e += 1
            if m < 1:
                m *= 10
                e -= 1
            return float(m), e

    @property
    def mantissa(self) -> float:
        return self.parts()[0]

    @property
    def exponent(self) -> int:
        return self.parts()[1]

    def to_float(self) -> float:
        return float(self._v)

    def __float__(self):
        return self.to_float()

    def __repr__(self):
        m, e = self.parts()
        return f"ExtScalar({m:.12g}e{e:+d})"

    # -- arithmetic -----------------------------------------------------------

    def _binary(self, other, fn) -> "ExtScalar":
        with mpmath.workdps(DPS):
            out = ExtScalar.__new__(ExtScalar)
            v = fn(self._v, _to_mpf(other))
            if v < 0:
                raise RangeError("operation left the nonnegative range")
            out._v = v
            out._check_range()
            return out

    def __add__(self, other: Number) -> "ExtScalar":
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other: Number) -> "ExtScalar":
        return self._binary(other, lambda a, b: a - b)

    def __mul__(self, other: Number) -> "ExtScalar":
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> "ExtScalar":
        o = _to_mpf(other)
        if o == 0:
            raise RangeError("division by zero")
        return self._binary(other, lambda a, b: a / b)

    def pow(self, r) -> "ExtScalar":
        """x**r for real r; 0**r needs r > 0."""
        with mpmath.workdps(DPS):
            if self._v == 0:
                if _to_mpf(r) <= 0:
                    raise RangeError("0 cannot be raised to a nonpositive power")
                return ExtScalar(0)
            out = ExtScalar.__new__(ExtScalar)
            out._v = mpmath.power(self._v, _to_mpf(r))
            out._check_range()
            return out

    def ln(self) -> "ExtScalar":
        """Natural log; requires the value to be >= 1 so the result stays
        in the nonnegative range."""
        with mpmath.workdps(DPS):
            if self._v == 0:
                raise RangeError("ln(0) is undefined")
            if self._v < 1:
                raise RangeError("ln of a value below 1 is negative")
            out = ExtScalar.__new__(ExtScalar)
            out._v = mpmath.log(self._v)
            out._check_range()
            return out

    def exp(self) -> "ExtScalar":
        with mpmath.workdps(DPS):
            log10_result = self._v / mpmath.log(10)
            if log10_result > _EXP_LIMIT:
                raise RangeError("exp overflows the 64-bit decimal exponent")
            out = ExtScalar.__new__(ExtScalar)
            out._v = mpmath.exp(self._v)
            return out

    # -- comparisons ----------------------------------------------------------

    def _cmp(self, other) -> int:
        o = _to_mpf(other)
        return -1 if self._v < o else (1 if self._v > o else 0)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if not isinstance(other, (int, float, ExtScalar)):
            return NotImplemented
        return self._cmp(other) == 0

    def __hash__(self):
        return hash(("ExtScalar", str(self._v)))

    def rel_close(self, other: "ExtScalar", rtol: float) -> bool:
        with mpmath.workdps(DPS):
            a, b = self._v, _to_mpf(other)
            scale = max(abs(a), abs(b))
            if scale == 0:
                return True
            return abs(a - b) / scale <= rtol


def ext_arith(op: str, x: ExtScalar, y=None) -> ExtScalar:
    """Functional entry point: op in {add, mul, div, pow, ln, exp}."""
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    if op == "pow":
        return x.pow(y)
    if op == "ln":
        return x.ln()
    if op == "exp":
        return x.exp()
    raise RangeError(f"unknown ext_arith op {op!r}")


def ext_ln10() -> ExtScalar:
    with mpmath.workdps(DPS):
        out = ExtScalar.__new__(ExtScalar)
        out._v = mpmath.log(10)
        return out


def ext_const(expr) -> ExtScalar:
    """Build an ExtScalar from an mpmath expression evaluated at DPS digits."""
    with mpmath.workdps(DPS):
        return ExtScalar(mpf(expr))
