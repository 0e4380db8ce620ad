"""Exact integer-side counterparts of the decoupling functionals.

Everything here is exact: solution counts of the two-equation system
(sum and sum of squares agree) over boxes and congruence classes, the
coefficient-weighted sixth moment, and the grid integral that must
reproduce it.  Counts use meet-in-the-middle tallies keyed by
(linear sum, quadratic sum); both sums are small enough that packed
int64 keys are collision-free by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import CapExceededError, DegenerateInputError, DomainError, ParameterError
from .kernels import (brute_force_j_kernel, count_j_kernel, paired_key_count,
                      weighted_paired_tally)

X_CAP = 2000
N_CAP = 128
BRUTE_CAP = 12
TRIPLE_CAP = 300_000_000  # guard for class-count enumerations


@dataclass(frozen=True)
class ArithParams:
    """(X, p, a, b, xi, eta) for congruenced counts; residues live in
    [0, p^a) and [0, p^b)."""
    x_max: int
    p: int
    a: int
    b: int
    xi: int = 0
    eta: int = 0

    def __post_init__(self):
        if self.x_max < 1:
            raise ParameterError("X must be >= 1")
        if self.p < 2 or any(self.p % d == 0 for d in range(2, int(self.p ** 0.5) + 1)):
            raise ParameterError(f"p = {self.p} is not prime")
        if self.a < 0 or self.b < 0:
            raise ParameterError("a, b must be nonnegative")
        if not 0 <= self.xi < self.p ** self.a:
            raise ParameterError(f"xi = {self.xi} outside [0, p^a)")
        if not 0 <= self.eta < self.p ** self.b:
            raise ParameterError(f"eta = {self.eta} outside [0, p^b)")


@dataclass(frozen=True)
class SolutionTally:
    """Exact count, or a complex-weighted total for coefficient inputs."""
    count: Optional[int] = None
    weighted: Optional[complex] = None

    def __post_init__(self):
        if self.count is not None and self.count < 0:
            raise DomainError("counts are nonnegative")


@dataclass(frozen=True)
class CoefficientVector:
    """a_n for |n| <= N."""
    values: np.ndarray  # complex128, length 2N+1

    def __post_init__(self):
        v = np.asarray(self.values, np.complex128)
        if v.ndim != 1 or v.size % 2 != 1:
            raise DomainError("coefficient vector must have odd length 2N+1")
        if not np.all(np.isfinite(v.view(np.float64))):
            raise DomainError("coefficients must be finite")
        object.__setattr__(self, "values", v)

    @property
    def n_max(self) -> int:
        return (self.values.size - 1) // 2

    @classmethod
    def ones(cls, n: int) -> "CoefficientVector":
        return cls(np.ones(2 * n + 1, np.complex128))

    @classmethod
    def indicator_range(cls, lo: int, hi: int, n: int) -> "CoefficientVector":
        vals = np.zeros(2 * n + 1, np.complex128)
        for m in range(lo, hi + 1):
            vals[m + n] = 1.0
        return cls(vals)


def count_J(x_max: int, cap: int = X_CAP) -> SolutionTally:
    """Solutions of x1+x2+x3 = y1+y2+y3, x1^2+x2^2+x3^2 = y1^2+y2^2+y3^2
    with all six variables in [1, X].  Exact."""
    if x_max < 1:
        raise ParameterError("X must be >= 1")
    if x_max > cap:
        raise CapExceededError(f"X = {x_max} exceeds cap {cap}")
    return SolutionTally(count=count_j_kernel(x_max))


def count_J_bruteforce(x_max: int) -> SolutionTally:
    """Independent O(X^6) oracle for count_J; capped at X <= 12."""
    if x_max < 1:
        raise ParameterError("X must be >= 1")
    if x_max > BRUTE_CAP:
        raise CapExceededError(f"brute force capped at X <= {BRUTE_CAP}")
    return SolutionTally(count=brute_force_j_kernel(x_max))


def _class_values(x_max: int, p: int, power: int, residue: int) -> np.ndarray:
    """Integers in [1, X] congruent to residue mod p^power."""
    mod = p ** power
    start = residue if residue >= 1 else mod
    if start > x_max:
        return np.empty(0, np.int64)
    return np.arange(start, x_max + 1, mod, dtype=np.int64)


def count_I1_class(x_max: int, p: int, a: int, b: int, xi: int, eta: int,
                   cap: int = X_CAP) -> SolutionTally:
    """Solutions of x1+y1+y2 = x2+y3+y4 (and same for squares) with
    x_i = xi mod p^a, y_j = eta mod p^b, all in [1, X].  Exact."""
    params = ArithParams(x_max, p, a, b, xi, eta)
    if x_max > cap:
        raise CapExceededError(f"X = {x_max} exceeds cap {cap}")
    xs = _class_values(x_max, p, a, xi)
    ys = _class_values(x_max, p, b, eta)
    n_triples = xs.size * ys.size * ys.size
    if n_triples > TRIPLE_CAP:
        raise CapExceededError(
            f"{n_triples} triples exceed the enumeration guard {TRIPLE_CAP}")
    return SolutionTally(count=paired_key_count(xs, ys))


def count_I1_max(x_max: int, p: int, a: int, b: int,
                 cap: int = X_CAP) -> Tuple[SolutionTally, Tuple[int, int]]:
    """Maximum of count_I1_class over residue pairs with xi != eta mod p;
    ties broken by lexicographically smallest (xi, eta)."""
    if a < 1 or b < 1:
        raise ParameterError("max variant needs a, b >= 1")
    best = -1
    arg = (0, 0)
    for xi in range(p ** a):
        for eta in range(p ** b):
            if xi % p == eta % p:
                continue
            c = count_I1_class(x_max, p, a, b, xi, eta, cap).count
            if c > best:
                best = c
                arg = (xi, eta)
    return SolutionTally(count=best), arg


def lifting_identity_check(x_max: int, p: int, a: int, b: int, xi: int, eta: int,
                           cap: int = X_CAP):
    """Refining the x-class mod p^a into its p lifts mod p^(a+1) partitions
    the solutions; returns (holds, lhs, rhs).

    Equality needs the two x-variables to share their lift, which the
    linear/quadratic constraints force exactly when a + 1 <= b, or when
    a <= b and xi, eta are transversal (xi != eta mod p) -- the
    configurations the congruencing iteration actually visits.  Outside
    that regime cross-lift solutions appear and lhs > rhs."""
    lhs = count_I1_class(x_max, p, a, b, xi, eta, cap).count
    rhs = 0
    for t in range(p):
        xi_lift = xi + t * p ** a
        rhs += count_I1_class(x_max, p, a + 1, b, xi_lift, eta, cap).count
    return lhs == rhs, lhs, rhs


def congruencing_step_ratio(x_max: int, p: int, a: int, b: int,
                            cap: int = X_CAP) -> dict:
    """ratio = I1max(X; a, b) / (p^(2b-a) * I1max(X; 2b, b)).

    The congruencing step predicts ratio <= 1 asymptotically; violations
    are flagged, never treated as failures.  The report also carries the
    normalized dictionary values p^(a+2b) I1 / X^3 for both sides."""
    if not 1 <= a <= 2 * b:
        raise ParameterError(f"need 1 <= a <= 2b, got a={a}, b={b}")
    if p ** (2 * b) > x_max:
        raise ParameterError(f"p^(2b) = {p ** (2 * b)} > X = {x_max}")
    num, arg_num = count_I1_max(x_max, p, a, b, cap)
    den, arg_den = count_I1_max(x_max, p, 2 * b, b, cap)
    if den.count == 0:
        raise DegenerateInputError("denominator count is zero")
    scale = p ** (2 * b - a)
    ratio = num.count / (scale * den.count)
    return {
        "x": x_max, "p": p, "a": a, "b": b,
        "numerator": num.count, "denominator": den.count,
        "argmax_num": arg_num, "argmax_den": arg_den,
        "ratio": ratio,
        "flagged": ratio > 1.0,
        "dict_lhs": p ** (a + 2 * b) * num.count / x_max ** 3,
        "dict_rhs": p ** (4 * b) * den.count / x_max ** 3,
    }


def weighted_sixth_moment(coeffs: CoefficientVector, cap: int = N_CAP) -> SolutionTally:
    """||sum a_n e(n x + n^2 t)||_{L^6(T^2)}^6, exactly, via complex tallies
    keyed by (linear sum, quadratic sum) of frequency triples."""
    n = coeffs.n_max
    if n > cap:
        raise CapExceededError(f"N = {n} exceeds cap {cap}")
    total = weighted_paired_tally(coeffs.values)
    return SolutionTally(weighted=complex(total, 0.0))


def torus_grid_integral(coeffs: CoefficientVector, cap: int = N_CAP) -> float:
    """(1/(G1*G2)) * sum |S|^6 over a uniform torus grid.

    |S|^6 is a trigonometric polynomial with frequencies |k1| <= 6N and
    |k2| <= 6N^2, so G1 = 6N+1, G2 = 6N^2+1 integrate it exactly; this is
    the independent oracle for weighted_sixth_moment."""
    n = coeffs.n_max
    if n > cap:
        raise CapExceededError(f"N = {n} exceeds cap {cap}")
    if n == 0:
        return float(abs(coeffs.values[0]) ** 6)
    g1 = 6 * n + 1
    g2 = 6 * n * n + 1
    ns = np.arange(-n, n + 1)
    total = 0.0
    # S(x_j, t_k) column by column: modulate by e(n^2 t_k), then one
    # length-G1 inverse DFT per k places frequency n at grid index n mod G1
    chunk = max(1, int(2e6 // g1))
    base = np.zeros(g1, np.complex128)
    idx = np.mod(ns, g1)
    for k0 in range(0, g2, chunk):
        ks = np.arange(k0, min(k0 + chunk, g2))
        mod = np.exp(2j * np.pi * np.outer(ks, ns * ns) / g2) * coeffs.values
        cols = np.zeros((ks.size, g1), np.complex128)
        np.add.at(cols, (slice(None), idx), mod)
        s_vals = np.fft.ifft(cols, axis=1) * g1
        total += float(np.sum(np.abs(s_vals) ** 6))
    return total / (g1 * g2)


def discrete_restriction_ratio(n: int, cap: int = N_CAP) -> dict:
    """Sixth-root of the unit-coefficient moment over (2N+1)^3, reported
    next to exp(30 log N / log log N); qualitative comparison only."""
    if n < 3:
        raise ParameterError("need N >= 3 so log log N is positive")
    moment = weighted_sixth_moment(CoefficientVector.ones(n), cap).weighted.real
    ratio = (moment / (2 * n + 1) ** 3) ** (1.0 / 6.0)
    reference = math.exp(30.0 * math.log(n) / math.log(math.log(n)))
    return {"n": n, "moment": moment, "ratio": ratio, "reference": reference}


def diagonal_lower_bound(x_max: int) -> int:
    """Number of ordered solution pairs with equal multisets: an exact
    lower bound for count_J."""
    distinct = math.comb(x_max, 3) * 36
    two_equal = x_max * (x_max - 1) * 9
    all_equal = x_max
    return distinct + two_equal + all_equal


def sum_over_x_classes(x_max: int, p: int, a: int, b: int, eta: int,
                       cap: int = X_CAP) -> int:
    """sum over xi of count_I1_class(..., xi, eta): solutions with only the
    y-congruence plus x1 = x2 mod p^a."""
    return sum(count_I1_class(x_max, p, a, b, xi, eta, cap).count
               for xi in range(p ** a))


def constrained_count_direct(x_max: int, p: int, a: int, b: int, eta: int) -> int:
    """Direct loop oracle for sum_over_x_classes; small X only."""
    if x_max > 20:
        raise CapExceededError("direct constrained count capped at X <= 20")
    mod = p ** a
    ys = [y for y in range(1, x_max + 1) if y % (p ** b) == eta % (p ** b)]
    total = 0
    for x1 in range(1, x_max + 1):
        for x2 in range(1, x_max + 1):
            if (x1 - x2) % mod != 0:
                continue
            for y1 in ys:
                for y2 in ys:
                    for y3 in ys:
                        y4 = x1 + y1 + y2 - x2 - y3
                        if y4 < 1 or y4 > x_max or y4 not in ys:
                            continue
                        if (x1 * x1 + y1 * y1 + y2 * y2
                                == x2 * x2 + y3 * y3 + y4 * y4):
                            total += 1
    return total
