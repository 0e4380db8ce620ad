"""The explicit-constant recursion pipeline in log space.

Bounds are carried as natural logs (LogBound), themselves extended-range
scalars, so quantities like 2^(200^100) never materialize.  Sums of two
terms are folded as 2*max in log space; the explicit numeral constants of
the two-parameter iteration are kept verbatim, while the uncertainty and
interpolated variants carry a symbolic constant instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import mpf

from .errors import ConditionError, ParameterError, RangeError, ThresholdError
from .extscalar import DPS, ExtScalar

_LN10 = "ln(10)"


def _ln(x) -> mpf:
    return mpmath.log(mpf(x))


@dataclass(frozen=True)
class LogBound:
    """ln of a bound >= 1."""
    ln_value: ExtScalar

    def __post_init__(self):
        if isinstance(self.ln_value, (int, float)):
            object.__setattr__(self, "ln_value", ExtScalar(self.ln_value))

    @classmethod
    def one(cls) -> "LogBound":
        return cls(ExtScalar(0))

    @classmethod
    def from_ln(cls, ln_val) -> "LogBound":
        return cls(ExtScalar(ln_val))


@dataclass(frozen=True)
class BoundHypothesis:
    """D(delta) <= C * delta^(-eps) for all admissible delta; stores ln C."""
    ln_c: ExtScalar
    eps: float

    def __post_init__(self):
        # the analytic statements live below 1/100; the acceptance sweep
        # also exercises 1/99 and 1/64, where the formulas remain valid
        if not 0 < self.eps <= 1 / 64:
            raise ParameterError(f"eps must lie in (0, 1/64], got {self.eps}")


@dataclass(frozen=True)
class BootstrapState:
    lam: float
    n_steps: int

    def __post_init__(self):
        if not 0 < self.lam <= 0.5:
            raise ParameterError(f"lambda must lie in (0, 1/2], got {self.lam}")
        if self.n_steps < 1:
            raise ParameterError("n_steps must be a positive integer")


def almost_mult(d_sigma: LogBound, d_ratio: LogBound) -> LogBound:
    """Compose bounds across scales: ln out = ln 1e20000 + ln a + ln b."""
    with mpmath.workdps(DPS):
        const = 20000 * _ln(10)
        return LogBound(ExtScalar(const) + d_sigma.ln_value + d_ratio.ln_value)


def bilinear_chain(n_steps: int, d_values: Sequence[LogBound], nu) -> LogBound:
    """Starting bilinear constant from N interchange/refine rounds.

    d_values[j] must be ln D(delta / nu^(2^j)) for j = 0..N; the last two
    entries terminate the chain (exponents 1/(3*2^N) and 2/(3*2^N)), the
    first N feed the product with exponents 1/2^(j+1)."""
    if n_steps < 1:
        raise ParameterError("n_steps must be >= 1")
    if len(d_values) != n_steps + 1:
        raise ParameterError(
            f"need {n_steps + 1} bound values for j = 0..{n_steps}, got {len(d_values)}")
    nu = float(nu)
    if not 0 < nu < 1:
        raise ParameterError("nu must lie in (0, 1)")
    with mpmath.workdps(DPS):
        total = ExtScalar(60000 * _ln(10))
        total = total + ExtScalar(_ln(1.0 / nu) / 3)
        two_n = mpf(2) ** n_steps
        total = total + d_values[n_steps - 1].ln_value * float(1 / (3 * two_n))
        total = total + d_values[n_steps].ln_value * float(2 / (3 * two_n))
        for j in range(n_steps):
            total = total + d_values[j].ln_value * float(mpf(1) / (2 ** (j + 1)))
        return LogBound(total)


def _two_term(ln_const: mpf, term_a: ExtScalar, term_b: ExtScalar) -> LogBound:
    """Fold const*(A + B) as ln(2*const) + max(ln A, ln B)."""
    with mpmath.workdps(DPS):
        bigger = term_a if term_a >= term_b else term_b
        return LogBound(ExtScalar(ln_const + _ln(2)) + bigger)


def decoupling_recursion(n_steps: int, d_values: Sequence[LogBound],
                         delta: Fraction) -> dict:
    """One pass of the scale recursion at nu = delta^(1/2^N).

    d_values[m-1] = ln D(delta^(1 - 1/2^m)) for m = 1..N; the m = 1 entry
    doubles as ln D(delta^(1/2)).  Side conditions (delta^(-1/2^N) integral,
    delta < 100^(-2^N)) are recorded as flags, never enforced."""
    if n_steps < 1:
        raise ParameterError("n_steps must be >= 1")
    if len(d_values) != n_steps:
        raise ParameterError(
            f"need {n_steps} bound values for m = 1..{n_steps}, got {len(d_values)}")
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ParameterError("delta must lie in (0, 1)")
    with mpmath.workdps(DPS):
        two_n = 2 ** n_steps
        ln_inv_delta = _ln(delta.denominator) - _ln(delta.numerator)
        term1 = d_values[n_steps - 1].ln_value
        term2 = ExtScalar(mpf(4) / (3 * two_n) * ln_inv_delta)
        term2 = term2 + d_values[0].ln_value * float(mpf(1) / (3 * two_n))
        for j in range(n_steps):
            m = n_steps - j
            term2 = term2 + d_values[m - 1].ln_value * float(mpf(1) / 2 ** (j + 1))
        bound = _two_term(mpf(10) ** 5 * _ln(10), term1, term2)
    root = Fraction(1, two_n)
    # delta^(-1/2^N) integral <=> 1/delta is an exact 2^N-th power
    inv = Fraction(1, 1) / delta
    r = round(inv.numerator ** (1.0 / two_n))
    integral_ok = (inv.denominator == 1
                   and any((r + d) ** two_n == inv.numerator for d in (-1, 0, 1)))
    small_ok = delta < Fraction(1, 100) ** two_n
    return {
        "bound": bound,
        "flag_root_integral": not integral_ok,
        "flag_delta_small": not small_ok,
    }


def refine_restricted(h: BoundHypothesis, n_steps: int) -> BoundHypothesis:
    """Sharpen ln C on scales with delta^(-1/2^N) integral and delta tiny:
    ln C' = ln(2e100000) + (1 - eps/2^N) ln C."""
    gap = 5.0 / 6.0 + n_steps / 2.0 - 4.0 / (3.0 * h.eps)
    if not gap > 0:
        raise ConditionError(
            f"need 5/6 + N/2 - 4/(3 eps) > 0; N = {n_steps}, eps = {h.eps} give {gap}")
    with mpmath.workdps(DPS):
        const = _ln(2) + mpf(10) ** 5 * _ln(10)
        factor = 1 - mpf(h.eps) / 2 ** n_steps
        return BoundHypothesis(ExtScalar(const) + h.ln_c * float(factor), h.eps)


def _refine_all_constants(eps: float):
    """(ln K, contraction defect q) of the all-scales refinement:
    ln C' = ln K + (1 - q) ln C with K = 10^(10^6) * 2^(4 * 8^(1/eps)).

    q = eps / 8^(1/eps) underflows past 40 digits next to 1, so it is
    carried separately and never formed as 1 - q."""
    with mpmath.workdps(DPS):
        pow8 = mpmath.exp(_ln(8) / eps)   # 8^(1/eps)
        ln_k_const = mpf(10) ** 6 * _ln(10) + 4 * pow8 * _ln(2)
        defect = mpf(eps) / pow8
        return ln_k_const, defect, pow8


def refine_all_scales(h: BoundHypothesis) -> BoundHypothesis:
    """Upgrade a hypothesis to every reciprocal-integer scale:
    ln C' = 10^6 ln10 + 4 * 8^(1/eps) ln2 + (1 - eps/8^(1/eps)) ln C."""
    ln_k, q, _ = _refine_all_constants(h.eps)
    with mpmath.workdps(DPS):
        new_ln_c = ExtScalar(ln_k + h.ln_c._v * (1 - q))
        return BoundHypothesis(new_ln_c, h.eps)


def _iterate_refinement(eps: float, m_iters, ln_c0: ExtScalar) -> ExtScalar:
    """ln C after m_iters refinements, evaluated in closed form:
    ln C_M = ln K * (1 - k^M)/(1 - k) + k^M ln C_0 with k = 1 - q.

    ln k = -q up to a relative q/2 correction (q <= 1e-10 always), so the
    geometric factors are computed through expm1 in the exponent."""
    ln_k, q, _ = _refine_all_constants(eps)
    with mpmath.workdps(DPS):
        k_m = mpmath.exp(-mpf(m_iters) * q)
        series = -mpmath.expm1(-mpf(m_iters) * q) / q
        val = ln_k * series + k_m * ln_c0._v
        return ExtScalar(val)


MAX_REFINE_DOUBLINGS = 10 ** 6


def bootstrap_fixed_point(eps: float, start_ln_c: float = 0.0,
                          rtol: float = 1e-9) -> dict:
    """Closed-form limit of the all-scales refinement and the iterated
    approach to it.

    The per-step contraction is 1 - eps/8^(1/eps), so a literal step-by-step
    loop cannot move visibly in any feasible step count; the iterate is
    instead evaluated in closed form at doubling iteration counts until the
    relative change drops below rtol.  Returns both values and asserts
    iterated <= closed form <= 200^(1/eps) * ln 2."""
    if not 0 < eps <= 1 / 64:
        raise ParameterError(f"eps must lie in (0, 1/64], got {eps}")
    ln_k, q, pow8 = _refine_all_constants(eps)
    with mpmath.workdps(DPS):
        closed = ExtScalar(ln_k * pow8 / eps)
        start = ExtScalar(start_ln_c)
        m = 1
        prev = _iterate_refinement(eps, m, start)
        doublings = 0
        # relative change alone stalls on the flat early stretch of a
        # far-from-fixed-point start; also require the geometric weight
        # k^M to have decayed below the tolerance
        min_mq = -mpmath.log(mpf(rtol))
        while True:
            doublings += 1
            if doublings > MAX_REFINE_DOUBLINGS:
                raise RangeError("bootstrap iteration did not converge")
            m *= 2
            cur = _iterate_refinement(eps, m, start)
            settled = prev.rel_close(cur, rtol) and mpf(m) * q >= min_mq
            if settled and not cur.is_zero:
                break
            prev = cur
        cap = ExtScalar(mpmath.exp(_ln(200) / eps) * _ln(2))
        # ascending starts approach the fixed point from below; descending
        # ones may overshoot it by at most the stopping tolerance
        ok_chain = cur <= closed * (1 + 10 * rtol)
        if not (ok_chain and closed <= cap):
            raise ConditionError("fixed-point chain ordering failed")
        return {
            "closed_form": LogBound(closed),
            "iterated": LogBound(cur),
            "iterations": m,
            "cap": LogBound(cap),
            "rel_gap": abs(cur.to_float() / closed.to_float() - 1.0)
            if closed.to_float() != 0 else 0.0,
        }


def minimal_bootstrap_steps(lam: float) -> int:
    """Smallest N with 5/6 + N/2 - 4/(3 lam) >= 1, handled exactly on
    rational boundaries."""
    if lam <= 0:
        raise ParameterError("lambda must be positive")
    bound = Fraction(1, 3) + Fraction(8, 3) / Fraction(lam).limit_denominator(10 ** 12)
    n = math.ceil(bound)
    return int(n)


def exponent_contraction_check(state: BootstrapState) -> dict:
    """Replays the exponent bookkeeping of the self-improvement step.

    Verifies the identity
      4/(3*2^N) + lam/(6*2^N) + sum_j (1 - 2^-(N-j)) lam 2^-(j+1)
        = lam (1 - (5/6 + N/2 - 4/(3 lam)) / 2^N)
    and reports the contracted exponent lam*(1 - 1/2^N)."""
    lam, n = state.lam, state.n_steps
    two_n = 2 ** n
    lhs = 4.0 / (3 * two_n) + lam / (6 * two_n)
    lhs += sum((1 - 2.0 ** (-(n - j))) * lam * 2.0 ** (-(j + 1)) for j in range(n))
    rhs = lam * (1 - (5.0 / 6 + n / 2 - 4.0 / (3 * lam)) / two_n)
    contracted = lam * (1 - 1.0 / two_n)
    return {
        "minimal_n": minimal_bootstrap_steps(lam),
        "identity_lhs": lhs,
        "identity_rhs": rhs,
        "identity_abs_err": abs(lhs - rhs),
        "contracted_exponent": contracted,
        "contracts": contracted < lam,
    }


_VARIANTS = ("explicit", "uncertainty", "interpolated")


def recursion_variants(n_steps: int, variant: str, d_values: Sequence[LogBound],
                       delta: Fraction, eps: float = 0.0) -> dict:
    """Shared engine for the three scale recursions.

    * explicit:      numeral constant 1e100000, delta-power 4/(3*2^N)
    * uncertainty:   symbolic constant, same exponents
    * interpolated:  symbolic constant, delta-power 4/(3*2^N) + N*eps/(6*2^N)
    """
    if variant not in _VARIANTS:
        raise ParameterError(f"variant must be one of {_VARIANTS}")
    if variant == "interpolated" and eps < 0:
        raise ParameterError("interpolated variant needs eps >= 0")
    if len(d_values) != n_steps:
        raise ParameterError(f"need {n_steps} bound values, got {len(d_values)}")
    delta = Fraction(delta)
    with mpmath.workdps(DPS):
        two_n = 2 ** n_steps
        ln_inv_delta = _ln(delta.denominator) - _ln(delta.numerator)
        power = mpf(4) / (3 * two_n)
        if variant == "interpolated":
            power += mpf(n_steps) * eps / (6 * two_n)
        term1 = d_values[n_steps - 1].ln_value
        term2 = ExtScalar(power * ln_inv_delta)
        if variant == "explicit":
            term2 = term2 + d_values[0].ln_value * float(mpf(1) / (3 * two_n))
        for j in range(n_steps):
            m = n_steps - j
            term2 = term2 + d_values[m - 1].ln_value * float(mpf(1) / 2 ** (j + 1))
        ln_const = mpf(10) ** 5 * _ln(10) if variant == "explicit" else mpf(0)
        bound = _two_term(ln_const, term1, term2)
    return {"bound": bound, "symbolic_constant": variant != "explicit"}


def log_decoupling_bound(ln_inv_delta: ExtScalar) -> dict:
    """Final optimized bound for L = ln(1/delta) past the threshold.

    Chooses A = log2(200) * L, eta = ln A - ln ln A, eps = ln(200)/eta,
    checks the three proof gates, and returns the ln-bound 2*eps*L, which
    must stay below 30 L / ln L."""
    with mpmath.workdps(DPS):
        L = ln_inv_delta._v
        threshold = mpmath.exp(200 * _ln(200))  # 200^200
        if not L > threshold:
            raise ThresholdError(
                "requires ln(1/delta) > 200^200, i.e. delta below exp(-200^200)")
        a_val = _ln(200) / _ln(2) * L
        ln_a = mpmath.log(a_val)
        eta = ln_a - mpmath.log(ln_a)
        eps = _ln(200) / eta
        # gate 1: eta * e^eta <= A  (the defining inequality of eta)
        gate_eta = eta * mpmath.exp(eta) <= a_val
        # gate 2: 200^(1/eps) ln 2 <= eps L
        gate_main = mpmath.exp(_ln(200) / eps) * _ln(2) <= eps * L
        # gate 3: eps < 1/100 through the chain
        #   eta >= ln A - sqrt(ln A) >= ln(A)/2 >= ln(L)/2 and 2 ln200/lnL < 1/100
        ln_l = mpmath.log(L)
        gate_eps_chain = (eta >= ln_a - mpmath.sqrt(ln_a)
                          and ln_a - mpmath.sqrt(ln_a) >= ln_a / 2
                          and ln_a / 2 >= ln_l / 2
                          and 2 * _ln(200) / ln_l < mpf(1) / 100)
        gate_eps = eps < mpf(1) / 100
        ln_bound = 2 * eps * L
        target = 30 * L / ln_l
        ok = ln_bound <= target
        if not (gate_eta and gate_main and gate_eps and gate_eps_chain and ok):
            raise ConditionError("optimized-bound gate failed")
        return {
            "eps": float(eps),
            "eta": float(eta),
            "ln_bound": LogBound(ExtScalar(ln_bound)),
            "ln_target": LogBound(ExtScalar(target)),
            "gates": {
                "eta_exp_eta_le_a": bool(gate_eta),
                "main": bool(gate_main),
                "eps_below_1_over_100": bool(gate_eps),
                "eps_chain": bool(gate_eps_chain),
                "bound_le_30_l_over_ln_l": bool(ok),
            },
        }
