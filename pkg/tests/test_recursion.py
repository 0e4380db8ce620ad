import math
from fractions import Fraction

import mpmath
import pytest

from declab.errors import ConditionError, ParameterError, ThresholdError
from declab.extscalar import ExtScalar
from declab.recursion import (BootstrapState, BoundHypothesis, LogBound,
                              almost_mult, bilinear_chain,
                              bootstrap_fixed_point, decoupling_recursion,
                              exponent_contraction_check,
                              log_decoupling_bound, minimal_bootstrap_steps,
                              recursion_variants, refine_all_scales,
                              refine_restricted)

F = Fraction


def test_almost_mult_constant():
    out = almost_mult(LogBound.one(), LogBound.one())
    assert out.ln_value.to_float() == pytest.approx(20000 * math.log(10))


def test_almost_mult_additivity():
    big = LogBound.from_ln(20000 * math.log(10))
    out = almost_mult(big, LogBound.one())
    assert out.ln_value.to_float() == pytest.approx(40000 * math.log(10))
    # two compositions of composed bounds: three constant factors
    half = almost_mult(LogBound.one(), LogBound.one())
    out2 = almost_mult(half, almost_mult(LogBound.one(), LogBound.one()))
    assert out2.ln_value.to_float() == pytest.approx(60000 * math.log(10))


def test_chain_unit_inputs():
    out = bilinear_chain(1, [LogBound.one(), LogBound.one()], F(1, 4))
    want = 60000 * math.log(10) + math.log(4) / 3
    assert out.ln_value.to_float() == pytest.approx(want, rel=1e-13)


def test_chain_length_mismatch():
    with pytest.raises(ParameterError):
        bilinear_chain(2, [LogBound.one()], F(1, 4))
    with pytest.raises(ParameterError):
        bilinear_chain(1, [], F(1, 4))


def test_chain_fixture_n1():
    vals = [LogBound.from_ln(0.5), LogBound.from_ln(1.25)]
    out = bilinear_chain(1, vals, F(1, 4))
    want = (60000 * math.log(10) + math.log(4) / 3
            + 0.5 / 6 + 2 * 1.25 / 6 + 0.5 / 2)
    assert out.ln_value.to_float() == pytest.approx(want, rel=1e-13)


def test_recursion_unit_inputs():
    out = decoupling_recursion(1, [LogBound.one()], F(1, 16))
    want = 1e5 * math.log(10) + math.log(2) + (4 / 6) * math.log(16)
    assert out["bound"].ln_value.to_float() == pytest.approx(want, rel=1e-13)
    assert not out["flag_root_integral"]
    assert out["flag_delta_small"]  # 1/16 is far above 100^-2


def test_recursion_flags():
    out = decoupling_recursion(2, [LogBound.one(), LogBound.one()], F(1, 4))
    assert out["flag_root_integral"]  # 4^(1/4) is not an integer
    assert out["flag_delta_small"]


def test_recursion_monotone_in_inputs():
    base = decoupling_recursion(2, [LogBound.one(), LogBound.one()], F(1, 16))
    more = decoupling_recursion(2, [LogBound.from_ln(3.0), LogBound.one()],
                                F(1, 16))
    assert more["bound"].ln_value >= base["bound"].ln_value


def test_refine_restricted_minimal_steps():
    h = BoundHypothesis(ExtScalar(0), 0.01)
    with pytest.raises(ConditionError):
        refine_restricted(h, 265)  # equality is not enough
    out = refine_restricted(h, 266)
    want = math.log(2) + 1e5 * math.log(10)
    assert out.ln_c.to_float() == pytest.approx(want, rel=1e-13)


def test_refine_all_scales_formula():
    h = BoundHypothesis(ExtScalar(0), 0.01)
    out = refine_all_scales(h)
    with mpmath.workdps(40):
        want = mpmath.mpf(10) ** 6 * mpmath.log(10) \
            + 4 * mpmath.power(8, 100) * mpmath.log(2)
        assert out.ln_c.rel_close(ExtScalar(want), 1e-12)


def test_refine_all_scales_monotone_in_eps():
    a = refine_all_scales(BoundHypothesis(ExtScalar(0), 1 / 100)).ln_c
    b = refine_all_scales(BoundHypothesis(ExtScalar(0), 1 / 64)).ln_c
    assert b < a  # smaller 8^(1/eps) for larger eps


def test_fixed_point_values():
    out = bootstrap_fixed_point(0.01)
    # closed form: (8^100 / eps) * (1e6 ln10 + 4 * 8^100 ln2)
    with mpmath.workdps(40):
        pow8 = mpmath.power(8, 100)
        want = pow8 / mpmath.mpf("0.01") * (
            mpmath.mpf(10) ** 6 * mpmath.log(10) + 4 * pow8 * mpmath.log(2))
        assert out["closed_form"].ln_value.rel_close(ExtScalar(want), 1e-12)
    # cap: ln C <= 200^(1/eps) ln 2 ~ 8.787e229
    m, e = out["cap"].ln_value.parts()
    assert e == 229 and m == pytest.approx(8.787, abs=2e-3)
    assert out["rel_gap"] <= 1e-9


@pytest.mark.parametrize("eps", [1 / 100, 1 / 99, 1 / 64])
def test_fixed_point_agreement(eps):
    out = bootstrap_fixed_point(eps)
    assert out["iterated"].ln_value.rel_close(out["closed_form"].ln_value, 1e-9)
    assert out["closed_form"].ln_value <= out["cap"].ln_value


def test_fixed_point_contracts_from_above():
    # a start far above the fixed point (~1.15e183) contracts back onto it
    out = bootstrap_fixed_point(0.01, start_ln_c=1e200)
    assert out["rel_gap"] <= 1e-8


def test_eps_range():
    with pytest.raises(ParameterError):
        bootstrap_fixed_point(0.02)
    with pytest.raises(ParameterError):
        BoundHypothesis(ExtScalar(0), 0.0)


def test_minimal_bootstrap_steps():
    assert minimal_bootstrap_steps(0.5) == 6


def test_bootstrap_identity_on_grid():
    for lam in (0.05, 0.15, 0.25, 0.35, 0.5):
        for n in (1, 3, 9, 17, 40):
            out = exponent_contraction_check(BootstrapState(lam, n))
            assert out["identity_abs_err"] <= 1e-12
            assert out["contracted_exponent"] < lam


def test_bootstrap_validation():
    with pytest.raises(ParameterError):
        BootstrapState(0.0, 3)
    with pytest.raises(ParameterError):
        BootstrapState(0.7, 3)


def test_variants():
    base = recursion_variants(1, "uncertainty", [LogBound.one()], F(1, 16))
    interp0 = recursion_variants(1, "interpolated", [LogBound.one()], F(1, 16),
                                 eps=0.0)
    assert base["bound"].ln_value.rel_close(interp0["bound"].ln_value, 1e-13)
    assert base["symbolic_constant"]
    explicit = recursion_variants(1, "explicit", [LogBound.one()], F(1, 16))
    assert not explicit["symbolic_constant"]
    # the explicit variant differs only by the numeral constant when the
    # bound inputs are trivial
    gap = explicit["bound"].ln_value.to_float() - base["bound"].ln_value.to_float()
    assert gap == pytest.approx(1e5 * math.log(10), rel=1e-9)
    interp = recursion_variants(3, "interpolated",
                                [LogBound.one()] * 3, F(1, 16), eps=0.01)
    plain = recursion_variants(3, "uncertainty",
                               [LogBound.one()] * 3, F(1, 16))
    assert interp["bound"].ln_value >= plain["bound"].ln_value


def test_theorem_bound_gates():
    out = log_decoupling_bound(ExtScalar.from_parts(1.0, 461))
    assert all(out["gates"].values())
    assert out["eps"] < 1 / 100
    assert out["ln_bound"].ln_value <= out["ln_target"].ln_value


def test_theorem_bound_threshold():
    with pytest.raises(ThresholdError):
        log_decoupling_bound(ExtScalar(1000.0))
    # 200^200 itself sits exactly at the cutoff, which is exclusive
    with mpmath.workdps(40):
        at_cut = ExtScalar(mpmath.exp(200 * mpmath.log(200)))
    with pytest.raises(ThresholdError):
        log_decoupling_bound(at_cut)


def test_theorem_bound_sweep():
    for e in range(461, 601, 7):
        out = log_decoupling_bound(ExtScalar.from_parts(2.5, e))
        assert out["ln_bound"].ln_value <= out["ln_target"].ln_value
