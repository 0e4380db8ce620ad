import numpy as np
import pytest
from fractions import Fraction

from declab.errors import DomainError
from declab.field import FieldGrid, build_field, eval_extension
from declab.geometry import DyadicInterval, Square, UNIT, partition_interval
from declab.quadrature import QuadratureSpec
from declab.symbols import (constant_one, explicit, rescale_symbol,
                            single_bump, unimodular_random)

F = Fraction
QUAD = QuadratureSpec()


def test_unit_symbol_at_origin():
    assert eval_extension(constant_one(), UNIT, (0.0, 0.0), QUAD) == pytest.approx(1.0)


def test_zero_symbol():
    g = explicit(np.zeros(4))
    assert eval_extension(g, UNIT, (3.0, -7.0), QUAD) == 0


def test_closed_form_on_the_x1_axis():
    # integral of e(xi x1) over [0,1] = (e(x1) - 1) / (2 pi i x1)
    g = constant_one()
    for x1 in (0.5, 3.7, 64.0, -17.25):
        got = eval_extension(g, UNIT, (x1, 0.0), QUAD)
        want = (np.exp(2j * np.pi * x1) - 1) / (2j * np.pi * x1)
        assert got == pytest.approx(want, abs=1e-12)
    # at integer frequency the integral vanishes
    assert abs(eval_extension(g, UNIT, (64.0, 0.0), QUAD)) < 1e-12


def test_richardson_refinement():
    g = unimodular_random(5, 16)
    for x in ((10.25, -3.5), (200.0, 150.0)):
        coarse = eval_extension(g, UNIT, x, QUAD)
        fine = eval_extension(g, UNIT, x, QUAD.doubled_nodes())
        assert abs(coarse - fine) / abs(fine) < 1e-8


def test_partition_additivity():
    g = unimodular_random(7, 16)
    x = (113.25, -97.5)
    whole = eval_extension(g, UNIT, x, QUAD)
    parts = sum(eval_extension(g, piece, x, QUAD)
                for piece in partition_interval(UNIT, F(1, 16)))
    assert abs(parts - whole) / abs(whole) < 1e-9


def test_linearity():
    g = unimodular_random(3, 8)
    c = 2.5 - 1.25j
    scaled = explicit(g.values * c)
    x = (7.5, 2.25)
    a = eval_extension(scaled, UNIT, x, QUAD)
    b = c * eval_extension(g, UNIT, x, QUAD)
    assert a == pytest.approx(b, rel=1e-13)


def test_rescale_identity_trivial():
    g = unimodular_random(1, 16)
    gt, amap = rescale_symbol(g, UNIT)
    assert np.allclose(gt.values, g.values)
    assert amap((3.0, 4.0)) == (3.0, 4.0)


def test_rescale_lengths():
    # |E_I 1(0)| = |I| = sigma * |E_[0,1] 1(0)|
    g = constant_one()
    interval = DyadicInterval(F(1, 2), F(1, 4))
    val = abs(eval_extension(g, interval, (0.0, 0.0), QUAD))
    assert val == pytest.approx(0.25, rel=1e-12)


def test_rescale_identity_random_points():
    g = unimodular_random(9, 16)
    interval = DyadicInterval(F(1, 4), F(1, 4))
    gt, amap = rescale_symbol(g, interval)
    rng = np.random.default_rng(42)
    for _ in range(10):
        x = tuple(rng.uniform(-8, 8, size=2))
        lhs = abs(eval_extension(g, interval, x, QUAD))
        rhs = 0.25 * abs(eval_extension(gt, UNIT, amap(x), QUAD))
        assert lhs == pytest.approx(rhs, rel=1e-6, abs=1e-12)


def test_rescale_rejects_bad_intervals():
    # intervals escaping [0, 1] cannot even be constructed
    with pytest.raises(DomainError):
        DyadicInterval(F(3, 4), F(1, 2))
    # misalignment with the symbol grid is rejected by rescale itself
    g = unimodular_random(2, 4)
    with pytest.raises(DomainError):
        rescale_symbol(g, DyadicInterval(F(1, 8), F(1, 4)))


def test_single_bump_support():
    g = single_bump(DyadicInterval(F(1, 4), F(1, 4)))
    inside = eval_extension(g, DyadicInterval(F(1, 4), F(1, 4)), (0.0, 0.0), QUAD)
    outside = eval_extension(g, DyadicInterval(F(1, 2), F(1, 4)), (0.0, 0.0), QUAD)
    assert inside == pytest.approx(0.25, rel=1e-12)
    assert outside == 0


def test_field_grid_roundtrip():
    g = unimodular_random(4, 8)
    f = build_field(g, UNIT, Square((0.0, 0.0), 4.0), QUAD)
    blob = f.to_bytes()
    back = FieldGrid.from_bytes(blob)
    assert back.origin == pytest.approx(f.origin)
    assert back.spacing == f.spacing
    assert np.array_equal(back.samples, f.samples)


def test_field_grid_csv_header():
    g = constant_one()
    f = build_field(g, UNIT, Square((0.0, 0.0), 1.0), QUAD)
    text = f.to_csv()
    assert text.splitlines()[0] == "x,y,re,im"
    assert len(text.splitlines()) == 1 + f.samples.size
