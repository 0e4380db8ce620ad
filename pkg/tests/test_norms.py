import numpy as np
import pytest
from fractions import Fraction

from declab.errors import GridCoverageError, ParameterError
from declab.field import FieldGrid, build_field
from declab.geometry import DyadicInterval, Square, UNIT
from declab.norms import (norm_lp, weight_cell_avg, weight_value,
                          weighted_norm_pow, box_norm_pow)
from declab.quadrature import QuadratureSpec
from declab.symbols import constant_one, unimodular_random

F = Fraction
QUAD = QuadratureSpec()


def _flat_field(value, square, spacing=0.25):
    (x0, y0) = (square.center[0] - square.half + spacing / 2,
                square.center[1] - square.half + spacing / 2)
    n = int(round(square.side / spacing))
    samples = np.full((n, n), value, np.complex128)
    return FieldGrid((x0, y0), spacing, samples)


def test_weight_values():
    assert weight_value(Square((0.0, 0.0), 1.0), (0.0, 0.0)) == 1.0
    assert weight_value(Square((0.0, 0.0), 1.0), (1.0, 0.0)) == pytest.approx(2.0 ** -100)
    assert weight_value(Square((0.0, 0.0), 2.0), (2.0, 0.0)) == pytest.approx(2.0 ** -100)


def test_weight_domination_on_square():
    b = Square((0.0, 0.0), 16.0)
    xs = np.linspace(-8, 8, 25)
    for x in xs:
        for y in xs:
            assert 1.0 <= 2.0 ** 100 * weight_value(b, (x, y))


def test_norm_flat_normalized():
    b = Square((0.0, 0.0), 2.0)
    f = _flat_field(1.0, b)
    assert norm_lp(f, b, 6.0, normalized=True) == pytest.approx(1.0)


def test_norm_flat_unnormalized():
    b = Square((0.0, 0.0), 2.0)
    f = _flat_field(1.0, b)
    assert norm_lp(f, b, 6.0) == pytest.approx(4.0 ** (1.0 / 6.0))


def test_norm_coverage_error():
    b = Square((0.0, 0.0), 2.0)
    f = _flat_field(1.0, b)
    with pytest.raises(GridCoverageError):
        norm_lp(f, b, 6.0, weighted=True)  # needs K*b coverage
    with pytest.raises(GridCoverageError):
        norm_lp(f, Square((0.0, 0.0), 4.0), 2.0)


def test_weighted_norm_tail_bound_recorded():
    b = Square((0.0, 0.0), 2.0)
    g = constant_one()
    f = build_field(g, UNIT, b.scaled(QUAD.weight_k), QUAD)
    val = norm_lp(f, b, 6.0, weighted=True, quad=QUAD)
    assert val.tail_bound == pytest.approx(QUAD.weight_k ** -98)
    assert float(val) > 0


def test_weighted_norm_matches_streaming():
    # the grid-based weighted norm and the streaming accumulator implement
    # the same truncated sum
    b = Square((0.0, 0.0), 4.0)
    g = unimodular_random(3, 4)
    f = build_field(g, UNIT, b.scaled(QUAD.weight_k), QUAD)
    via_grid = float(norm_lp(f, b, 4.0, weighted=True, quad=QUAD)) ** 4
    via_stream = weighted_norm_pow(g, UNIT, b, 4.0, QUAD)
    assert via_grid == pytest.approx(via_stream, rel=1e-9)


def test_invalid_p():
    b = Square((0.0, 0.0), 2.0)
    f = _flat_field(1.0, b)
    with pytest.raises(ParameterError):
        norm_lp(f, b, 0.5)


def test_quadspec_invariants():
    with pytest.raises(ParameterError):
        QuadratureSpec(spacing=0.75)
    with pytest.raises(ParameterError):
        QuadratureSpec(weight_k=2.0)
    with pytest.raises(ParameterError):
        QuadratureSpec(nodes_per_cycle=0)


def test_weight_cell_average_mass_is_scale_free():
    # integral of w over the plane is 2 pi / (98 * 99) * R^2; the cell
    # averaged discretization reproduces it at every square size
    cont = 2 * np.pi / (98 * 99)
    for r in (1.0, 4.0, 64.0):
        sq = Square((0.0, 0.0), r)
        h = 0.25
        n = int(8 * r / h)
        xs = -4 * r + h / 2 + h * np.arange(n)
        mass = float(weight_cell_avg(sq, xs, xs, h).sum()) * h * h / r ** 2
        assert mass == pytest.approx(cont, rel=6e-3)


def test_box_norm_matches_field_norm():
    b = Square((0.0, 0.0), 4.0)
    g = unimodular_random(6, 8)
    f = build_field(g, UNIT, b, QUAD)
    via_grid = float(norm_lp(f, b, 6.0)) ** 6
    via_stream = box_norm_pow(g, UNIT, b, 6.0, QUAD)
    assert via_grid == pytest.approx(via_stream, rel=1e-12)
