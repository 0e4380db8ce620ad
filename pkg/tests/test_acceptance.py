"""Acceptance gate: one test per criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; the functional-suite record is shared between the quadrature
certification and the inequality-suite criteria.
"""
import json
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from declab import arithmetic as ar
from declab import functionals as fn
from declab.config import load_spec
from declab.extscalar import ExtScalar
from declab.field import eval_extension
from declab.geometry import DyadicInterval, Square, UNIT, partition_interval
from declab.norms import weight_value
from declab.quadrature import QuadratureSpec
from declab.recursion import (BootstrapState, bootstrap_fixed_point,
                              exponent_contraction_check, log_decoupling_bound)
from declab.report import payload_bytes
from declab.suites import run_suite
from declab.symbols import explicit, rescale_symbol, unimodular_random

F = Fraction
FIXDIR = Path(__file__).parent / "fixtures"
QUAD = QuadratureSpec()


def _verdict(num, name, ok, detail=""):
    print(f"criterion {num} [{name}]: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, f"criterion {num} ({name}) failed: {detail}"


@pytest.fixture(scope="module")
def functional_record():
    spec = load_spec("functional-ratios")
    start = time.time()
    record = run_suite(spec)
    record.elapsed = time.time() - start
    return record


def test_criterion_1_oracle_equivalence():
    start = time.time()
    ok = True
    for x in range(1, 13):
        if ar.count_J(x).count != ar.count_J_bruteforce(x).count:
            ok = False
    anchors = (ar.count_J(1).count, ar.count_J(2).count, ar.count_J(3).count)
    ok = ok and anchors == (1, 20, 93)
    elapsed = time.time() - start
    ok = ok and elapsed < 10.0
    _verdict(1, "oracle equivalence", ok,
             f"anchors={anchors} elapsed={elapsed:.1f}s")


def test_criterion_2_moment_identity():
    start = time.time()
    ok = True
    for x in range(1, 51):
        coeffs = ar.CoefficientVector.indicator_range(1, x, x)
        moment = ar.weighted_sixth_moment(coeffs, cap=256).weighted.real
        if round(moment) != ar.count_J(x).count:
            ok = False
    worst = 0.0
    for s in range(20):
        rng = np.random.default_rng(1000 + s)
        n = int(rng.integers(1, 17))
        vals = rng.normal(size=2 * n + 1) + 1j * rng.normal(size=2 * n + 1)
        coeffs = ar.CoefficientVector(vals)
        a = ar.weighted_sixth_moment(coeffs).weighted.real
        b = ar.torus_grid_integral(coeffs)
        worst = max(worst, abs(a - b) / abs(a))
    elapsed = time.time() - start
    ok = ok and worst <= 1e-8 and elapsed < 60.0
    _verdict(2, "moment identity", ok,
             f"worst torus rel={worst:.2e} elapsed={elapsed:.1f}s")


def test_criterion_3_lifting_identity():
    start = time.time()
    rng = np.random.default_rng(77)
    checked = 0
    failures = 0
    while checked < 200:
        p = int(rng.choice([2, 3, 5]))
        a = int(rng.integers(0, 3))
        b = int(rng.integers(max(a, 1), 3))
        if p ** max(a + 1, b) > 40:
            continue
        x = int(rng.integers(1, 201))
        xi = int(rng.integers(0, p ** a))
        eta = int(rng.integers(0, p ** b))
        if a == b and xi % p == eta % p:
            eta = (eta + 1) % p ** b
        ok, _, _ = ar.lifting_identity_check(x, p, a, b, xi, eta)
        failures += 0 if ok else 1
        checked += 1
    elapsed = time.time() - start
    ok = failures == 0 and checked >= 200 and elapsed < 60.0
    _verdict(3, "lifting identity", ok,
             f"checked={checked} failures={failures} elapsed={elapsed:.1f}s")


def test_criterion_4_congruencing_fixtures():
    fixture_rows = {}
    for line in (FIXDIR / "congruencing.csv").read_text().splitlines()[1:]:
        x, p, a, b, num, den, axi, aeta, ratio = line.split(",")
        fixture_rows[(int(x), int(p), int(a), int(b))] = (
            int(num), int(den), (int(axi), int(aeta)), float(ratio))
    ok = True
    flagged = []
    for (x, p, a, b), (num, den, argmax, ratio) in fixture_rows.items():
        row = ar.congruencing_step_ratio(x, p, a, b)
        if (row["numerator"], row["denominator"], row["argmax_num"]) != \
                (num, den, argmax):
            ok = False
        if abs(row["ratio"] - ratio) > 1e-15:
            ok = False
        if row["flagged"]:
            flagged.append((x, p, a, b))
    _verdict(4, "congruencing fixtures", ok,
             f"rows={len(fixture_rows)} flagged={flagged}")


def test_criterion_5_quadrature_certification(functional_record):
    record = functional_record
    certified = [it for it in record.items
                 if "certify_rel_drift" in it.get("metrics", {})]
    worst = max((it["metrics"]["certify_rel_drift"] for it in certified),
                default=1.0)
    ok = (len(certified) >= 30 and worst <= 1e-6
          and record.elapsed < 600.0)
    _verdict(5, "quadrature certification", ok,
             f"certified={len(certified)} worst drift={worst:.2e} "
             f"elapsed={record.elapsed:.0f}s")


def test_criterion_6_exact_form_invariants():
    g = unimodular_random(7, 16)
    # partition additivity at 1e-9
    worst_add = 0.0
    for x in ((0.0, 0.0), (3.25, -2.5), (113.25, -97.5)):
        whole = eval_extension(g, UNIT, x, QUAD)
        parts = sum(eval_extension(g, piece, x, QUAD)
                    for piece in partition_interval(UNIT, F(1, 16)))
        worst_add = max(worst_add, abs(parts - whole) / abs(whole))
    # rescale identity at 1e-6
    interval = DyadicInterval(F(1, 4), F(1, 4))
    gt, amap = rescale_symbol(g, interval)
    rng = np.random.default_rng(11)
    worst_rs = 0.0
    for _ in range(10):
        x = tuple(rng.uniform(-8, 8, size=2))
        lhs = abs(eval_extension(g, interval, x, QUAD))
        rhs = 0.25 * abs(eval_extension(gt, UNIT, amap(x), QUAD))
        worst_rs = max(worst_rs, abs(lhs - rhs) / max(lhs, 1e-300))
    # weight domination, exact at grid points
    b = Square((0.0, 0.0), 16.0)
    grid = np.linspace(-8, 8, 33)
    weight_ok = all(1.0 <= 2.0 ** 100 * weight_value(b, (x, y))
                    for x in grid for y in grid)
    # ratio invariance under c * e^{i theta} at 1e-12
    params = fn.ScaleParams(F(1, 4), F(1, 4), p=6.0)
    base = fn.linear_ratio(g, params, b, QUAD)
    rot = fn.linear_ratio(explicit(g.values * 2.2 * np.exp(0.7j)), params, b,
                          QUAD)
    inv_err = abs(rot.ratio - base.ratio) / base.ratio
    ok = (worst_add <= 1e-9 and worst_rs <= 1e-6 and weight_ok
          and inv_err <= 1e-12)
    _verdict(6, "exact-form invariants", ok,
             f"additivity={worst_add:.1e} rescale={worst_rs:.1e} "
             f"invariance={inv_err:.1e}")


def test_criterion_7_functional_inequalities(functional_record):
    record = functional_record
    items = {it["key"]: it for it in record.items}
    ok = len(record.items) >= 50
    detail = [f"instances={len(record.items)}"]

    l2l2 = [it for k, it in items.items()
            if k.startswith("l2l2/") and "one" not in k]
    ok &= all(it["status"] == "pass" for it in l2l2) and len(l2l2) >= 4

    ball = [it for k, it in items.items() if k.startswith("ball-inflation")]
    ok &= all(it["status"] == "pass" for it in ball) and len(ball) >= 4

    sup = [it for k, it in items.items() if k.startswith("pairing-suppression/")]
    ok &= all(it["status"] == "pass" for it in sup) and len(sup) >= 2
    detail.append(
        "suppression=" + ",".join(f"{it['metrics']['ratio']:.1e}" for it in sup))

    cross = [it for k, it in items.items()
             if k.startswith("block-average-consistency/")]
    ok &= all(it["status"] == "pass" for it in cross) and len(cross) >= 2
    detail.append(
        "cross=" + ",".join(f"{it['metrics']['ratio']:.2f}" for it in cross))

    hard_failures = [k for k, it in items.items() if it["status"]
                     in ("fail", "error")]
    ok &= not hard_failures
    if hard_failures:
        detail.append(f"failures={hard_failures}")
    _verdict(7, "functional inequality suite", bool(ok), " ".join(detail))


def test_criterion_8_recursion_pipeline():
    start = time.time()
    ok = True
    for eps in (1 / 100, 1 / 99, 1 / 64):
        out = bootstrap_fixed_point(eps)
        if not out["iterated"].ln_value.rel_close(out["closed_form"].ln_value,
                                                  1e-9):
            ok = False
    for lam in (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5):
        for n in range(1, 41):
            if exponent_contraction_check(
                    BootstrapState(lam, n))["identity_abs_err"] > 1e-12:
                ok = False
    exponents = (461, 468, 475, 482, 489, 496, 503, 510, 517, 524, 531, 538,
                 545, 552, 559, 566, 573, 580, 590, 600)
    for e in exponents:
        out = log_decoupling_bound(ExtScalar.from_parts(1.0, e))
        if not (out["ln_bound"].ln_value <= out["ln_target"].ln_value
                and all(out["gates"].values())):
            ok = False
    elapsed = time.time() - start
    ok = ok and len(exponents) == 20 and elapsed < 5.0
    _verdict(8, "recursion pipeline", ok, f"elapsed={elapsed:.2f}s")


def test_criterion_9_determinism():
    blobs = []
    for _ in range(2):
        parts = []
        for suite in ("arithmetic-identities", "congruencing-ratios",
                      "recursion-pipeline"):
            parts.append(payload_bytes(run_suite(load_spec(suite))))
        blobs.append(b"".join(parts))
    ok = blobs[0] == blobs[1]
    _verdict(9, "determinism", ok, f"bytes={len(blobs[0])}")
