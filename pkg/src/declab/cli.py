"""Command-line front door.

    lab run <suite> [--config PATH] [--seed S] [--out PATH] [--format json|csv]
    lab count j --x X
    lab count i1 --x X --p P --a A --b B [--xi XI --eta ETA]
    lab bound theorem --log-inv-delta MANTISSA,EXPONENT
    lab ratio <functional> ...

Exit codes: 0 all pass, 1 any fail/error, 2 configuration error.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import Optional

from . import arithmetic as ar
from . import functionals as fn
from .config import SUITES, load_spec
from .errors import ConfigError, LabError
from .extscalar import ExtScalar
from .geometry import DyadicInterval, Square
from .quadrature import QuadratureSpec
from .recursion import log_decoupling_bound
from .report import emit_report
from .suites import run_suite
from .symbols import constant_one, single_bump, unimodular_random

F = Fraction


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="lab")
    sub = top.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run a verification suite")
    runp.add_argument("suite", choices=SUITES)
    runp.add_argument("--config", default=None)
    runp.add_argument("--seed", type=int, default=None)
    runp.add_argument("--out", default=None)
    runp.add_argument("--format", choices=("json", "csv"), default="json")

    countp = sub.add_parser("count", help="exact solution counts")
    csub = countp.add_subparsers(dest="which", required=True)
    jp = csub.add_parser("j")
    jp.add_argument("--x", type=int, required=True)
    ip = csub.add_parser("i1")
    ip.add_argument("--x", type=int, required=True)
    ip.add_argument("--p", type=int, required=True)
    ip.add_argument("--a", type=int, required=True)
    ip.add_argument("--b", type=int, required=True)
    ip.add_argument("--xi", type=int, default=None)
    ip.add_argument("--eta", type=int, default=None)

    boundp = sub.add_parser("bound", help="explicit-constant pipeline")
    bsub = boundp.add_subparsers(dest="which", required=True)
    tp = bsub.add_parser("theorem")
    tp.add_argument("--log-inv-delta", required=True,
                    help="ln(1/delta) as MANTISSA,EXPONENT")

    ratiop = sub.add_parser("ratio", help="one decoupling functional")
    ratiop.add_argument("functional",
                        choices=("linear", "bilinear", "bilinear-weighted",
                                 "local-bilinear", "interp-bilinear", "l2l2",
                                 "bernstein", "ball-inflation",
                                 "ball-inflation-s", "bilinear-reduction",
                                 "pairing-suppression", "search"))
    ratiop.add_argument("--delta", default="1/4")
    ratiop.add_argument("--nu", default="1/4")
    ratiop.add_argument("--a", type=int, default=1)
    ratiop.add_argument("--b", type=int, default=1)
    ratiop.add_argument("--s", type=float, default=2.0)
    ratiop.add_argument("--p", type=float, default=6.0)
    ratiop.add_argument("--eps", type=float, default=0.1)
    ratiop.add_argument("--g", default="one",
                        help="one | bump | uni:SEED[:CELLS]")
    ratiop.add_argument("--i1", default=None, help="interval LEFT,LENGTH")
    ratiop.add_argument("--i2", default=None)
    ratiop.add_argument("--j1", default=None)
    ratiop.add_argument("--j2", default=None)
    ratiop.add_argument("--square-side", type=float, default=None)
    ratiop.add_argument("--budget", type=int, default=40)
    ratiop.add_argument("--seed", type=int, default=0)
    ratiop.add_argument("--nodes-per-cycle", type=int, default=4)
    ratiop.add_argument("--spacing", type=float, default=0.25)
    ratiop.add_argument("--tail-rtol", type=float, default=1e-17)
    return top


def _parse_interval(text: Optional[str], fallback) -> DyadicInterval:
    if text is None:
        return fallback
    left, length = (F(part) for part in text.split(","))
    return DyadicInterval(left, length)


def _parse_g(text: str, delta: Fraction):
    if text == "one":
        return constant_one()
    if text == "bump":
        return single_bump(DyadicInterval(F(0), delta))
    if text.startswith("uni:"):
        parts = text.split(":")
        seed = int(parts[1])
        cells = int(parts[2]) if len(parts) > 2 else int(1 / delta)
        return unimodular_random(seed, cells)
    raise ConfigError(f"unknown symbol spec {text!r}")


def _cmd_run(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    spec = load_spec(args.suite, args.config, overrides)
    record = run_suite(spec)
    blob = emit_report(record, args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(blob)
    else:
        sys.stdout.buffer.write(blob)
    return 0 if record.all_green else 1


def _cmd_count(args) -> int:
    if args.which == "j":
        tally = ar.count_J(args.x)
        print(f"J({args.x}) = {tally.count}")
        return 0
    if args.xi is not None or args.eta is not None:
        if args.xi is None or args.eta is None:
            raise ConfigError("--xi and --eta must be given together")
        tally = ar.count_I1_class(args.x, args.p, args.a, args.b,
                                  args.xi, args.eta)
        print(f"I1({args.x}; {args.a}, {args.b}; xi={args.xi}, "
              f"eta={args.eta} mod {args.p}^*) = {tally.count}")
        return 0
    tally, arg = ar.count_I1_max(args.x, args.p, args.a, args.b)
    print(f"I1({args.x}; {args.a}, {args.b}) = {tally.count} "
          f"at (xi, eta) = {arg}")
    return 0


def _cmd_bound(args) -> int:
    mant, expo = args.log_inv_delta.split(",")
    l_val = ExtScalar.from_parts(float(mant), int(expo))
    out = log_decoupling_bound(l_val)
    bound = out["ln_bound"].ln_value
    target = out["ln_target"].ln_value
    print(f"eps = {out['eps']:.6e}")
    print(f"ln bound  = {bound.mantissa:.12f}e{bound.exponent:+d}")
    print(f"ln target = {target.mantissa:.12f}e{target.exponent:+d} "
          f"(30 L / ln L)")
    print(f"gates: {out['gates']}")
    return 0


def _cmd_ratio(args) -> int:
    delta = F(args.delta)
    nu = F(args.nu)
    quad = QuadratureSpec(nodes_per_cycle=args.nodes_per_cycle,
                          spacing=args.spacing, tail_rtol=args.tail_rtol)
    side = args.square_side or float(1 / delta) ** 2
    square = Square((0.0, 0.0), side)
    g = _parse_g(args.g, delta)
    i1 = _parse_interval(args.i1, DyadicInterval(F(0), nu ** args.a))
    i2 = _parse_interval(args.i2, DyadicInterval(1 - nu ** args.b,
                                                 nu ** args.b))
    params = fn.ScaleParams(delta, nu, a=args.a, b=args.b, s=args.s, p=args.p)
    name = args.functional
    if name == "linear":
        rep = fn.linear_ratio(g, params, square, quad)
    elif name == "bilinear":
        rep = fn.bilinear_ratio(g, i1, i2, params, square, quad)
    elif name == "bilinear-weighted":
        rep = fn.bilinear_weighted_ratio(g, i1, i2, params, square, quad)
    elif name == "local-bilinear":
        rep = fn.local_bilinear_ratio(g, i1, i2, params, square, quad)
    elif name == "interp-bilinear":
        rep = fn.interpolated_bilinear_ratio(g, i1, i2, args.b, args.s,
                                             params, square, quad)
    elif name == "l2l2":
        rep = fn.check_l2l2_decoupling(g, i1, square, quad)
    elif name == "bernstein":
        rep = fn.check_bernstein(g, i1, square, args.p, quad)
    elif name == "ball-inflation":
        rep = fn.ball_inflation_ratio(g, i1, i2, nu, args.b, square, quad)
    elif name == "ball-inflation-s":
        rep = fn.ball_inflation_s_ratio(g, i1, i2, args.b, args.s, nu,
                                        square, args.eps, quad)
    elif name == "bilinear-reduction":
        rep = fn.check_bilinear_reduction(g, params, square, quad)
    elif name == "pairing-suppression":
        j1 = _parse_interval(args.j1, DyadicInterval(i1.left,
                                                     nu ** (2 * args.b)))
        j2 = _parse_interval(
            args.j2, DyadicInterval(i1.right - nu ** (2 * args.b),
                                    nu ** (2 * args.b)))
        rep = fn.check_pairing_suppression(g, i1, i2, j1, j2, params, square,
                                           quad)
    elif name == "search":
        rep = fn.search_lower_bound(params, square, args.budget, args.seed,
                                    quad)
    else:  # pragma: no cover
        raise ConfigError(f"unhandled functional {name}")
    import json
    print(json.dumps(rep.to_json_dict(), indent=1, default=str))
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "count":
            return _cmd_count(args)
        if args.command == "bound":
            return _cmd_bound(args)
        if args.command == "ratio":
            return _cmd_ratio(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except LabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
