"""Command-line front end: ``jetspencer analyze|sweeney|punctual|catalog-list``."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .catalog import CATALOG, NONLINEAR, UnknownSystem, make_system
from .dsl import DSLError, parse_system
from .numerics import CandidateNotSubideal, NotInvolutive, sweeney_bound
from .punctual import DependentBasis, annihilator_colength, d_stable_check, parse_polynomials
from .report import analyze, render_json, render_text
from .spencer import NotStabilized

EXIT_OK, EXIT_INPUT, EXIT_UNSTABLE = 0, 1, 2


class InputError(Exception):
    pass


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    try:
        return parse_system(text, name=Path(path).stem)
    except DSLError as exc:
        raise InputError(f"{path}: {exc}") from None


def _system(args):
    if args.catalog and args.input:
        raise InputError("give either an input file or --catalog, not both")
    if args.catalog:
        try:
            return make_system(args.catalog)
        except UnknownSystem as exc:
            raise InputError(f"unknown catalog system {exc.args[0]!r}") from None
        except (ValueError, TypeError) as exc:
            raise InputError(str(exc)) from None
    if not args.input:
        raise InputError("no input: pass a DSL file or --catalog name[:params]")
    return _load(args.input)


def cmd_analyze(args) -> int:
    s = _system(args)
    candidates = [_load(p) for p in args.candidates]
    degree = None
    if args.degree is not None:
        try:
            degree = Fraction(args.degree)
        except ValueError:
            raise InputError(f"invalid degree {args.degree!r}") from None
    qmax = args.max_order if args.max_order is not None else s.order + s.n + 4
    if qmax < s.order:
        raise InputError(f"--max-order {qmax} is below the system order {s.order}")
    kw = dict(seed=args.seed, candidates=candidates, restrict=args.restrict, degree=degree)
    try:
        try:
            report = analyze(s, qmax, **kw)
        except NotStabilized:
            report = analyze(s, 2 * qmax, **kw)
    except NotStabilized as exc:
        print(f"not stabilized: {exc}", file=sys.stderr)
        return EXIT_UNSTABLE
    except (CandidateNotSubideal, NotInvolutive) as exc:
        raise InputError(f"candidate rejected: {exc}") from None
    out = render_json(report) if args.format == "json" else render_text(report)
    sys.stdout.write(out)
    return EXIT_OK


def cmd_sweeney(args) -> int:
    try:
        print(sweeney_bound(args.n, args.m, args.k))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return EXIT_OK


def cmd_punctual(args) -> int:
    try:
        lines = Path(args.basis_file).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {args.basis_file}: {exc.strerror or exc}") from None
    lines = [ln.split("#", 1)[0] for ln in lines]
    try:
        V = parse_polynomials(lines)
        stable = d_stable_check(V)
    except DependentBasis as exc:
        raise InputError(str(exc)) from None
    except (SyntaxError, TypeError, ValueError) as exc:
        raise InputError(f"cannot parse polynomials: {exc}") from None
    if not stable:
        print("not D-stable")
        return EXIT_OK
    res = annihilator_colength(V)
    names = [f"xi{i + 1}" for i in range(V.C)] if V.C > 1 else ["xi"]
    print("D-stable")
    print(f"variables: {', '.join(V.variables)}")
    print(f"ideal: ({', '.join(res.format_generators(names))})")
    print(f"colength: {res.colength}")
    return EXIT_OK


def cmd_catalog_list(args) -> int:
    for name, e in CATALOG.items():
        params = f":{','.join(e.params)}" if e.params else ""
        print(f"{name}{params}  {e.description}")
    for name, (_, params) in NONLINEAR.items():
        p = f":{','.join(params)}" if params else ""
        print(f"{name}{p}  (nonlinear, analyzed through its linearization at the zero jet)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jetspencer", description=__doc__)
    sub = ap.add_subparsers(dest="verb", required=True)

    a = sub.add_parser("analyze", help="run the full analysis on a system")
    a.add_argument("input", nargs="?", help="DSL file")
    a.add_argument("--catalog", metavar="NAME[:PARAMS]")
    a.add_argument("--max-order", type=int, help="top symbol degree (default order + n + 4)")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--candidates", nargs="*", default=[], metavar="FILE",
                   help="DSL files of candidate sub-blocks for the stability check")
    a.add_argument("--restrict", action="store_true", help="check invariance under restriction")
    a.add_argument("--degree", help="bundle degree, reported as degree / rank^2")
    a.add_argument("--format", choices=("json", "text"), default="text")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("sweeney", help="print the Sweeney bound rho(n, m, k)")
    s.add_argument("n", type=int)
    s.add_argument("m", type=int)
    s.add_argument("k", type=int)
    s.set_defaults(func=cmd_sweeney)

    p = sub.add_parser("punctual", help="D-stability and annihilator of a polynomial space")
    p.add_argument("basis_file")
    p.set_defaults(func=cmd_punctual)

    c = sub.add_parser("catalog-list", help="list catalog systems")
    c.set_defaults(func=cmd_catalog_list)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
