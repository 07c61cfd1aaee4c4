"""Command line entry point: ``compactlin <command> ...``.

Exit status is 2 for usage, parse and precondition errors, 1 when a
verification or structural check fails, and 0 otherwise.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import zoo
from .coverage import CoverageStats, make_coverage, support_plan
from .errors import (
    CompactLinError,
    InconsistentSpec,
    ParseError,
    PlanInvalid,
    RegimeMismatch,
    SizeExceeded,
    SupportsNotDisjoint,
    ValidationError,
)
from .io import export_lp, format_number, parse_instance, serialize_instance
from .linearizer import compact_linearize, standard_linearize
from .verifier import (
    ASSIGNMENT,
    DEGREE_TWO,
    GENERAL,
    compare_bounds,
    structural_match,
    verify_dominance,
    verify_theorem1,
)

USAGE_ERRORS = (ParseError, ValidationError, RegimeMismatch, SizeExceeded, InconsistentSpec, SupportsNotDisjoint, PlanInvalid)


class UsageError(Exception):
    pass


def _weights(text):
    try:
        e, v = text.split(",")
        return Fraction(e), Fraction(v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected E,V with two numbers, got {text!r}")


def _load(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    return parse_instance(text)


def _emit(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _fmt_set(items) -> str:
    return "{" + ", ".join(str(i) for i in sorted(items)) + "}"


def _fmt_pairs(pairs) -> str:
    return " ".join(f"({i},{j})" for i, j in sorted(pairs)) or "-"


def _plan_lines(inst, plan) -> list[str]:
    stats = CoverageStats.of(inst, plan)
    lines = [f"B[{k}] = {_fmt_set(plan.B[k])}" for k in inst.equation_ids]
    lines.append(f"Q = {_fmt_pairs(plan.Q)}")
    lines.append(f"compact rows: {stats.num_equations}")
    lines.append(f"product variables: {stats.num_vars}")
    lines.append(f"standard inequalities: {stats.standard_ineq_count}")
    return lines


def cmd_plan(args) -> int:
    inst = _load(args.file)
    w_eqn, w_var = args.weights or (None, None)
    plan = make_coverage(inst, args.method, w_eqn, w_var)
    print(f"instance: {inst.name or args.file}")
    print(f"method: {args.method}")
    print("\n".join(_plan_lines(inst, plan)))
    return 0


def cmd_linearize(args) -> int:
    inst = _load(args.file)
    if args.method == "compact":
        model = compact_linearize(inst, make_coverage(inst, args.plan))
    else:
        model = standard_linearize(inst)
    _emit(export_lp(model), args.out)
    return 0


def cmd_compare(args) -> int:
    inst = _load(args.file)
    plan = make_coverage(inst, args.plan)
    result = compare_bounds(inst, plan)
    print(f"instance: {inst.name or args.file}")
    print(f"regime: {result.regime}")
    print(f"lp bound compact: {format_number(result.lp_bound_compact)}")
    print(f"lp bound standard: {format_number(result.lp_bound_standard)}")
    print(f"delta: {format_number(result.delta)}")
    return 0


def _print_dominance(report) -> None:
    print(f"regime: {report.regime}")
    print(f"checks: {len(report.per_pair_max)}")
    worst = max(report.per_pair_max.values(), default=None)
    print(f"max violation: {'-' if worst is None else format_number(worst)}")
    for w in sorted(report.witnesses, key=lambda w: (w.pair, w.kind)):
        point = " ".join(
            f"{v.name}={format_number(val)}" for v, val in sorted(w.point.items()) if val
        )
        print(f"witness {w.pair[0]},{w.pair[1]} {w.kind} violation {format_number(w.violation)}: {point}")


def cmd_verify(args) -> int:
    inst = _load(args.file)
    method = args.plan or ("support" if args.theorem == 3 else "auto")
    plan = make_coverage(inst, method)
    print(f"instance: {inst.name or args.file}")
    print(f"theorem: {args.theorem}")
    if args.theorem == 1:
        report = verify_theorem1(inst, plan, cap=args.cap)
        worst = max((v for v in report.per_pair_max.values() if v is not None), default=None)
        print(f"feasible points: {report.points_checked}")
        print(f"max violation: {'-' if worst is None else format_number(worst)}")
        print(f"result: {'pass' if report.passed else 'FAIL'}")
        if args.regime == GENERAL:
            # fractional probe; positive maxima are findings, not failures
            _print_dominance(verify_dominance(inst, plan, GENERAL))
        return 0 if report.passed else 1
    regime = args.regime or (ASSIGNMENT if args.theorem == 2 else DEGREE_TWO)
    report = verify_dominance(inst, plan, regime)
    _print_dominance(report)
    if regime == GENERAL:
        print("result: probe complete")
        return 0
    bounds = compare_bounds(inst, plan)
    print(f"delta: {format_number(bounds.delta)}")
    ok = report.passed and bounds.delta >= 0
    print(f"result: {'pass' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_gen(args) -> int:
    if args.kind == "qtsp":
        inst = zoo.gen_qtsp(zoo.QtspSpec(args.v, include_subtours=not args.no_subtours, seed=args.seed))
    elif args.kind == "qap":
        inst = zoo.gen_qap(zoo.QapSpec(args.n, seed=args.seed))
    else:
        spec = zoo.RandomSpec(
            n=args.n,
            num_equations=args.k,
            support_size=(args.support_min, args.support_max),
            coef_max=args.coef_max,
            num_pairs=args.pairs,
            disjoint=args.disjoint,
            assignment=args.assignment,
            fractional=not args.integral,
            num_sides=args.sides,
            seed=args.seed,
        )
        inst = zoo.gen_random(spec)
    _emit(serialize_instance(inst), args.out)
    return 0


def cmd_match(args) -> int:
    result = structural_match(args.reference, args.size)
    print(f"reference: {result.reference}")
    print(f"size: {result.size}")
    print(f"compact rows: {result.compact_rows}")
    print(f"reference rows: {result.reference_rows}")
    print(f"product variables: {result.product_vars}")
    print(f"standard inequalities: {result.standard_inequalities}")
    print(f"match: {'yes' if result.match else 'NO'}")
    return 0 if result.match else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="compactlin", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    plan_methods = ["auto", "fixpoint", "milp", "support", "full"]

    p = sub.add_parser("plan", help="choose multiplier sets and print them")
    p.add_argument("file")
    p.add_argument("--weights", type=_weights, help="selection weights E,V (rows, products)")
    p.add_argument("--method", choices=plan_methods, default="auto")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("linearize", help="write the compact or standard model as an LP file")
    p.add_argument("file")
    p.add_argument("--method", choices=["compact", "standard"], default="compact")
    p.add_argument("--plan", choices=plan_methods, default="auto", help="plan for the compact model")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_linearize)

    p = sub.add_parser("compare", help="LP bounds of compact and standard models")
    p.add_argument("file")
    p.add_argument("--plan", choices=plan_methods, default="auto")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", help="check integer consistency or relaxation dominance")
    p.add_argument("file")
    p.add_argument("--theorem", type=int, choices=[1, 2, 3], required=True)
    p.add_argument("--regime", choices=[ASSIGNMENT, DEGREE_TWO, GENERAL])
    p.add_argument("--plan", choices=plan_methods, help="default: support for 3, auto otherwise")
    p.add_argument("--cap", type=int, default=25, help="largest n for feasible-point enumeration")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("kind", choices=["qap", "qtsp", "random"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--v", type=int, default=5, help="qtsp: vertex count")
    p.add_argument("--no-subtours", action="store_true", help="qtsp: omit subtour constraints")
    p.add_argument("--n", type=int, default=None, help="qap: size; random: variable count")
    p.add_argument("--k", type=int, default=2, help="random: equation count")
    p.add_argument("--support-min", type=int, default=2)
    p.add_argument("--support-max", type=int, default=4)
    p.add_argument("--coef-max", type=int, default=3)
    p.add_argument("--pairs", type=int, default=3)
    p.add_argument("--sides", type=int, default=0)
    p.add_argument("--disjoint", action="store_true")
    p.add_argument("--assignment", action="store_true")
    p.add_argument("--integral", action="store_true", help="random: integer coefficients only")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("match", help="compare compact rows with a known formulation")
    p.add_argument("reference", choices=["qap", "qtsp"])
    p.add_argument("--size", type=int, required=True)
    p.set_defaults(func=cmd_match)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "gen" and args.n is None:
        args.n = 3 if args.kind == "qap" else 8
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        for line, code, msg in exc.diagnostics:
            print(f"{args.file}:{line}: {code}: {msg}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        for issue in exc.issues:
            print(f"{args.file}: {issue.code}: {issue.message}", file=sys.stderr)
        return 2
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CompactLinError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
