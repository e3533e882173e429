"""Command-line front end.

Subcommands::

    validate   check the algebra axioms; exit 0 ok, 2 violation, 3 malformed
    nf         normal form of an expression
    mul        product of two expressions in the quotient
    apply-p    the operator applied in the quotient
    basis      pattern-free words up to bounds, one per line, plus a count
    check-gsb  bounded confluence check; exit 0 pass, 4 fail

All output is deterministic for fixed inputs and seed.
"""

from __future__ import annotations

import argparse
import random
import sys

from .algebra import AlgebraFormatError, DegenerateOperatorError, load_algebra_file
from .enveloping import enumerate_irr_basis
from .gsb import check_gsb
from .reporting import report_text, write_report
from .rewrite import ReductionTrace, StepBudgetExceeded, normal_form
from .rules import RuleSystem
from .terms import ParseError, parse_poly, unparse_poly, unparse_word

EXIT_OK = 0
EXIT_AXIOM = 2
EXIT_MALFORMED = 3
EXIT_GSB_FAIL = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rbgsb",
        description="normal forms and confluence checking for enveloping "
                    "Rota-Baxter algebras of Rota-Baxter Lie algebras")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, rules=True):
        p.add_argument("--algebra", required=True, help="algebra description file")
        p.add_argument("--allow-degenerate-p", action="store_true",
                       help="admit operators that vanish on part of the basis")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for randomized auxiliary routines")
        p.add_argument("--output", help="also write the printed output to this file")
        if rules:
            p.add_argument("--rules", choices=("S", "T"), default="T")
            p.add_argument("--step-budget", type=int, default=10 ** 6)
            p.add_argument("--depth-guard", type=int, default=None)

    p = sub.add_parser("validate", help="check the algebra axioms")
    p.add_argument("algebra", help="algebra description file")

    p = sub.add_parser("nf", help="print the canonical normal form")
    common(p)
    p.add_argument("--expr", required=True)
    p.add_argument("--trace", action="store_true")

    p = sub.add_parser("mul", help="product in the quotient")
    common(p)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)

    p = sub.add_parser("apply-p", help="operator applied in the quotient")
    common(p)
    p.add_argument("--expr", required=True)

    p = sub.add_parser("basis", help="candidate basis words up to bounds")
    common(p)
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--max-depth", type=int, required=True)

    p = sub.add_parser("check-gsb", help="bounded confluence check")
    common(p)
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--max-depth", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--report-dir", help="write report files (text, json, csv, figure)")

    return parser


class _Output:
    def __init__(self, path):
        self.lines: list[str] = []
        self.path = path

    def emit(self, text: str) -> None:
        self.lines.append(text)
        print(text)

    def close(self) -> None:
        if self.path:
            with open(self.path, "w", encoding="utf-8") as fh:
                fh.write("\n".join(self.lines) + ("\n" if self.lines else ""))


def _load(args):
    return load_algebra_file(args.algebra,
                             allow_degenerate_p=getattr(args, "allow_degenerate_p", False))


def _system(args, algebra) -> RuleSystem:
    return RuleSystem(algebra, args.rules,
                      allow_degenerate=args.allow_degenerate_p,
                      step_budget=args.step_budget,
                      depth_guard=args.depth_guard)


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    random.seed(args.seed if hasattr(args, "seed") else 0)
    try:
        return _dispatch(args)
    except (AlgebraFormatError, ParseError, DegenerateOperatorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except StepBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GSB_FAIL


def _dispatch(args) -> int:
    if args.command == "validate":
        try:
            algebra = load_algebra_file(args.algebra, allow_degenerate_p=True)
        except AlgebraFormatError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_MALFORMED
        report = algebra.validate()
        if report.ok:
            print("ok")
            return EXIT_OK
        for v in report.violations:
            print(v.describe(algebra.names))
        return EXIT_AXIOM

    algebra = _load(args)
    names = algebra.names
    out = _Output(args.output)
    try:
        if args.command == "nf":
            system = _system(args, algebra)
            p = parse_poly(args.expr, algebra.index)
            if args.trace:
                trace = ReductionTrace()
                nf = normal_form(p, system, trace=trace)
                for step in trace:
                    out.emit(step.describe(names))
            else:
                nf = normal_form(p, system)
            out.emit(unparse_poly(nf, names))
            return EXIT_OK
        if args.command == "mul":
            system = _system(args, algebra)
            left = parse_poly(args.left, algebra.index)
            right = parse_poly(args.right, algebra.index)
            out.emit(unparse_poly(normal_form(left * right, system), names))
            return EXIT_OK
        if args.command == "apply-p":
            system = _system(args, algebra)
            p = parse_poly(args.expr, algebra.index)
            out.emit(unparse_poly(normal_form(p.op(), system), names))
            return EXIT_OK
        if args.command == "basis":
            system = _system(args, algebra)
            words = enumerate_irr_basis(system, args.max_degree, args.max_depth)
            for w in words:
                out.emit(unparse_word(w, names))
            out.emit(f"count: {len(words)}")
            return EXIT_OK
        if args.command == "check-gsb":
            system = _system(args, algebra)
            report = check_gsb(system, args.max_degree, args.max_depth,
                               jobs=args.jobs)
            out.emit(report_text(report).rstrip("\n"))
            if args.report_dir:
                for path in write_report(report, args.report_dir):
                    print(f"wrote {path}", file=sys.stderr)
            return EXIT_OK if report.passed else EXIT_GSB_FAIL
        raise AssertionError(f"unhandled command {args.command}")
    finally:
        out.close()


if __name__ == "__main__":
    sys.exit(main())
