"""Command-line interface: ``curvedet {classify,generate,residuals,plot,report}``.

Exit codes: 0 success, 1 usage error, 2 curve-spec or expression error,
3 numeric or domain error (including failed self-checks).
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import selfcheck
from .classify import DEFAULT_TOL, classify_curve
from .curves import CurveSpec, SampledCurve, SpecError
from .expr import ExprError
from .frenet import frenet_apparatus, reparametrize_by_arclength
from .generate import SalkowskiParams, intrinsic_from_spec, salkowski_curve
from .io import PLANES, curve_csv, curve_svg, write_atomic

EXIT_OK, EXIT_USAGE, EXIT_SPEC, EXIT_NUMERIC = 0, 1, 2, 3

EPILOG = """\
expression grammar: + - * / ^ with the usual precedence; ^ is right
associative and binds tighter than unary minus, so -s^2 means -(s^2).
Functions: sin cos tan sqrt exp log atan; constants: pi e; parameter: s.
"""


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _existing(path: str) -> str:
    if not os.path.isfile(path):
        raise argparse.ArgumentTypeError(f"no such file: {path}")
    return path


def _writable(path: str) -> str:
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory):
        raise argparse.ArgumentTypeError(f"output directory does not exist: {directory}")
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="curvedet",
        description="Determinant characterizations of space curves.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="classify a curve and write a JSON report", epilog=EPILOG)
    p.add_argument("--curve", required=True, type=_existing, help="curve-spec JSON file")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="normalized residual tolerance")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--out", type=_writable, help="report path (default: stdout)")

    p = sub.add_parser("generate", help="integrate a curve from curvature and torsion")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", choices=["salkowski"])
    src.add_argument("--curve", type=_existing, help="curve-spec JSON file")
    p.add_argument("--a", type=float, default=1.0, help="constant curvature")
    p.add_argument("--b", type=float, help="torsion slope (default 1, or 1/tan(phi))")
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--phi", type=float, help="angle with b = 1/tan(phi), requires c = 0")
    p.add_argument("--smin", type=float)
    p.add_argument("--smax", type=float)
    p.add_argument("--step", type=float, help="integration step")
    p.add_argument("--samples", type=int, default=200, help="grid size for non-generated curves")
    p.add_argument("--csv", type=_writable)
    p.add_argument("--svg", type=_writable)
    p.add_argument("--plane", choices=sorted(PLANES), default="xy")

    p = sub.add_parser("residuals", help="print per-sample determinant residuals")
    p.add_argument("--curve", required=True, type=_existing)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--out", type=_writable)

    p = sub.add_parser("plot", help="write an SVG projection of a curve")
    p.add_argument("--curve", required=True, type=_existing)
    p.add_argument("--svg", required=True, type=_writable)
    p.add_argument("--plane", choices=sorted(PLANES), default="xy")
    p.add_argument("--samples", type=int, default=400)

    p = sub.add_parser("report", help="run the identity suite over built-in fixtures")
    p.add_argument("--seed", type=int, default=0, help="seed for the random test curves")
    p.add_argument("--random", type=int, default=20, help="number of random test curves")
    p.add_argument("--out", type=_writable)
    return parser


def _emit(text: str, path) -> None:
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)


def _sampled_with_frames(spec: CurveSpec, n: int) -> SampledCurve:
    if spec.generated:
        return intrinsic_from_spec(spec).sampled
    sc = reparametrize_by_arclength(spec, n)
    fds = [frenet_apparatus(vj, s) for s, vj in zip(sc.s, sc.jets)]
    return SampledCurve(
        s=sc.s,
        positions=sc.positions,
        provenance=sc.provenance,
        frames=np.array([fd.frame.as_array() for fd in fds]),
        kappa=np.array([fd.kappa for fd in fds]),
        tau=np.array([fd.tau for fd in fds]),
        sigma=np.array([fd.sigma for fd in fds]),
        t=sc.t,
        jets=sc.jets,
    )


def cmd_classify(args) -> int:
    report = classify_curve(CurveSpec.load(args.curve), args.samples, args.tol)
    _emit(report.dumps(), args.out)
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.family:
        params = SalkowskiParams(a=args.a, b=args.b, c=args.c, phi=args.phi)
        lo, hi = params.admissible_domain()
        domain = (lo if args.smin is None else args.smin, hi if args.smax is None else args.smax)
        curve = salkowski_curve(params, domain, args.step).sampled
    else:
        curve = _sampled_with_frames(CurveSpec.load(args.curve), args.samples)
    if not args.csv and not args.svg:
        sys.stdout.write(curve_csv(curve))
    if args.csv:
        write_atomic(args.csv, curve_csv(curve))
    if args.svg:
        write_atomic(args.svg, curve_svg(curve.positions, args.plane))
    return EXIT_OK


def _fmt(v) -> str:
    return "nan" if v is None or not math.isfinite(v) else f"{v:.6e}"


def cmd_residuals(args) -> int:
    report = classify_curve(CurveSpec.load(args.curve), args.samples, args.tol)
    cols = ["D0", "D1", "D2", "D3", "ode"]
    lines = ["s " + " ".join(cols)]
    for i, s in enumerate(report.s):
        lines.append(" ".join([_fmt(s)] + [_fmt(report.residuals[c][i]) for c in cols]))
    for c in cols:
        lines.append(f"max |{c}| = {_fmt(report.stats[c]['max'])}")
    lines.append("categories: " + (", ".join(report.categories) or "none"))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_plot(args) -> int:
    spec = CurveSpec.load(args.curve)
    if spec.generated:
        points = intrinsic_from_spec(spec).sampled.positions
    else:
        points = reparametrize_by_arclength(spec, args.samples).positions
    write_atomic(args.svg, curve_svg(points, args.plane))
    return EXIT_OK


def cmd_report(args) -> int:
    checks = selfcheck.run_suite(seed=args.seed, n_random=args.random)
    _emit(selfcheck.format_table(checks), args.out)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_NUMERIC


COMMANDS = {
    "classify": cmd_classify,
    "generate": cmd_generate,
    "residuals": cmd_residuals,
    "plot": cmd_plot,
    "report": cmd_report,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"curvedet: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (SpecError, ExprError) as exc:
        print(f"curvedet: spec error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (ArithmeticError, ValueError) as exc:
        print(f"curvedet: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run())
