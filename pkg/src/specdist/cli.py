"""Batch command-line front end.

Subcommands: moyal-distance, torus-distance, probe, verify, ball-check.
Reports are emitted as deterministic JSON (sorted keys, no wall-clock fields
unless --timing); probe series are emitted as plot-ready CSV.

Exit codes: 0 success, 1 parameter error, 2 suite failure, 3 non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import probes, torus, verify
from .algebra import MoyalElement
from .calculus import radial_bump, staircase
from .distance import moyal_report
from .errors import ParameterError
from .lipschitz import ball_report
from .states import MoyalPureState, basis_state, finite_state, zeta_state

EXIT_OK = 0
EXIT_PARAMETER = 1
EXIT_SUITE_FAILURE = 2
EXIT_NON_CONVERGENCE = 3


class _Parser(argparse.ArgumentParser):
    # usage problems are parameter errors (exit 1), not suite failures
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit2(message)


class SystemExit2(Exception):
    def __init__(self, message):
        super().__init__(message)


def parse_state_spec(text: str, theta: float) -> MoyalPureState:
    """State mini-grammar: basis:m | zeta:s:Mcut | finite:w0,w1,..."""
    parts = text.split(":")
    kind = parts[0]
    if kind == "basis" and len(parts) == 2:
        return basis_state(int(parts[1]), theta)
    if kind == "zeta" and len(parts) == 3:
        return zeta_state(float(parts[1]), int(parts[2]), theta)
    if kind == "finite" and len(parts) == 2:
        weights = [complex(w) for w in parts[1].split(",")]
        return finite_state(weights, theta)
    raise ParameterError(f"cannot parse state spec {text!r}")


def _emit(payload: dict, args) -> None:
    if getattr(args, "timing", False):
        payload = dict(payload)
        payload["elapsed_s"] = time.perf_counter() - args._t0
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_csv(rows, args) -> None:
    text = "\n".join(",".join(str(c) for c in row) for row in rows) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_spec_file(args) -> dict:
    if getattr(args, "spec_file", None):
        with open(args.spec_file) as fh:
            return json.load(fh)
    return {}


def cmd_moyal_distance(args) -> int:
    spec = _load_spec_file(args)
    a_text = spec.get("a", args.a)
    b_text = spec.get("b", args.b)
    theta = float(spec.get("theta", args.theta))
    if a_text is None or b_text is None:
        raise ParameterError("state specs --a and --b are required")
    s1 = parse_state_spec(a_text, theta)
    s2 = parse_state_spec(b_text, theta)
    report = moyal_report(s1, s2, order=args.order, optimize=not args.no_optimize,
                          probe=args.probe, tol=args.tol, max_iter=args.max_iter)
    _emit(report.to_dict(), args)
    if report.converged is False:
        return EXIT_NON_CONVERGENCE
    return EXIT_OK


def cmd_torus_distance(args) -> int:
    theta = args.theta

    def parse_torus_state(text):
        if text == "tracial":
            return torus.tracial_state(theta)
        parts = text.split(":")
        if parts[0] == "phi" and len(parts) == 2:
            m1, m2 = (int(v) for v in parts[1].split(","))
            return torus.vector_state(theta, (m1, m2))
        raise ParameterError(f"cannot parse torus state spec {text!r}")

    if args.m is not None:
        m1, m2 = (int(v) for v in args.m.split(","))
        s1 = torus.vector_state(theta, (m1, m2))
        s2 = torus.tracial_state(theta)
    else:
        if args.a is None or args.b is None:
            raise ParameterError("either --m or both --a and --b are required")
        s1 = parse_torus_state(args.a)
        s2 = parse_torus_state(args.b)
    report = torus.torus_report(s1, s2, optimize=args.optimize,
                                box_radius=args.box, max_iter=args.max_iter)
    _emit(report.to_dict(), args)
    if report.converged is False:
        return EXIT_NON_CONVERGENCE
    return EXIT_OK


def _parse_grid(text: str, points: int):
    lo, hi = text.split(":")
    return probes.default_grid(float(lo), float(hi), points)


def _parse_fit_top(text: str) -> float:
    return float(text[:-3]) if text.endswith("dec") else float(text)


def cmd_probe(args) -> int:
    a_text, b_text = args.pair.split(",")
    spec1 = probes.parse_probe_spec(a_text)
    spec2 = probes.parse_probe_spec(b_text)
    grid = _parse_grid(args.grid, args.points)
    decades = _parse_fit_top(args.fit_top)
    window = (max(grid) / 10 ** decades, max(grid))
    series = probes.asymptotic_fit(spec1, spec2, grid, fit_window=window, theta=args.theta)
    if args.format == "csv":
        _emit_csv(series.csv_rows(), args)
    else:
        payload = series.summary_dict()
        payload["pair"] = [spec1.label(), spec2.label()]
        payload["theta"] = args.theta
        payload["divergence"] = probes.divergence_flag(spec1, spec2, theta=args.theta)
        _emit(payload, args)
    return EXIT_OK


def cmd_verify(args) -> int:
    names = list(verify.SUITES) if args.suite == "all" else [args.suite]
    failed = False
    for result in verify.run_suites(names):
        status = "PASS" if result.passed else "FAIL"
        print(f"suite {result.name}: {status}")
        for line in result.summary_lines():
            print(line)
        failed = failed or not result.passed
    return EXIT_SUITE_FAILURE if failed else EXIT_OK


def cmd_ball_check(args) -> int:
    if args.element_file:
        with open(args.element_file) as fh:
            element = MoyalElement.from_dict(json.load(fh))
    elif args.staircase is not None:
        element = staircase(args.staircase, args.theta)
    elif args.bump is not None:
        element = radial_bump(args.bump, args.theta)
    else:
        raise ParameterError("provide --element-file, --staircase, or --bump")
    if args.scale != 1.0:
        element = args.scale * element
    _emit(ball_report(element, args.tol).to_dict(), args)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="specdist",
                     description="Spectral distances on the truncated plane and torus")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write the report to this path instead of stdout")
        p.add_argument("--timing", action="store_true",
                       help="include wall-clock time in the report")

    p = sub.add_parser("moyal-distance", help="bracketed distance between plane states")
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--a", help="state spec: basis:m | zeta:s:Mcut | finite:w0,w1,...")
    p.add_argument("--b", help="state spec")
    p.add_argument("--order", type=int, default=16, help="truncation order for the optimizer")
    p.add_argument("--tol", type=float, default=1e-9, help="ball-membership tolerance")
    p.add_argument("--max-iter", type=int, default=100000)
    p.add_argument("--no-optimize", action="store_true")
    p.add_argument("--probe", action="store_true", help="attach a divergence flag")
    p.add_argument("--spec-file", help="JSON file with keys a, b, theta")
    common(p)
    p.set_defaults(func=cmd_moyal_distance)

    p = sub.add_parser("torus-distance", help="bracketed distance between torus states")
    p.add_argument("--theta", type=float, default=0.37)
    p.add_argument("--m", help="shorthand: vector state index m1,m2 against the tracial state")
    p.add_argument("--a", help="state spec: tracial | phi:m1,m2")
    p.add_argument("--b", help="state spec")
    p.add_argument("--box", type=int, default=None, help="operator box radius for the optimizer")
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--optimize", action="store_true")
    common(p)
    p.set_defaults(func=cmd_torus_distance)

    p = sub.add_parser("probe", help="growth series of the certificate bound")
    p.add_argument("--pair", required=True, help="spec pair, e.g. zeta:1.2,basis:0")
    p.add_argument("--grid", default="1e3:1e6", help="index range lo:hi")
    p.add_argument("--points", type=int, default=25)
    p.add_argument("--fit-top", default="1.5dec", help="fit window size in decades")
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    common(p)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("verify", help="run the self-check suites")
    p.add_argument("--suite", default="all", choices=["all"] + list(verify.SUITES))
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ball-check", help="Lipschitz-ball membership report")
    p.add_argument("--theta", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--element-file", help="JSON file with a serialized element")
    p.add_argument("--staircase", type=int, help="use the staircase element with this index")
    p.add_argument("--bump", type=int, help="use the single-entry radial element at this index")
    p.add_argument("--scale", type=float, default=1.0, help="scale the element before checking")
    common(p)
    p.set_defaults(func=cmd_ball_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    t0 = time.perf_counter()
    try:
        args = parser.parse_args(argv)
        args._t0 = t0
        return args.func(args)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except (ParameterError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER


if __name__ == "__main__":
    sys.exit(main())
