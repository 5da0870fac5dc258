"""Command-line front end: ``lclab <subcommand> [options]``.

Exit status is 0 on success, 2 on usage errors and 1 when a computation
fails; failures print a JSON object to stderr.
"""
from __future__ import annotations

import argparse
import json
import sys

from .asymptotics import convergence_report, extrema, limit_function
from .automaton import AutomatonSpec, render
from .complexity import ScanPolicy, block_sets, complexity_csv
from .genfun import build_framework
from .gfpoly import ModulusError, format_poly, parse_poly
from .recursion import RecursionSpec, fit_general_order, verify_theorem_main
from .structure import complexity_sequence, intersection_csv, intersection_table, suspicion


DEFAULT_SCAN_KMAX = 128


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=2, help="prime modulus (default 2)")
    common.add_argument("--rule", required=True, help="rule coefficients, ascending degree (comma form for p > 10)")
    common.add_argument("--initial", default="1", help="initial state (default 1)")
    common.add_argument("--out", help="write output here instead of stdout")

    scan = argparse.ArgumentParser(add_help=False)
    scan.add_argument("--window", type=int, help="stabilization window in rows (default max(64, 4*kmax))")
    scan.add_argument("--row-limit", type=int, default=1 << 18, help="hard row limit (default 2^18)")
    scan.add_argument("--scan-kmax", type=int, default=DEFAULT_SCAN_KMAX,
                      help="largest k taken from the row scan; larger k are extended (p = 2, initial 1)")

    parser = argparse.ArgumentParser(prog="lclab", description="Line complexity of additive cellular automata.")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="print rows of the automaton")
    s.add_argument("--rows", type=int, default=16)
    s.add_argument("--format", choices=["text", "pbm"], default="text")

    s = sub.add_parser("complexity", parents=[common, scan], help="line complexity a(0..kmax)")
    s.add_argument("--kmax", type=int, default=64)
    s.add_argument("--format", choices=["csv", "json"], default="csv")

    sub.add_parser("suspicious", parents=[common], help="nonsuspiciousness test (p = 2)")

    s = sub.add_parser("intersections", parents=[common, scan], help="image-set intersection sizes (p = 2)")
    s.add_argument("--kmax", type=int, default=None, help="largest k (default n + 8)")

    s = sub.add_parser("recursion", parents=[common, scan], help="fit a complexity recursion")
    s.add_argument("--kmax", type=int, default=256)
    s.add_argument("--order-max", type=int, default=None,
                   help="fit the order-n form for n <= order-max instead of the even/odd displays")

    s = sub.add_parser("genfun", parents=[common, scan], help="generating-function framework (p = 2)")
    s.add_argument("--kmax", type=int, default=256)

    s = sub.add_parser("limit", parents=[common, scan], help="piecewise quadratic limit function (p = 2)")
    s.add_argument("--kmax", type=int, default=2048)

    s = sub.add_parser("converge", parents=[common, scan], help="convergence of alpha(k)/k^2 to f (p = 2)")
    s.add_argument("--ymin", type=int, default=32)
    s.add_argument("--ymax", type=int, default=2048)
    s.add_argument("--samples", type=int, default=256)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    return parser


def _spec(args) -> AutomatonSpec:
    try:
        return AutomatonSpec(parse_poly(args.rule, args.p), parse_poly(args.initial, args.p))
    except (ValueError, ModulusError) as exc:
        raise UsageError(str(exc)) from exc


def _policy(args) -> ScanPolicy:
    if args.window is not None and args.window < 1:
        raise UsageError("--window must be positive")
    if args.row_limit < 1:
        raise UsageError("--row-limit must be positive")
    return ScanPolicy(args.window, args.row_limit)


def _positive(value, name):
    if value is None or value < 1:
        raise UsageError(f"{name} must be >= 1")


def _sequence(args, spec, k_max):
    return complexity_sequence(spec, k_max, _policy(args), args.scan_kmax)


def _framework(args, spec, k_max):
    if spec.p != 2:
        raise UsageError("this subcommand needs --p 2")
    seq = _sequence(args, spec, k_max)
    rec = verify_theorem_main(seq, spec.n)
    if not isinstance(rec, RecursionSpec):
        raise ValueError(f"no recursion: {rec.reason} (k={rec.k})")
    return seq, rec, build_framework(seq, rec)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def run(args) -> str | bytes:
    spec = _spec(args)
    cmd = args.command
    if cmd == "simulate":
        _positive(args.rows, "--rows")
        return render(spec, args.rows, args.format)
    if cmd == "complexity":
        _positive(args.kmax, "--kmax")
        seq = _sequence(args, spec, args.kmax)
        if args.format == "json":
            return _dump({"rule": format_poly(spec.rule), "p": spec.p, "values": list(seq.values),
                          "exact": seq.exact, "rows_scanned": seq.rows_scanned, "scan_kmax": seq.scan_kmax,
                          "extension": seq.extension})
        return complexity_csv(seq)
    if cmd == "suspicious":
        if spec.p != 2:
            raise UsageError("suspicious needs --p 2")
        return _dump(suspicion(spec.rule).to_dict())
    if cmd == "intersections":
        if spec.p != 2:
            raise UsageError("intersections needs --p 2")
        n = spec.n
        k_max = n + 8 if args.kmax is None else args.kmax
        if k_max < n + 1:
            raise UsageError(f"--kmax must be at least n + 1 = {n + 1}")
        sets = block_sets(spec, k_max + n // 2 + 1, _policy(args))
        tables = []
        for k in range(n + 1, k_max + 1):
            tables += [intersection_table(spec, k, sets), intersection_table(spec, k, sets, odd=True)]
        return intersection_csv(tables)
    if cmd == "recursion":
        _positive(args.kmax, "--kmax")
        seq = _sequence(args, spec, args.kmax)
        if args.order_max is not None:
            _positive(args.order_max, "--order-max")
            rec = fit_general_order(seq, args.order_max)
            if rec is None:
                raise ValueError(f"no recursion of order <= {args.order_max}")
            return _dump(rec.to_dict())
        if spec.p != 2:
            raise UsageError("the even/odd displays need --p 2; use --order-max")
        rec = verify_theorem_main(seq, spec.n)
        if not isinstance(rec, RecursionSpec):
            raise ValueError(json.dumps(rec.to_dict()))
        return _dump(rec.to_dict())
    if cmd == "genfun":
        _, _, fw = _framework(args, spec, args.kmax)
        return _dump(fw.to_dict())
    if cmd == "limit":
        _, _, fw = _framework(args, spec, args.kmax + spec.n + 1)
        pq = limit_function(fw)
        out = pq.to_dict()
        out["extrema"] = extrema(pq).to_dict()
        return _dump(out)
    if cmd == "converge":
        _positive(args.ymin, "--ymin")
        if args.ymax < args.ymin:
            raise UsageError("--ymax must be >= --ymin")
        seq, _, fw = _framework(args, spec, args.ymax + spec.n + 1)
        pq = limit_function(fw)
        report = convergence_report(seq, fw, pq, args.ymin, args.ymax, args.samples)
        if args.format == "json":
            return _dump({
                "rows": [[r.k, str(r.f_at_x), str(r.alpha_ratio), str(r.a_ratio)] for r in report.rows],
                "octave_max": {str(o): str(e) for o, e in sorted(report.octave_max.items())},
            })
        return report.to_csv()
    raise UsageError(f"unknown command {cmd}")


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        result = run(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(json.dumps({"error": "usage", "message": str(exc)}) + "\n")
        return 2
    except (ValueError, ArithmeticError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1
    data = result if isinstance(result, bytes) else result.encode()
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    return 0


if __name__ == "__main__":
    sys.exit(main())
