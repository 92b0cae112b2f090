"""Command-line front end.

    matula-asym count --m 2 --x 1e9
    matula-asym compare --m 2 --xs 1e6,1e8,1e10 --format json
    matula-asym matula decode 3

Exit status is 0 on success, 2 on usage errors (argparse) and 1 when a
computation fails (capacity, domain); failures print one line to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass
from decimal import Decimal, InvalidOperation

from . import asymptotics, constants, counting, matula
from .errors import MatulaAsymError, ParseError
from .primes import configured_sieve_limit, default_table

FLOAT_FORMAT = ".15g"


@dataclass(frozen=True)
class ComparisonRow:
    x: int
    exact: int
    log_exact: float
    log_asym: float
    log_weak: float
    abs_log_residual: float


# -- argument types -------------------------------------------------------

def parse_int(text):
    """Positive or zero integer, scientific notation allowed when exact (1e9, 2.5e3)."""
    try:
        d = Decimal(text.strip())
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not d.is_finite() or d != d.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(d)


def parse_real(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return v


def _list_of(conv):
    def parse(text):
        items = [t for t in text.split(",") if t.strip()]
        if not items:
            raise argparse.ArgumentTypeError("empty list")
        return [conv(t) for t in items]

    return parse


# -- output ---------------------------------------------------------------

def _fmt(v):
    if isinstance(v, float):
        return format(v, FLOAT_FORMAT)
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    return str(v)


def _jsonable(v):
    if isinstance(v, float):
        if not math.isfinite(v):
            return None
        return float(format(v, FLOAT_FORMAT))
    if isinstance(v, dict):
        return {k: _jsonable(w) for k, w in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(w) for w in v]
    return v


def emit_json(doc, out):
    out.write(json.dumps(_jsonable(doc)) + "\n")


def emit_table(rows, fields, fmt, out):
    """Rows as CSV (header always written) or as one JSON array."""
    if fmt == "json":
        emit_json([{f: r[f] for f in fields} for r in rows], out)
        return
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_fmt(r[f]) for f in fields])
    out.write(buf.getvalue())


def _log_int(n):
    return math.log(n) if n > 0 else float("-inf")


# -- commands -------------------------------------------------------------

def cmd_count(args, table, out):
    res = counting.count_M2m(args.m, args.x, table)
    if args.format == "json":
        emit_json({"m": args.m, "x": args.x, "count": res.value}, out)
    else:
        out.write(f"{res.value}\n")


def cmd_enumerate(args, table, out):
    members = counting.enumerate_Am(args.m, args.x, table)
    if args.format == "json":
        emit_json({"m": args.m, "x": args.x, "members": members}, out)
    else:
        emit_table([{"n": n} for n in members], ["n"], "csv", out)


def cmd_asym(args, table, out):
    K = constants.Km(args.m, table, args.tol)
    row = {
        "m": args.m,
        "x": args.x,
        "log_asym": asymptotics.theorem1_logM(args.m, args.x, table, K=K.value),
        "log_weak": asymptotics.weak_logM(args.m, args.x),
        "K": K.value,
        "K_error_bound": K.error_bound,
    }
    emit_table([row], list(row), args.format, out)


def cmd_constants(args, table, out):
    reports = constants.constants_report(args.m, args.tol, table)
    emit_json([r.to_dict() for r in reports], out)


def cmd_matula(args, table, out):
    if args.action == "encode":
        tree = matula.parse_tree(args.value)
        code = matula.encode(tree, table)
        if args.format == "json":
            emit_json({"tree": matula.format_tree(tree, table), "code": code}, out)
        else:
            out.write(f"{code}\n")
        return
    code = parse_int(args.value)
    text = matula.format_tree(matula.decode(code, table), table)
    if args.format == "json":
        emit_json({"code": code, "tree": text}, out)
    else:
        out.write(text + "\n")


def _prime_system(m, table):
    return counting.PrimeLambdaSystem(m, table)


def cmd_verify(args, table, out):
    if args.check == "hr":
        exact = counting.partition_sum_exact(args.u)
        log_asym = asymptotics.corollary1_logP(asymptotics.PARTITION_COEFFS, args.u)
        log_exact = _log_int(exact)
        row = {
            "u": args.u,
            "exact": exact,
            "log_exact": log_exact,
            "log_asym": log_asym,
            "ratio": math.exp(log_exact - log_asym),
        }
        emit_table([row], list(row), args.format, out)
        return
    if args.check == "lemma31":
        if args.integers:
            sys_ = counting.IntegerLambdaSystem()
            target = asymptotics.PARTITION_COEFFS.D
            coeffs = asymptotics.PARTITION_COEFFS
        else:
            sys_ = _prime_system(args.m, table)
            target = constants.Dprime_m(args.m, table, args.tol).value
            coeffs = asymptotics.lemma44_coeffs(args.m, table)
        rows = []
        for s in args.sigmas:
            r = asymptotics.lemma31_residual(sys_, s, coeffs)
            rows.append({"sigma": s, "residual": r, "Dprime": target, "gap": abs(r - target)})
        emit_table(rows, ["sigma", "residual", "Dprime", "gap"], args.format, out)
        return
    sys_ = _prime_system(args.m, table)
    target = constants.Dm(args.m, table, args.tol).value
    rows = []
    for u in args.us:
        r = asymptotics.lemma44_residual(sys_, u)
        rows.append({"u": u, "residual": r, "D": target, "gap": abs(r - target)})
    emit_table(rows, ["u", "residual", "D", "gap"], args.format, out)


def comparison_rows(m, xs, table, tol=constants.DEFAULT_TOL):
    K = constants.Km(m, table, tol).value
    rows = []
    for x in sorted(xs):
        exact = counting.count_M2m(m, x, table).value
        log_exact = _log_int(exact)
        log_asym = asymptotics.theorem1_logM(m, x, table, K=K)
        rows.append(ComparisonRow(
            x, exact, log_exact, log_asym, asymptotics.weak_logM(m, x), abs(log_exact - log_asym),
        ))
    return rows


def cmd_compare(args, table, out):
    rows = comparison_rows(args.m, args.xs, table, args.tol)
    fields = list(ComparisonRow.__dataclass_fields__)
    emit_table([asdict(r) for r in rows], fields, args.format, out)


def cmd_primes(args, table, out):
    if args.action == "nth":
        val = table.nth_prime(args.n)
    else:
        val = table.prime_pi(args.n)
    if args.format == "json":
        emit_json({args.action: args.n, "value": val}, out)
    else:
        out.write(f"{val}\n")


# -- parser ---------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS lets the global flags appear before or after the subcommand
    common.add_argument("--sieve-limit", type=parse_int, default=argparse.SUPPRESS,
                        help="largest sieved value (default 2^30 or $MATULA_SIEVE_LIMIT)")
    common.add_argument("--tol", type=parse_real, default=argparse.SUPPRESS,
                        help="target error for series constants (default 1e-8)")
    common.add_argument("--format", choices=["csv", "json"], default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="matula-asym", parents=[common],
                                description="Counting, Matula coding and asymptotics for the sets A_m.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        sp.set_defaults(func=func)
        return sp

    sp = add("count", cmd_count, help="exact M_{2,m}(x)")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--x", type=parse_int, required=True)

    sp = add("enumerate", cmd_enumerate, help="members of A_m up to x (x <= 1e7)")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--x", type=parse_int, required=True)

    sp = add("asym", cmd_asym, help="log of the strong and weak asymptotics at x")
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--x", type=parse_int, required=True)

    sp = add("constants", cmd_constants, help="constant reports as a JSON array")
    sp.add_argument("--m", type=int, default=2)

    sp = add("matula", cmd_matula, help="encode a tree or decode a code")
    sp.add_argument("action", choices=["encode", "decode"])
    sp.add_argument("value", help="tree notation such as '(()())' or a positive integer")

    sp = add("verify", cmd_verify, help="residual checks of the expansion machinery")
    sp.add_argument("check", choices=["lemma31", "lemma44", "hr"])
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--sigmas", type=_list_of(parse_real), default=[0.2, 0.1, 0.05, 0.02])
    sp.add_argument("--us", type=_list_of(parse_real), default=[50.0, 100.0, 200.0, 350.0])
    sp.add_argument("--u", type=parse_int, default=10)
    sp.add_argument("--integers", action="store_true",
                    help="lemma31 on lambda_k = k (unrestricted partitions)")

    sp = add("compare", cmd_compare, help="exact counts against the asymptotics")
    sp.add_argument("--m", type=int, default=2)
    sp.add_argument("--xs", type=_list_of(parse_int), required=True)

    sp = add("primes", cmd_primes, help="sieve queries")
    sp.add_argument("action", choices=["nth", "pi"])
    sp.add_argument("n", type=parse_int)
    return p


def run(argv=None, out=None, err=None):
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.tol = getattr(args, "tol", constants.DEFAULT_TOL)
    args.format = getattr(args, "format", "csv")
    limit = getattr(args, "sieve_limit", None)
    try:
        if args.tol <= 0:
            raise argparse.ArgumentTypeError("--tol must be > 0")
        table = default_table(limit if limit is not None else configured_sieve_limit())
    except (argparse.ArgumentTypeError, MatulaAsymError) as exc:
        err.write(f"matula-asym: error: {exc}\n")
        return 2
    try:
        args.func(args, table, out)
    except ParseError as exc:
        err.write(f"matula-asym: error: tree notation: {exc}\n")
        return 2
    except argparse.ArgumentTypeError as exc:
        err.write(f"matula-asym: error: {exc}\n")
        return 2
    except MatulaAsymError as exc:
        err.write(f"matula-asym: {type(exc).__name__}: {exc}\n")
        return 1
    return 0


def main():
    sys.exit(run())
