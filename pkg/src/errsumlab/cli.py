"""Command-line front end.

Exit codes: 0 success, 1 identity mismatch, 2 usage or parse error,
3 precision failure after the escalation cap.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys

from . import identities
from .constexpr import ParseError, parse
from .contfrac import convergents_from_quotients, erfint_cf, extract_cf
from .errorsum import error_sum_abs
from .numerics import (
    DomainError,
    Enclosure,
    PrecisionError,
    agreed_digits,
    endpoint_strings,
    format_decimal,
    gauss_integral,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_PRECISION = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--digits", type=_positive, default=None, help="target decimal digits (default 30)")
    common.add_argument("--terms", type=_positive, default=20, help="number of terms (default 20)")
    common.add_argument("--format", choices=("text", "json"), default="text")

    parser = _Parser(prog="errsumlab", description="Error sums of continued fractions, verified rigorously.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("expand", parents=[common], help="partial quotients of a constant")
    p.add_argument("expr")
    p = sub.add_parser("convergents", parents=[common], help="convergents p_n/q_n")
    p.add_argument("expr")
    p = sub.add_parser("errsum", parents=[common], help="error sum sum |q_n a - p_n|")
    p.add_argument("expr")
    p = sub.add_parser("gencf", parents=[common], help="generalized continued fraction presets")
    p.add_argument("--preset", choices=("erfint",), required=True)
    p = sub.add_parser("verify", parents=[common], help="verify registry identities")
    p.add_argument("id", nargs="?")
    p.add_argument("--all", action="store_true")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUES")
    p.add_argument("--jobs", type=_positive, default=None, help="worker processes (default: CPU count)")
    sub.add_parser("list", parents=[common], help="list registry identities")
    return parser


def _emit(data, fmt: str, text: str):
    if fmt == "json":
        print(json.dumps(data, indent=2))
    else:
        print(text)


def cmd_expand(args) -> int:
    quotients = extract_cf(parse(args.expr), args.terms)
    _emit({"expr": args.expr, "quotients": quotients}, args.format, " ".join(map(str, quotients)))
    return EXIT_OK


def cmd_convergents(args) -> int:
    quotients = extract_cf(parse(args.expr), args.terms)
    convs = convergents_from_quotients(quotients, args.terms)
    _emit(
        [{"n": c.index, "p": str(c.p), "q": str(c.q)} for c in convs],
        args.format,
        "\n".join(f"{c.index} {c.p} {c.q}" for c in convs),
    )
    return EXIT_OK


def _verified_decimal(enc: Enclosure, digits: int) -> tuple[str, int]:
    places = agreed_digits(enc, cap=digits)
    return format_decimal(enc.mid, places, "truncate"), places


def cmd_errsum(args) -> int:
    digits = args.digits or 30
    result = error_sum_abs(parse(args.expr), digits)
    value, places = _verified_decimal(result.value, digits)
    lo, hi = endpoint_strings(result.value, digits + 5)
    data = {
        "expr": args.expr,
        "digits": digits,
        "value": value,
        "agreed_digits": places,
        "lo": lo,
        "hi": hi,
        "±": format_decimal(result.value.width / 2, digits + 5, "up"),
        "terms_used": result.terms_used,
        "tail_bound": format_decimal(result.tail_bound, digits + 5, "up"),
    }
    _emit(data, args.format, value)
    return EXIT_OK


def cmd_gencf(args) -> int:
    digits = args.digits or 30
    enc = erfint_cf(args.terms)
    reference = gauss_integral(1, digits + 1)
    agree = agreed_digits(enc, reference, cap=digits)
    ok = enc.intersects(reference)
    lo, hi = endpoint_strings(enc, digits + 5)
    ref_lo, ref_hi = endpoint_strings(reference, digits + 5)
    data = {
        "preset": args.preset,
        "terms": args.terms,
        "cf": [lo, hi],
        "gauss_integral": [ref_lo, ref_hi],
        "agreed_digits": agree,
        "consistent": ok,
        "status": identities.EMPIRICAL,
    }
    text = (
        f"cf      [{lo}, {hi}]\n"
        f"I(1)    [{ref_lo}, {ref_hi}]\n"
        f"agreed_digits {agree} ({'consistent' if ok else 'DISJOINT'}, empirical)"
    )
    _emit(data, args.format, text)
    return EXIT_OK if ok else EXIT_MISMATCH


def _parse_values(name: str, text: str) -> list[int]:
    try:
        if ".." in text:
            low, high = text.split("..", 1)
            values = list(range(int(low), int(high) + 1))
        else:
            values = [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"bad value {text!r} for parameter {name!r}")
    if not values:
        raise UsageError(f"empty range {text!r} for parameter {name!r}")
    return values


def parse_params(identity: identities.Identity, items: list[str]) -> list[dict]:
    """Expand ``NAME=VALUES`` overrides into the Cartesian parameter grid.

    Parameters not overridden keep their default grid.
    """
    overrides: dict[str, list[int]] = {}
    for item in items:
        name, sep, values = item.partition("=")
        if not sep or not name:
            raise UsageError(f"--param expects NAME=VALUES, got {item!r}")
        overrides[name.strip()] = _parse_values(name, values.strip())
    known = {p.name: p for p in identity.params}
    for name in overrides:
        if name not in known:
            raise UsageError(f"{identity.id} has no parameter {name!r}")
    axes = [overrides.get(p.name, list(p.grid)) for p in identity.params]
    names = [p.name for p in identity.params]
    return [dict(zip(names, combo)) for combo in itertools.product(*axes)]


def _report_line(report: identities.IdentityReport) -> str:
    params = ",".join(f"{k}={v}" for k, v in report.params.items())
    label = f"{report.id}({params})" if params else report.id
    verdict = "PASS" if report.passed else "FAIL"
    line = f"{verdict} {label} digits={report.digits} agreed={report.agreed_digits} status={report.status}"
    if report.lhs is not None:
        value, _ = _verified_decimal(Enclosure.hull_of(report.lhs, report.rhs or report.lhs), report.digits)
        line += f" value={value}"
    if report.diagnostic:
        line += f" ({report.diagnostic})"
    return line


def cmd_verify(args) -> int:
    if args.all == bool(args.id):
        raise UsageError("verify needs exactly one of <id> or --all")
    if args.all:
        if args.param:
            raise UsageError("--param cannot be combined with --all")
        jobs_list = identities.plan(args.digits)
    else:
        try:
            identity = identities.get(args.id)
        except identities.UnknownIdentity:
            raise UsageError(f"unknown identity {args.id!r}")
        grid = parse_params(identity, args.param)
        for params in grid:
            identity.validate(params)
        jobs_list = [(identity.id, params, args.digits) for params in grid]
    jobs = args.jobs or identities.default_jobs()
    reports = identities.verify_many(jobs_list, jobs)
    _emit([r.to_json() for r in reports], args.format, "\n".join(_report_line(r) for r in reports))
    if all(r.passed for r in reports):
        return EXIT_OK
    if any(r.lhs is not None and r.rhs is not None and not r.passed for r in reports):
        return EXIT_MISMATCH
    return EXIT_PRECISION


def cmd_list(args) -> int:
    entries = []
    lines = []
    for identity in identities.registry():
        grid = {p.name: list(p.grid) for p in identity.params}
        entries.append({"id": identity.id, "status": identity.status, "params": grid, "description": identity.description})
        grid_text = " ".join(f"{k}={','.join(map(str, v))}" for k, v in grid.items())
        lines.append(f"{identity.id:16} {identity.status:9} {grid_text}".rstrip())
    _emit(entries, args.format, "\n".join(lines))
    return EXIT_OK


COMMANDS = {
    "expand": cmd_expand,
    "convergents": cmd_convergents,
    "errsum": cmd_errsum,
    "gencf": cmd_gencf,
    "verify": cmd_verify,
    "list": cmd_list,
}


def _fail(code: int, message: str) -> int:
    print(f"errsumlab: error: {' '.join(str(message).split())}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail(EXIT_USAGE, exc)
    except ParseError as exc:
        return _fail(EXIT_USAGE, f"cannot parse expression: {exc}")
    except identities.ParameterError as exc:
        return _fail(EXIT_USAGE, exc)
    except DomainError as exc:
        return _fail(EXIT_USAGE, f"domain error: {exc}")
    except PrecisionError as exc:
        return _fail(EXIT_PRECISION, f"precision failure: {exc}")


if __name__ == "__main__":
    sys.exit(main())
