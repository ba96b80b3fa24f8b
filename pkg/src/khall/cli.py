"""Command-line entry point ``khall``.

Exit codes: 0 when a command succeeds (or its verification passes), 1 when a
verification fails or the kernel raises an error, 2 on usage or syntax errors.
The truncation order comes from ``--order``, then ``KHALL_ORDER``, then 8.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources

from . import __version__
from .distcalc import FormalDist, Series, default_order, expand, two_sided
from .errors import ExprSyntaxError, KhallError
from .kclass import KClass
from .laurent import LaurentPoly, RatFun
from .parser import evaluate
from .report import SCHEMA_VERSION
from .ring import ring_from_text
from .shuffle import ShuffleElement, from_expression
from .suites import DEFAULT_SEED, lemma_suite, residue_suite


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def load_schema() -> dict:
    text = resources.files("khall").joinpath("schema/report.schema.json").read_text()
    return json.loads(text)


def validate_report(report: dict) -> None:
    """Raise ``jsonschema.ValidationError`` if ``report`` does not match the schema."""
    import jsonschema

    jsonschema.validate(report, load_schema())


def _order(args) -> int:
    if getattr(args, "order", None) is not None:
        return args.order
    try:
        return default_order()
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _envelope(args, ring_label: str, result, passed=None, start=None) -> dict:
    out = {
        "schema_version": SCHEMA_VERSION,
        "command": " ".join(args.argv),
        "ring": ring_label,
        "order": _order(args),
        "result": result,
        "pass": passed,
        "timing_seconds": round(time.perf_counter() - start, 3) if start else 0.0,
    }
    return out


def _emit(args, report: dict, text: str):
    if args.json:
        validate_report(report)
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(text)


def _describe(value) -> dict:
    if isinstance(value, FormalDist):
        return {"kind": "distribution", "value": str(value), "coefficients": value.to_json()}
    if isinstance(value, Series):
        coeffs = {str(k): str(c) for k, c in sorted(value.coefficients().items())}
        return {"kind": "series", "value": str(value), "coefficients": coeffs}
    if isinstance(value, KClass):
        return {"kind": "kclass", "value": str(value), "rank": value.rank}
    if isinstance(value, RatFun):
        return {"kind": "rational", "value": str(value)}
    if isinstance(value, LaurentPoly):
        return {"kind": "polynomial", "value": str(value.normalized())}
    return {"kind": type(value).__name__, "value": str(value)}


def cmd_eval(args):
    start = time.perf_counter()
    value, ring = evaluate(args.expr, ring_from_text(args.ring), _order(args))
    result = _describe(value)
    _emit(args, _envelope(args, args.ring, result, None, start), result["value"])
    return 0


def cmd_expand(args):
    start = time.perf_counter()
    N = _order(args)
    value, ring = evaluate(args.expr, ring_from_text(args.ring), N)
    if isinstance(value, LaurentPoly):
        value = RatFun(value)
    if not isinstance(value, RatFun):
        raise KhallError("expand expects a rational function")
    if args.at == "both":
        dist = two_sided(value, args.var, N)
        result = {"kind": "distribution", "value": str(dist), "coefficients": dist.to_json()}
        _emit(args, _envelope(args, args.ring, result, None, start), str(dist))
        return 0
    series = expand(value, args.var, args.at, N)
    coeffs = series.coefficients()
    if coeffs:
        lo, hi = min(coeffs), max(coeffs)
        ks = range(lo, hi + 1) if args.at == "zero" else range(hi, lo - 1, -1)
        listing = [str(series.coefficient(k).normalized()) for k in ks]
    else:
        ks, listing = [], []
    result = {
        "kind": "series",
        "var": args.var,
        "at": args.at,
        "exponents": list(ks),
        "list": listing,
        "coefficients": {str(k): str(c.normalized()) for k, c in sorted(coeffs.items())},
        "window": list(series.window),
    }
    text = f"coefficients of {args.var}^k, k = {', '.join(map(str, ks))}:\n[{', '.join(listing)}]"
    _emit(args, _envelope(args, args.ring, result, None, start), text)
    return 0


def cmd_shuffle(args):
    start = time.perf_counter()
    n, m = args.degrees if args.degrees else (None, None)
    f = from_expression(args.left, n)
    g = from_expression(args.right, m)
    prod: ShuffleElement = f * g
    result = {"kind": "shuffle", "degrees": [f.degree, g.degree], **prod.to_json()}
    _emit(args, _envelope(args, "Z", result, None, start), str(prod).replace(" ", ""))
    return 0


def _run_report(args, report, ring_label):
    payload = _envelope(args, ring_label, report.to_json(), report.passed)
    payload["timing_seconds"] = round(report.timing, 3)
    _emit(args, payload, report.summary())
    return 0 if report.passed else 1


def cmd_residue(args):
    report = residue_suite(args.seed, args.count, _order(args))
    return _run_report(args, report, "free")


def cmd_verify(args):
    from .hall import verify_commutator

    if args.what == "commutator":
        report = verify_commutator(args.rank, args.ring, _order(args), args.model)
        return _run_report(args, report, args.ring)
    report = lemma_suite(args.seed, args.count, _order(args))
    return _run_report(args, report, "free")


def cmd_weyl(args):
    from .hall import weyl_rank_check

    start = time.perf_counter()
    absolute, raw = weyl_rank_check(args.d)
    passed = absolute == args.d
    result = {
        "kind": "weyl-rank",
        "d": args.d,
        "rank": absolute,
        "signed": raw,
        "notes": [
            "only the pushforward along the surface is modelled; the moduli-direction factor is an opaque scalar",
            "the signed value is reported as computed; the rank is its absolute value",
        ],
    }
    text = f"rank {absolute} (signed value {raw}); expected {args.d}: {'PASS' if passed else 'FAIL'}"
    _emit(args, _envelope(args, "P2", result, passed, start), text)
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="khall", description="Exact K-theoretic formal distribution calculus.")
    p.add_argument("--version", action="version", version=f"khall {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, ring=True):
        sp.add_argument("--order", type=int, default=None, help="truncation order (default: $KHALL_ORDER or 8)")
        sp.add_argument("--json", action="store_true", help="print a JSON report")
        if ring:
            sp.add_argument("--ring", default="free", help="ring preset or inline presentation")

    sp = sub.add_parser("eval", help="evaluate an expression")
    sp.add_argument("expr")
    common(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("expand", help="expand a rational function at 0, infinity or both")
    sp.add_argument("expr")
    sp.add_argument("--var", required=True)
    sp.add_argument("--at", choices=["inf", "zero", "both"], required=True)
    common(sp)
    sp.set_defaults(func=cmd_expand)

    sp = sub.add_parser("shuffle", help="shuffle product of two symmetric Laurent polynomials")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--degrees", type=int, nargs=2, metavar=("N", "M"))
    common(sp, ring=False)
    sp.set_defaults(func=cmd_shuffle)

    sp = sub.add_parser("residue-check", help="randomized exchange-defect check")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--count", type=int, default=12)
    common(sp, ring=False)
    sp.set_defaults(func=cmd_residue)

    sp = sub.add_parser("verify", help="run a verification pipeline")
    sp.add_argument("what", choices=["commutator", "lemma-calculation"])
    sp.add_argument("--rank", type=int, default=1)
    sp.add_argument("--ring", choices=["free", "p2"], default="free")
    sp.add_argument("--model", choices=["split", "torsion"], default="split")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--count", type=int, default=12)
    common(sp, ring=False)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("weyl-rank", help="rank check on the projective plane")
    sp.add_argument("--d", type=int, required=True)
    common(sp, ring=False)
    sp.set_defaults(func=cmd_weyl)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required")
        if getattr(args, "order", None) is not None and args.order < 0:
            raise UsageError("--order must be non-negative")
        if getattr(args, "d", None) is not None and args.d < 1:
            raise UsageError("--d must be positive")
        args.argv = argv
        _order(args)
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"khall: error: {exc}", file=sys.stderr)
        return 2
    except ExprSyntaxError as exc:
        print(f"khall: syntax error: {exc}", file=sys.stderr)
        return 2
    except KhallError as exc:
        print(f"khall: error[{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
