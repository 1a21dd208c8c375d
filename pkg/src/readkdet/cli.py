"""Command-line interface.

Exit codes are stable: 0 for success or a found witness, 1 for a verified
negative (exhausted search, non-admitting field, failed verification,
NotExpressible certificate), 2 for errors and exceeded budgets.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .construct import (
    classify_field_s42,
    perm6_projection,
    s42_witness,
    symmetric_support_matrix,
    sym_read_once,
)
from .errors import FieldNotAdmitting, ReadKDetError
from .field import FieldSpec
from .poly import mon_of, parse_polynomial
from .search import SearchConfig, certify_support, search_rod
from .symmat import SymbolicMatrix, load_matrix_json, symbolic_det
from .transform import ABP, abp_to_read_once, compress_read_once, derivative_minor, \
    reduce_to_affine, substitute_matrix


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _load_matrix(path: str):
    return load_matrix_json(Path(path).read_text())


def _cmd_det(args) -> int:
    m = _load_matrix(args.matrix)
    det = symbolic_det(m)
    print(det.text())
    print(_dump({"field": m.spec.name(), "nvars": m.nvars, "polynomial": det.text()}))
    return 0


def _cmd_verify(args) -> int:
    m = _load_matrix(args.matrix)
    if args.read_k is not None:
        if not isinstance(m, SymbolicMatrix):
            raise ReadKDetError("read-k verification needs a symbolic matrix")
        ok = m.verify_read_k(args.read_k)
        print(_dump({
            "read_k": args.read_k,
            "ok": ok,
            "multiplicities": {f"x{v}": c for v, c in sorted(m.multiplicities().items())},
        }))
        return 0 if ok else 1
    text = Path(args.poly).read_text()
    target = parse_polynomial(text, m.spec, nvars=m.nvars)
    ok = symbolic_det(m) == target
    print(_dump({"equal": ok}))
    return 0 if ok else 1


def _cmd_construct(args) -> int:
    spec = FieldSpec.from_name(args.field)
    if args.what == "sym":
        m = sym_read_once(args.n, args.d, spec)
    elif args.what == "mon":
        m = symmetric_support_matrix(args.n, args.d, spec)
    elif args.what == "s42":
        try:
            m = s42_witness(spec)
        except FieldNotAdmitting as exc:
            print(_dump({"admitting": False, "reason": str(exc)}))
            return 1
    else:
        m, verified = perm6_projection()
        if not verified:
            raise ReadKDetError("permanent projection failed verification")
    print(m.to_json())
    return 0


def _cmd_reduce(args) -> int:
    m = _load_matrix(args.matrix)
    if not isinstance(m, SymbolicMatrix):
        raise ReadKDetError("reductions start from a symbolic matrix")
    if args.mode == "affine":
        print(reduce_to_affine(m, args.k).to_json())
    else:
        print(compress_read_once(m).to_json())
    return 0


def _cmd_derive(args) -> int:
    m = _load_matrix(args.matrix)
    if not isinstance(m, SymbolicMatrix):
        raise ReadKDetError("derivatives need a symbolic matrix")
    variables = [int(v) for v in args.vars.split(",") if v]
    minor = derivative_minor(m, variables)
    if minor is None:
        print(_dump({"zero": True}))
    else:
        print(minor.to_json())
    return 0


def _cmd_subst(args) -> int:
    m = _load_matrix(args.matrix)
    if not isinstance(m, SymbolicMatrix):
        raise ReadKDetError("substitution needs a symbolic matrix")
    assignment = {}
    for setting in args.set:
        name, _, value = setting.partition("=")
        if not name.startswith("x") or not value:
            raise ReadKDetError(f"bad --set {setting!r}, expected x<i>=<value>")
        assignment[int(name[1:])] = m.spec.parse(value)
    print(substitute_matrix(m, assignment).to_json())
    return 0


def _cmd_abp2det(args) -> int:
    program = ABP.from_json(Path(args.abp).read_text())
    print(abp_to_read_once(program).to_json())
    return 0


def _cmd_classify(args) -> int:
    spec = FieldSpec.from_name(args.field)
    verdict = classify_field_s42(spec)
    print(_dump({
        "field": spec.name(),
        "admitting": verdict.admitting,
        "r": verdict.r.text() if verdict.r is not None else None,
        "reason": verdict.reason,
    }))
    return 0 if verdict.admitting else 1


def _cmd_search(args) -> int:
    spec = FieldSpec.from_name(args.field)
    text = Path(args.target).read_text()
    target = parse_polynomial(text, spec)
    config = SearchConfig(
        mon_of(target) if args.support_only else target,
        spec,
        max_size=args.max_size,
        seed=args.seed,
    )
    outcome = search_rod(config)
    print(_dump({
        "status": outcome.status,
        "witness": json.loads(outcome.witness.to_json()) if outcome.witness else None,
        "exhausted_size": outcome.exhausted_size,
        "nodes": outcome.nodes,
    }))
    if outcome.status == "found":
        return 0
    return 1 if outcome.status == "exhausted" else 2


def _cmd_certify(args) -> int:
    from .field import RATIONALS

    target = parse_polynomial(Path(args.monomials).read_text(), RATIONALS)
    cert = certify_support(mon_of(target))
    print(_dump(cert.to_json_obj()))
    return 1 if cert.verdict == "NotExpressible" else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="readkdet",
        description="Build, verify, transform and search read-k determinantal projections.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("det", help="determinant polynomial of a matrix JSON file")
    s.add_argument("matrix")
    s.set_defaults(fn=_cmd_det)

    s = sub.add_parser("verify", help="read-multiplicity or determinant-equality check")
    s.add_argument("--read-k", type=int, default=None)
    s.add_argument("--equals", action="store_true")
    s.add_argument("matrix")
    s.add_argument("poly", nargs="?", metavar="POLY_FILE")
    s.set_defaults(fn=_cmd_verify)

    s = sub.add_parser("construct", help="emit one of the explicit matrices")
    s.add_argument("what", choices=["sym", "mon", "s42", "perm6"])
    s.add_argument("n", type=int, nargs="?", default=0)
    s.add_argument("d", type=int, nargs="?", default=0)
    s.add_argument("--field", default="Q")
    s.set_defaults(fn=_cmd_construct)

    s = sub.add_parser("reduce", help="affine reduction or read-once compression")
    s.add_argument("mode", choices=["affine", "compress"])
    s.add_argument("--k", type=int, default=1)
    s.add_argument("matrix")
    s.set_defaults(fn=_cmd_reduce)

    s = sub.add_parser("derive", help="derivative minor of a read-once matrix")
    s.add_argument("matrix")
    s.add_argument("--vars", required=True, help="comma-separated variable indices")
    s.set_defaults(fn=_cmd_derive)

    s = sub.add_parser("subst", help="substitute variables by constants")
    s.add_argument("matrix")
    s.add_argument("--set", action="append", required=True, metavar="x<i>=<value>")
    s.set_defaults(fn=_cmd_subst)

    s = sub.add_parser("abp2det", help="occurrence-one ABP to read-once matrix")
    s.add_argument("abp")
    s.set_defaults(fn=_cmd_abp2det)

    s = sub.add_parser("classify", help="does the field admit the S_4^2 witness?")
    s.add_argument("--field", required=True)
    s.set_defaults(fn=_cmd_classify)

    s = sub.add_parser("search", help="exhaustive read-once witness search")
    s.add_argument("--target", required=True, metavar="POLY_FILE")
    s.add_argument("--field", required=True)
    s.add_argument("--max-size", type=int, default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--support-only", action="store_true")
    s.set_defaults(fn=_cmd_search)

    s = sub.add_parser("certify", help="fullness certificate for a monomial set")
    s.add_argument("monomials", metavar="MON_FILE")
    s.set_defaults(fn=_cmd_certify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        if (args.read_k is None) == (not args.equals):
            parser.error("verify needs exactly one of --read-k or --equals")
        if args.equals and args.poly is None:
            parser.error("verify --equals needs a polynomial file")
    try:
        return args.fn(args)
    except (ReadKDetError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
