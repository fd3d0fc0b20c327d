"""Command-line interface: one subcommand per engine operation.

Reports are emitted as deterministic JSON on stdout (sorted keys, fixed
formatting); ``--format text`` renders the same content as plain lines.
Exit codes: 0 pass, 1 mathematical failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .algebroid import SectionBasis, check_algebroid, operation_table
from .master import (
    EQUAL,
    N2_JACOBI,
    N3_BF,
    N3_CS,
    compare_identity_spans,
    extract_identities,
    transcribe_paper_identities,
    verify_structure_data,
)
from .models import ModelSpec, build_S0, build_S1_generic
from .modelfile import ModelFile, ParseError, parse_model
from .pstructure import PStructure, check_bv_identities
from .symalg import MissingSymbolError
from .worldsheet import (
    component_exprs,
    first_order_check,
    integrate,
    kinetic_master_check,
    theorem1_sum,
    theorem1_witness,
)

PASS, FAIL, USAGE = 0, 1, 2


def _spec_echo(spec: ModelSpec) -> dict:
    echo = {"n": spec.n, "d": spec.d, "flavor": spec.flavor,
            "blocks": [[b.p, b.rank] for b in sorted(spec.bf_blocks, key=lambda b: b.p)]}
    if spec.cs_block is not None:
        echo["cs_rank"] = spec.cs_block.rank
        echo["k"] = [[str(x) for x in row] for row in spec.cs_block.metric]
    return echo


def _report(command: str, spec: ModelSpec, passed: bool, details, witnesses, fmt: str) -> int:
    doc = {
        "command": command,
        "spec": _spec_echo(spec),
        "result": "pass" if passed else "fail",
        "details": details,
        "witnesses": witnesses,
    }
    if fmt == "json":
        sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write("%s: %s\n" % (command, doc["result"]))
        for item in details:
            sys.stdout.write("  %s\n" % item)
        for item in witnesses:
            sys.stdout.write("  witness: %s\n" % item)
    return PASS if passed else FAIL


def _require_data(mf: ModelFile, command: str):
    if mf.data is None:
        raise SystemExit2("%s requires a [data] section in the model file" % command)


class SystemExit2(Exception):
    """Usage-level error: exit code 2."""


def _cmd_check_bv(mf: ModelFile, args) -> int:
    p = PStructure.from_model(mf.spec)
    rep = check_bv_identities(p, trials=args.trials, seed=args.seed)
    details = ["%s: %s" % (law, "ok" if ok else "FAILED") for law, ok in sorted(rep.results.items())]
    details += ["note: %s" % note for note in rep.notes]
    return _report("check-bv", mf.spec, rep.passed, details, rep.failures, args.format)


def _cmd_check_master(mf: ModelFile, args) -> int:
    _require_data(mf, "check-master")
    p = PStructure.from_model(mf.spec)
    s1 = build_S1_generic(mf.spec)
    rep = verify_structure_data(p, s1, mf.data)
    details = ["(S1,S1) after substitution %s" % ("vanishes" if rep.passed else "does not vanish")]
    witnesses = ["%s: %s" % (mono, poly) for mono, poly in rep.residual]
    return _report("check-master", mf.spec, rep.passed, details, witnesses, args.format)


def _cmd_verify_data(mf: ModelFile, args) -> int:
    _require_data(mf, "verify-data")
    p = PStructure.from_model(mf.spec)
    s1 = build_S1_generic(mf.spec)
    idents = extract_identities(p, s1)
    details, witnesses = [], []
    passed = True
    for tag, poly in idents.equations:
        value = poly.substitute(mf.data.value_of)
        ok = not value
        passed = passed and ok
        details.append("%s: %s" % (tag, "ok" if ok else "FAILED"))
        if not ok and len(witnesses) < 10:
            witnesses.append("%s -> %s" % (tag, value))
    return _report("verify-data", mf.spec, passed, details, witnesses, args.format)


def _cmd_extract(mf: ModelFile, args) -> int:
    p = PStructure.from_model(mf.spec)
    s1 = build_S1_generic(mf.spec)
    idents = extract_identities(p, s1)
    details = ["%s: %s = 0" % (tag, poly) for tag, poly in idents.equations]
    return _report("extract-identities", mf.spec, True, details, [], args.format)


def _paper_family(spec: ModelSpec) -> str:
    if spec.n == 2 and not spec.bf_blocks:
        return N2_JACOBI
    if spec.n == 3 and spec.cs_block is not None:
        return N3_CS
    if spec.n == 3 and len(spec.bf_blocks) == 1 and spec.bf_blocks[0].p == 1:
        return N3_BF
    raise SystemExit2("no transcribed identity system for this model shape")


def _cmd_compare(mf: ModelFile, args) -> int:
    p = PStructure.from_model(mf.spec)
    s1 = build_S1_generic(mf.spec)
    ours = extract_identities(p, s1)
    if args.against == "paper":
        theirs = transcribe_paper_identities(_paper_family(mf.spec), mf.spec)
        label = "paper"
    else:
        with open(args.against, "r", encoding="utf-8") as fh:
            other = parse_model(fh.read())
        theirs = extract_identities(PStructure.from_model(other.spec), build_S1_generic(other.spec))
        label = args.against
    cmp = compare_identity_spans(ours, theirs)
    details = [
        "extracted equations: %d" % len(ours),
        "%s equations: %d" % (label, len(theirs)),
        "relation: %s" % cmp.relation,
    ]
    witnesses = [cmp.witness] if cmp.witness else []
    return _report("compare-identities", mf.spec, cmp.relation == EQUAL, details, witnesses, args.format)


def _cmd_check_algebroid(mf: ModelFile, args) -> int:
    _require_data(mf, "check-algebroid")
    p = PStructure.from_model(mf.spec)
    s1 = build_S1_generic(mf.spec)
    basis = SectionBasis.for_model(mf.spec)
    rep = check_algebroid(p, s1, mf.data, basis, seed=args.seed)
    details = ["%s: %s" % (name, "ok" if ok else "FAILED") for name, ok in rep.checks]
    return _report("check-algebroid", mf.spec, rep.passed, details, rep.witnesses, args.format)


def _cmd_derived_table(mf: ModelFile, args) -> int:
    p = PStructure.from_model(mf.spec)
    s1 = build_S1_generic(mf.spec)
    basis = SectionBasis.for_model(mf.spec)
    rows = operation_table(p, s1, basis)
    details = []
    for op, left, right, expr in rows:
        if op == "circ":
            details.append("%s o %s = %s" % (left, right, expr))
        elif op == "pair":
            details.append("<%s, %s> = %s" % (left, right, expr))
        else:
            details.append("rho(%s) %s = %s" % (left, right, expr))
    return _report("derived-table", mf.spec, True, details, [], args.format)


def _cmd_laplacian(mf: ModelFile, args) -> int:
    p = PStructure.from_model(mf.spec)
    s1 = build_S1_generic(mf.spec)
    expr = s1.expr
    if mf.data is not None:
        expr = expr.substitute(mf.data)
    value = p.laplacian(expr)
    details = [
        "Delta(S1) = %s" % value,
        "note: reported at finite-dimensional target level, not asserted zero",
    ]
    return _report("laplacian", mf.spec, True, details, [], args.format)


def _cmd_theorem1(mf: ModelFile, args) -> int:
    n = mf.spec.n
    details, witnesses = [], []
    passed = True
    for pf in (0, 1):
        for pg in (0, 1):
            fc = component_exprs(n, "F", pf)
            gc = component_exprs(n, "G", pg)
            total = theorem1_sum(n, fc, gc)
            t, w = theorem1_witness(n, fc, gc, with_d_preimage=True)
            exact = (total - t.delta0() - w.d()).is_zero()
            reduced = integrate(total - t.delta0()).is_zero()
            ok = exact and reduced
            passed = passed and ok
            details.append("parities (|F|,|G|)=(%d,%d): %s" % (pf, pg, "ok" if ok else "FAILED"))
            if not ok:
                witnesses.append("parities (%d,%d)" % (pf, pg))
    return _report("theorem1", mf.spec, passed, details, witnesses, args.format)


def _cmd_first_order(mf: ModelFile, args) -> int:
    s1 = build_S1_generic(mf.spec)
    rep = first_order_check(mf.spec, s1)
    details = ["%s: %s" % (mono, "ok" if ok else "FAILED") for mono, ok in rep.monomials]
    witnesses = [mono for mono, ok in rep.monomials if not ok]
    return _report("first-order", mf.spec, rep.passed, details, witnesses, args.format)


def _cmd_kinetic_master(mf: ModelFile, args) -> int:
    s0 = build_S0(mf.spec)
    rep = kinetic_master_check(mf.spec, s0.kinetic)
    return _report("kinetic-master", mf.spec, rep.passed, [rep.detail], [], args.format)


_COMMANDS = {
    "check-bv": _cmd_check_bv,
    "check-master": _cmd_check_master,
    "extract-identities": _cmd_extract,
    "compare-identities": _cmd_compare,
    "verify-data": _cmd_verify_data,
    "check-algebroid": _cmd_check_algebroid,
    "derived-table": _cmd_derived_table,
    "laplacian": _cmd_laplacian,
    "theorem1": _cmd_theorem1,
    "first-order": _cmd_first_order,
    "kinetic-master": _cmd_kinetic_master,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bvsigma",
        description="exact computations with graded BV structures of sigma models",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in sorted(_COMMANDS):
        cmd = sub.add_parser(name)
        cmd.add_argument("--model", required=True, help="path to a model file")
        cmd.add_argument("--seed", type=int, default=0, help="seed for randomized trials")
        cmd.add_argument("--trials", type=int, default=200, help="randomized trial count")
        cmd.add_argument("--format", choices=("json", "text"), default="json")
        if name == "compare-identities":
            cmd.add_argument(
                "--against",
                default="paper",
                help="'paper' or a path to another model file",
            )
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else PASS
    try:
        with open(args.model, "r", encoding="utf-8") as fh:
            mf = parse_model(fh.read())
    except FileNotFoundError:
        sys.stderr.write("error: no such model file: %s\n" % args.model)
        return USAGE
    except ParseError as exc:
        sys.stderr.write("error: %s: %s\n" % (args.model, exc))
        return USAGE
    try:
        return _COMMANDS[args.command](mf, args)
    except SystemExit2 as exc:
        sys.stderr.write("error: %s\n" % exc)
        return USAGE
    except (MissingSymbolError, ValueError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
