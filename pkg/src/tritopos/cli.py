"""Command line front door: load inputs, run a named suite, emit a report.

Every suite prints one line per check and, with --json OUT, writes the
full report as JSON. Reports are deterministic for a fixed config and
seed apart from elapsed-time fields. Exit codes: 0 all checks pass, 1
at least one check failed, 2 usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (BoundExceeded, NotFinitelyContinuous, ParseError,
                     TritoposError, ValidationError)
from .exact_completion import (check_category_laws, check_finite_continuity,
                               counit_check, default_resolver,
                               finset_category, global_sections, kan_extend,
                               kan_unit, per_topos_category, quotient,
                               validate_pseudoeq)
from .formats import load_algebra, load_per, load_pseq
from .heyting import validate_heyting
from .per_topos import enumerate_pers, is_diagonal, nabla
from .report import FAIL, PASS, SKIPPED, Report
from .resolvent import (check_resolution, default_probe_assemblies,
                        orthogonality_test, sigma_resolution,
                        subobject_tripos_iso)
from .tripos import all_maps, canonical_set, validate_tripos


def _heyting_check(args) -> Report:
    try:
        algebra = load_algebra(args.heyting)
    except (ParseError, ValidationError):
        raise
    except TritoposError as exc:
        # the candidate fails an algebra law; that is this suite's finding
        report = Report(config={"heyting": args.heyting})
        report.add("heyting.build", FAIL,
                   witness={"error": type(exc).__name__,
                            "detail": str(exc),
                            "counterexample": exc.witness})
        return report
    report = validate_heyting(algebra)
    report.config["heyting"] = args.heyting
    return report


def _tripos_verify(args) -> Report:
    algebra = load_algebra(args.heyting)
    report = validate_tripos(algebra, max_set=args.max_set,
                             predicate_cap=args.predicate_cap,
                             seed=args.seed)
    report.config["heyting"] = args.heyting
    return report


def _topos_laws(args) -> Report:
    algebra = load_algebra(args.heyting)
    objects = []
    for size in range(args.max_carrier + 1):
        objects.extend(enumerate_pers(algebra, canonical_set(size)))
    cat = per_topos_category(algebra)
    report = check_category_laws(cat, objects, max_triples=args.max_triples,
                                 seed=args.seed)
    report.config["heyting"] = args.heyting
    report.config["max_carrier"] = args.max_carrier
    return report


def _resolve(args) -> Report:
    algebra = load_algebra(args.heyting)
    per = load_per(algebra, args.object)
    res = sigma_resolution(per, name_bound=args.predicate_cap)
    probes = default_probe_assemblies(algebra, max_carrier=args.probe_bound)
    report = check_resolution(res, probes=probes)
    report.config["heyting"] = args.heyting
    report.config["object"] = str(args.object)
    return report


def _kan(args) -> Report:
    algebra = load_algebra(args.heyting)
    per = load_per(algebra, args.object)
    source = per_topos_category(algebra)
    target = finset_category()
    functor = global_sections(source, target)
    report = Report(config={"heyting": args.heyting,
                            "object": str(args.object),
                            "functor": args.functor})
    probes = [nabla(algebra, canonical_set(k)) for k in range(3)]
    try:
        report.extend(check_finite_continuity(functor, probes))
    except NotFinitelyContinuous as exc:
        for failed in exc.witness:
            report.add(failed["check"], FAIL)
        return report
    if is_diagonal(per):
        ext, _eta, iso = kan_unit(functor, per)
        report.add("kan.unit_iso", PASS if iso else FAIL,
                   witness={"iso": iso})
    else:
        ext = kan_extend(functor, per)
        report.add("kan.unit_iso", SKIPPED,
                   witness={"reason": "object is not an assembly"})
    report.add("kan.extension", PASS, witness={"size": len(ext.obj)})
    report.extend(counit_check(functor, [default_resolver(per)], source))
    return report


def _quotient(args) -> Report:
    algebra = load_algebra(args.heyting) if args.heyting else None
    category, x1, x0, d0, d1 = load_pseq(args.pseq, algebra=algebra)
    if args.category and args.category != category:
        raise ParseError(f"{args.pseq} holds a {category!r} record, not "
                         f"{args.category!r}")
    cat = (finset_category() if category == "finset"
           else per_topos_category(algebra))
    report = Report(config={"pseq": str(args.pseq), "category": category})
    try:
        pseq = validate_pseudoeq(cat, x1, x0, d0, d1)
    except ValidationError as exc:
        report.add("quotient.pseudoequivalence", FAIL, witness=exc.witness)
        return report
    report.add("quotient.pseudoequivalence", PASS)
    result = quotient(pseq)
    report.add("quotient.cover_regular_epi",
               PASS if cat.is_regular_epi(result.cover) else FAIL)
    if category == "finset":
        witness = {"classes": [list(c) for c in result.obj.elements]}
    else:
        witness = {"carrier": list(result.obj.carrier.elements)}
    report.add("quotient.result", PASS, witness=witness)
    return report


def _ortho(args) -> Report:
    cat = finset_category()
    sizes = range(args.max_set + 1)
    sets_a = [canonical_set(k, prefix="a") for k in sizes]
    sets_b = [canonical_set(k, prefix="b") for k in sizes]
    covers = [f for a in sets_a for b in sets_b for f in all_maps(a, b)
              if f.is_surjective()]
    monos = [f for a in sets_a for b in sets_b for f in all_maps(a, b)
             if f.is_injective()]
    report = Report(config={"max_set": args.max_set,
                            "covers": len(covers), "monos": len(monos)})
    failure = None
    checked = 0
    for left in covers:
        for right in monos:
            checked += 1
            ok, witness = orthogonality_test(left, right, cat)
            if not ok:
                failure = {"left": cat.describe(left),
                           "right": cat.describe(right), **witness}
                break
        if failure:
            break
    report.add("ortho.covers_vs_monos", PASS if failure is None else FAIL,
               witness=failure or {"pairs_checked": checked})

    counterexample = None
    for left in monos:
        for right in monos:
            ok, witness = orthogonality_test(left, right, cat)
            if not ok:
                counterexample = {"left": cat.describe(left),
                                  "right": cat.describe(right), **witness}
                break
        if counterexample:
            break
    report.add("ortho.monos_not_left_orthogonal",
               PASS if counterexample is not None else FAIL,
               witness=counterexample
               or {"reason": "no failing mono pair in range"})
    return report


def _sub_nabla_iso(args) -> Report:
    algebra = load_algebra(args.heyting)
    report = Report(config={"heyting": args.heyting,
                            "max_set": args.max_set})
    for size in range(args.max_set + 1):
        partial = subobject_tripos_iso(algebra, canonical_set(size),
                                       predicate_bound=args.predicate_cap)
        for c in partial.checks:
            report.add(f"{c.check}.size_{size}", c.status, c.witness,
                       c.elapsed_ms)
    return report


SUITES = {
    "heyting-check": _heyting_check,
    "tripos-verify": _tripos_verify,
    "topos-laws": _topos_laws,
    "resolve": _resolve,
    "kan": _kan,
    "quotient": _quotient,
    "ortho": _ortho,
    "sub-nabla-iso": _sub_nabla_iso,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tritopos",
        description="Exhaustive desk-scale checks for toposes built from "
                    "finite algebra-valued triposes.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, *, heyting=False, flags=()):
        p = sub.add_parser(name, help=help_text)
        if heyting:
            p.add_argument("--heyting", required=True,
                           help="bundled algebra name or JSON path")
        if "max-set" in flags:
            p.add_argument("--max-set", type=int, default=2,
                           help="largest base set size in sweeps")
        if "max-carrier" in flags:
            p.add_argument("--max-carrier", type=int, default=2,
                           help="largest object carrier in sweeps")
        if "probe-bound" in flags:
            p.add_argument("--probe-bound", type=int, default=2,
                           help="largest probe assembly carrier")
        if "predicate-cap" in flags:
            p.add_argument("--predicate-cap", type=int, default=10 ** 4,
                           help="largest admitted predicate name space")
        if "seed" in flags:
            p.add_argument("--seed", type=int, default=None,
                           help="seed for sampled sweeps")
        if "object" in flags:
            p.add_argument("--object", required=True,
                           help="path of a .per object file")
        p.add_argument("--json", dest="json_out", default=None,
                       metavar="OUT", help="write the JSON report here")
        return p

    add("heyting-check", "validate the lattice and implication tables",
        heyting=True)
    add("tripos-verify", "check the predicate-calculus laws on small sets",
        heyting=True, flags=("max-set", "predicate-cap", "seed"))
    laws = add("topos-laws", "check category laws over small objects",
               heyting=True, flags=("max-carrier", "seed"))
    laws.add_argument("--max-triples", type=int, default=10 ** 5,
                      help="sample above this many composable triples")
    add("resolve", "build and check the name-space resolution of an object",
        heyting=True, flags=("object", "probe-bound", "predicate-cap"))
    kan = add("kan", "extend a set-valued functor along the assemblies "
              "embedding at an object",
              heyting=True, flags=("object",))
    kan.add_argument("--functor", default="global-sections",
                     choices=["global-sections"],
                     help="functor to extend")
    quot = add("quotient", "coequalize a pseudoequivalence span from a file")
    quot.add_argument("--pseq", required=True,
                      help="path of a .pseq span file")
    quot.add_argument("--category", default=None,
                      choices=["finset", "btopos"],
                      help="expected instance named in the file")
    quot.add_argument("--heyting", default=None,
                      help="algebra for btopos records")
    ortho = add("ortho", "orthogonality sweeps over finite sets")
    ortho.add_argument("--max-set", type=int, default=3,
                       help="largest set size in the sweep")
    add("sub-nabla-iso", "compare predicates with subobjects of constant "
        "objects", heyting=True, flags=("max-set", "predicate-cap"))
    return parser


def render(report: Report, stream=None) -> None:
    out = stream or sys.stdout
    for c in report.checks:
        line = f"{c.status:<7s} {c.check}"
        if c.status != PASS and c.witness is not None:
            line += f"  witness={json.dumps(c.witness, default=str)}"
        print(line, file=out)
    total = len(report.checks)
    failed = len(report.failures())
    print(f"{total - failed}/{total} checks passed", file=out)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        report = SUITES[args.command](args)
    except (ParseError, ValidationError, BoundExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if getattr(exc, "witness", None) is not None:
            print(f"witness: {json.dumps(exc.witness, default=str)}",
                  file=sys.stderr)
        return 2
    render(report)
    if args.json_out:
        Path(args.json_out).write_text(report.to_json() + "\n")
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
