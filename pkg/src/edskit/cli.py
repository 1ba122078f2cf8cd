"""The ``eds`` command.

Exit codes: 0 ok, 1 analysis failure or expected-value mismatch, 2 parse or
usage error.  ``EDS_SEED`` overrides the default flag-search seed 0.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import analyze_document, default_seed, run_corpus
from .dsl import load, to_dsl
from .errors import EdsError, ParseError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _load(path: str):
    p = Path(path)
    if not p.is_file():
        raise _Usage(f"no such file: {path}")
    return load(p)


class _Usage(Exception):
    pass


def _emit(report, fmt: str, timing: bool):
    if not timing:
        report = report.without_timing()
    if fmt == "json":
        print(report.to_json())
    else:
        print(report.to_text(), end="")


def cmd_check(args) -> int:
    doc = _load(args.file)
    report = analyze_document(doc, seed=args.seed)
    _emit(report, args.format, args.timing)
    failed = [i for i in report.identities if i["status"] == "fails"]
    return EXIT_FAIL if failed else EXIT_OK


def _form_text(f) -> str:
    from .dsl import _form_source
    return _form_source(f)


def cmd_tableau(args) -> int:
    from .structeq import analyze

    doc = _load(args.file)
    if doc.system is None:
        raise _Usage(f"{args.file} has no structure equations")
    rep = analyze(doc.system, seed=args.seed)
    if rep.tableau is None:
        print(f"{doc.name}: {rep.mode} system has no tableau of free derivatives")
        return EXIT_OK
    tab = rep.tableau
    inv = rep.involutivity
    if args.format == "json":
        from .report import _flag_json
        out = {
            "entry": doc.name, "mode": rep.mode, "w_dim": tab.w_dim, "v_dim": tab.v_dim,
            "degree": tab.degree, "dim": tab.dim,
            "characters": list(inv.characters.s), "prolongation": inv.dim_prolongation,
            "bound": inv.bound, "involutive": inv.involutive,
            "flag": _flag_json(inv.flag_used.basis),
            "characteristic_directions": [doc.system.coframe[j] for j in inv.characteristic_directions],
        }
        print(json.dumps(out, indent=2))
        return EXIT_OK
    labels = doc.system.coframe
    # TYPE_A tableaux take values in V itself, free-derivative tableaux in the parameters
    wlabels = labels if rep.mode == "TYPE_A" else doc.system.vars.params
    print(f"{doc.name}: {rep.mode} tableau, dim {tab.dim}, degree {tab.degree} on {tab.v_dim} directions")
    for k, forms in enumerate(tab.as_forms(labels), start=1):
        parts = [f"{wlabels[w]} -> {_form_text(f)}" for w, f in enumerate(forms) if f.coeffs]
        print(f"  generator {k}: " + "; ".join(parts))
    print(f"characters:  {inv.characters.s}")
    print(f"dim A^(1):   {inv.dim_prolongation}  (bound {inv.bound})")
    print(f"verdict:     {inv.verdict}")
    if inv.characteristic_directions:
        print("characteristic directions: " + " ".join(labels[j] for j in inv.characteristic_directions))
    return EXIT_OK


def cmd_point(args) -> int:
    doc = _load(args.file)
    if not doc.ideals:
        raise _Usage(f"{args.file} has no 'ideal' block")
    report = analyze_document(doc, seed=args.seed)
    _emit(report, args.format, args.timing)
    return EXIT_OK


def cmd_prolong(args) -> int:
    from .structeq import prolong_structure

    doc = _load(args.file)
    if doc.system is None:
        raise _Usage(f"{args.file} has no structure equations")
    if args.k < 1:
        raise _Usage("--k must be at least 1")
    sys_ = doc.system
    for _ in range(args.k):
        sys_ = prolong_structure(sys_)
    print(to_dsl(sys_), end="")
    return EXIT_OK


def cmd_hstruct(args) -> int:
    from .hstruct import LieSubalgebra, emit_structure_text

    doc = _load(args.file)
    if not doc.algebras:
        raise _Usage(f"{args.file} has no 'algebra' block")
    if args.emit:
        print(emit_structure_text(LieSubalgebra.from_spec(doc.algebras[0])), end="")
        return EXIT_OK
    report = analyze_document(doc, seed=args.seed)
    _emit(report, args.format, args.timing)
    agree = [i for i in report.identities if i["status"] == "fails"]
    return EXIT_FAIL if agree else EXIT_OK


def cmd_corpus_run(args) -> int:
    summary = run_corpus(args.filter, args.seed, args.jobs)
    if not args.timing:
        for r in summary.results:
            if r.report is not None:
                r.report = r.report.without_timing()
    if args.format == "json":
        out = {
            "entries": len(summary.results),
            "passed": sum(r.passed for r in summary.results),
            "results": [
                {"name": r.name, "passed": r.passed, "diffs": r.diffs, "error": r.error,
                 "report": r.report.to_dict() if r.report else None}
                for r in summary.results
            ],
        }
        print(json.dumps(out, indent=2))
    else:
        print(summary.table(), end="")
    return summary.exit_code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eds", description="Exterior differential systems toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=True):
        sp.add_argument("--seed", type=int, default=None, help="flag-search seed (default: $EDS_SEED or 0)")
        if fmt:
            sp.add_argument("--format", choices=("json", "text"), default="text")
            sp.add_argument("--no-timing", dest="timing", action="store_false",
                            help="report ms as 0 for reproducible output")

    sp = sub.add_parser("check", help="structure-equation identities and the full analysis")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("tableau", help="tableau, characters and Cartan's test")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(func=cmd_tableau)

    sp = sub.add_parser("point", help="polar spaces and the ordinary test for an ideal at a point")
    sp.add_argument("file")
    common(sp)
    sp.set_defaults(func=cmd_point)

    sp = sub.add_parser("prolong", help="print the prolonged structure equations")
    sp.add_argument("file")
    sp.add_argument("--k", type=int, default=1, help="number of prolongations")
    common(sp, fmt=False)
    sp.set_defaults(func=cmd_prolong)

    sp = sub.add_parser("hstruct", help="torsion-free H-structure analysis of an algebra block")
    sp.add_argument("file")
    sp.add_argument("--emit", action="store_true", help="print the structure equations instead")
    common(sp)
    sp.set_defaults(func=cmd_hstruct)

    sp = sub.add_parser("corpus", help="bundled example corpus")
    csub = sp.add_subparsers(dest="corpus_command", required=True)
    run = csub.add_parser("run", help="run the corpus against its expected values")
    run.add_argument("--filter", default="*", help="glob on entry names")
    run.add_argument("--jobs", type=int, default=1)
    common(run)
    run.set_defaults(func=cmd_corpus_run)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.seed is None:
        try:
            args.seed = default_seed()
        except EdsError as exc:
            print(f"eds: {exc}", file=sys.stderr)
            return EXIT_USAGE
    if getattr(args, "jobs", 1) < 1:
        print("eds: --jobs must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"eds: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"eds: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EdsError as exc:
        print(f"eds: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
