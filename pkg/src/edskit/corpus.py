"""The bundled example corpus and its runner.

``corpus/manifest.json`` lists every entry with its DSL file, the expected
mode and the expected exact values.  ``run_entry`` analyzes one entry and
diffs the report against the expectations; ``run_corpus`` does this for a
filtered set, optionally in a process pool, and returns results in manifest
order.
"""

from __future__ import annotations

import fnmatch
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .dsl import Document, load
from .errors import EdsError
from .report import Report, from_analysis, from_hstruct, from_point

__all__ = ["CorpusEntry", "EntryResult", "CorpusSummary", "corpus_dir", "load_manifest",
           "analyze_document", "run_entry", "run_corpus", "compare", "default_seed"]


def default_seed() -> int:
    """Seed from ``EDS_SEED`` (default 0)."""
    raw = os.environ.get("EDS_SEED", "").strip()
    if not raw:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise EdsError(f"EDS_SEED must be an integer, got {raw!r}") from None


def corpus_dir() -> Path:
    return Path(str(resources.files("edskit") / "corpus"))


@dataclass
class CorpusEntry:
    name: str
    dsl_file: str
    mode: str
    expected: dict
    citation: str
    sample_points: int = 0

    @property
    def path(self) -> Path:
        return corpus_dir() / self.dsl_file


def _check_exact(value, where):
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"{where}: expected values must be exact integers or strings")
    if isinstance(value, dict):
        for k, v in value.items():
            _check_exact(v, f"{where}.{k}")
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _check_exact(v, f"{where}[{i}]")


def load_manifest(path: str | Path | None = None) -> list[CorpusEntry]:
    path = Path(path) if path else corpus_dir() / "manifest.json"
    data = json.loads(path.read_text(encoding="utf-8"))
    out = []
    for raw in data["entries"]:
        _check_exact(raw.get("expected", {}), raw["name"])
        if not raw.get("citation"):
            raise ValueError(f"entry {raw['name']} has no citation")
        out.append(CorpusEntry(raw["name"], raw["file"], raw["mode"], raw.get("expected", {}),
                               raw["citation"], raw.get("sample_points", 0)))
    return out


# ---------------------------------------------------------------------------------
# analysis dispatch


def analyze_document(doc: Document, name: str | None = None, seed: int = 0) -> Report:
    """Run the analysis appropriate to the document's content."""
    from .hstruct import LieSubalgebra, cross_check
    from .point import PointIdeal, ordinary_test
    from .structeq import analyze

    name = name or doc.name
    start = time.perf_counter()
    if doc.system is not None:
        rep = analyze(doc.system, seed=seed)
        return from_analysis(name, rep, seed, _ms(start))
    if doc.algebras:
        h = LieSubalgebra.from_spec(doc.algebras[0])
        tf, _, agree = cross_check(h, seed)
        return from_hstruct(name, tf, agree, seed, _ms(start))
    if doc.ideals:
        spec = doc.ideals[0]
        fr = ordinary_test(PointIdeal(spec.labels, spec.generators, name), spec.element)
        return from_point(name, fr, spec.element, seed, _ms(start))
    raise EdsError(f"{name}: nothing to analyze (no structure equations, algebra or ideal)")


def _ms(start) -> int:
    return int(round((time.perf_counter() - start) * 1000))


# ---------------------------------------------------------------------------------
# comparison


def compare(expected: dict, report: Report) -> list[str]:
    """Field-by-field differences, each naming the field."""
    diffs = []

    def diff(field_name, want, got):
        if want != got:
            diffs.append(f"{field_name}: expected {want!r}, got {got!r}")

    for key, want in expected.items():
        if key == "mode":
            diff("mode", want, report.mode)
        elif key == "characters":
            diff("characters", list(want), report.characters.get("s"))
        elif key == "dims":
            for k, v in want.items():
                diff(f"dims.{k}", v, report.dims.get(k))
        elif key == "verdict":
            diff("verdict", want, report.verdict)
        elif key == "generality":
            diff("generality", want, report.generality)
        elif key == "invariant_counts":
            got = {c["k"]: c["count"] for c in report.invariant_counts}
            for k, v in want.items():
                diff(f"invariant_counts[{k}]", v, got.get(int(k)))
        elif key == "identities":
            got = {i["name"]: i["status"] for i in report.identities}
            for k, v in want.items():
                diff(f"identities[{k}]", v, got.get(k))
        else:
            diffs.append(f"{key}: unknown expected field")
    return diffs


@dataclass
class EntryResult:
    name: str
    passed: bool
    report: Report | None = None
    diffs: list = field(default_factory=list)
    error: str | None = None
    exit_code: int = 0


def run_entry(entry: CorpusEntry, seed: int = 0) -> EntryResult:
    from .errors import ParseError

    try:
        doc = load(entry.path)
    except ParseError as exc:
        return EntryResult(entry.name, False, error=f"parse error: {exc}", exit_code=2)
    try:
        report = analyze_document(doc, entry.name, seed)
    except EdsError as exc:
        return EntryResult(entry.name, False, error=f"{type(exc).__name__}: {exc}", exit_code=1)
    diffs = compare({"mode": entry.mode, **entry.expected}, report)
    return EntryResult(entry.name, not diffs, report, diffs, exit_code=0 if not diffs else 1)


def _run_named(args):
    entry, seed = args
    return run_entry(entry, seed)


@dataclass
class CorpusSummary:
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def exit_code(self) -> int:
        return max((r.exit_code for r in self.results), default=0)

    def table(self) -> str:
        lines = [f"{len(self.results)} entries"]
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            ms = f"{r.report.ms} ms" if r.report else ""
            lines.append(f"  {status}  {r.name:<36} {ms}")
            for d in r.diffs:
                lines.append(f"        {d}")
            if r.error:
                lines.append(f"        {r.error}")
        return "\n".join(lines) + "\n"


def run_corpus(pattern: str = "*", seed: int = 0, jobs: int = 1,
               entries: list[CorpusEntry] | None = None) -> CorpusSummary:
    """Run every entry whose name matches ``pattern``; results keep manifest order."""
    entries = load_manifest() if entries is None else entries
    chosen = [e for e in entries if fnmatch.fnmatchcase(e.name, pattern)]
    if jobs > 1 and len(chosen) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            done = list(pool.map(_run_named, [(e, seed) for e in chosen]))
    else:
        done = [run_entry(e, seed) for e in chosen]
    by_name = {r.name: r for r in done}
    return CorpusSummary([by_name[e.name] for e in chosen])
