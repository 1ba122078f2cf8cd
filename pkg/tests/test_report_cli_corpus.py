import json
import re
from dataclasses import replace

import pytest

from edskit.cli import main
from edskit.corpus import (analyze_document, compare, corpus_dir, default_seed, load_manifest,
                           run_corpus, run_entry)
from edskit.errors import EdsError
from edskit.report import DIM_KEYS, SCHEMA_KEYS, Report

QUICK = ["grad_k_unit", "hessian_generic", "so3_metrics", "finsler_landsberg", "su2", "gl2",
         "lagrangian2", "nonordinary_example"]


@pytest.fixture(scope="module")
def reports(corpus):
    return {name: analyze_document(corpus(name), name) for name in QUICK}


def parse_text(text):
    """Pull the numbers and strings back out of the text emitter."""
    out = {"identities": [], "dims": {}, "invariant_counts": []}
    for line in text.splitlines():
        key, _, val = line.partition(":")
        val = val.strip()
        if key == "entry":
            out["entry"] = val
        elif key == "mode":
            out["mode"] = val
        elif key == "verdict":
            out["verdict"] = val
        elif key == "generality":
            out["generality"] = val
        elif key == "characters":
            out["s"] = [int(x) for x in re.findall(r"-?\d+", val)]
        elif key == "dims":
            for k, v in re.findall(r"(\w+)=(\S+)", val):
                out["dims"][k] = int(v) if re.fullmatch(r"-?\d+", v) else v
        elif key == "invariants":
            out["invariant_counts"] = [{"k": int(k), "count": int(c)} for k, c in re.findall(r"k=(\d+):(\d+)", val)]
        elif key == "identity":
            name, _, status = val.rpartition(" -> ")
            out["identities"].append({"name": name, "status": status})
        elif key == "seed":
            out["seed"] = int(val)
        elif key == "time":
            out["ms"] = int(val.split()[0])
    return out


class TestReport:
    def test_schema_keys(self, reports):
        for r in reports.values():
            d = r.to_dict()
            assert tuple(d) == SCHEMA_KEYS
            assert set(d["dims"]) <= set(DIM_KEYS)

    def test_json_round_trip(self, reports):
        for r in reports.values():
            assert Report.from_json(r.to_json()) == r
            assert Report.from_json(r.to_json()).to_json() == r.to_json()

    def test_no_floats(self, reports):
        def walk(x):
            if isinstance(x, float):
                raise AssertionError(f"float in report: {x}")
            if isinstance(x, dict):
                for v in x.values():
                    walk(v)
            elif isinstance(x, list):
                for v in x:
                    walk(v)
        for r in reports.values():
            walk(json.loads(r.to_json()))

    def test_text_and_json_agree(self, reports):
        for r in reports.values():
            d = json.loads(r.to_json())
            t = parse_text(r.to_text())
            for key in ("entry", "mode", "verdict", "generality", "seed", "ms", "identities",
                        "invariant_counts"):
                assert t[key] == d[key], key
            assert t["dims"] == d["dims"]
            assert t["s"] == d["characters"]["s"]

    def test_without_timing(self, reports):
        r = reports["so3_metrics"]
        assert r.without_timing().ms == 0
        assert r.without_timing().to_dict() == {**r.to_dict(), "ms": 0}


class TestDeterminism:
    def test_repeat_runs_identical(self, corpus):
        a = analyze_document(corpus("ricci_gradient"), "ricci_gradient").without_timing()
        b = analyze_document(corpus("ricci_gradient"), "ricci_gradient").without_timing()
        assert a.to_json() == b.to_json()

    def test_parallel_matches_serial(self):
        pattern = "[fglsn]*"
        serial = run_corpus(pattern, jobs=1)
        parallel = run_corpus(pattern, jobs=4)
        assert [r.name for r in serial.results] == [r.name for r in parallel.results]
        for a, b in zip(serial.results, parallel.results):
            assert a.report.without_timing().to_json() == b.report.without_timing().to_json()


class TestCorpus:
    def test_manifest_exact_and_cited(self):
        entries = load_manifest()
        assert len(entries) == 26
        for e in entries:
            assert e.citation and e.path.is_file()

            def walk(x):
                assert not isinstance(x, (float, bool)), (e.name, x)
                if isinstance(x, dict):
                    [walk(v) for v in x.values()]
                elif isinstance(x, list):
                    [walk(v) for v in x]
            walk(e.expected)

    def test_float_rejected(self, tmp_path):
        bad = {"version": 1, "entries": [{"name": "x", "file": "x.eds", "mode": "POINT", "citation": "c",
                                          "expected": {"dims": {"codim": 1.0}}}]}
        p = tmp_path / "manifest.json"
        p.write_text(json.dumps(bad))
        with pytest.raises(ValueError, match="dims.codim"):
            load_manifest(p)

    def test_so3_metrics_entry(self):
        (entry,) = [e for e in load_manifest() if e.name == "so3_metrics"]
        res = run_entry(entry)
        assert res.passed
        assert res.report.characters["s"][:6] == [0, 0, 3, 3, 0, 0]
        assert (res.report.dims["tableau"], res.report.dims["prolongation"]) == (6, 15)

    def test_nonordinary_entry(self):
        (entry,) = [e for e in load_manifest() if e.name == "nonordinary_example"]
        res = run_entry(entry)
        assert res.passed and res.report.verdict == "not_ordinary"
        assert (res.report.dims["bound"], res.report.dims["codim"]) == (1, 2)

    def test_tampered_value_names_field(self):
        (entry,) = [e for e in load_manifest() if e.name == "finsler_base"]
        expected = json.loads(json.dumps(entry.expected))
        expected["dims"]["prolongation"] += 1
        res = run_entry(replace(entry, expected=expected))
        assert not res.passed and res.exit_code == 1
        assert any(d.startswith("dims.prolongation:") for d in res.diffs)

    def test_compare_reports_each_field(self, reports):
        r = reports["lagrangian2"]
        diffs = compare({"verdict": "ordinary", "dims": {"codim": 1, "bound": 2}}, r)
        assert diffs == ["dims.bound: expected 2, got 1"]

    def test_finsler_filter(self):
        s = run_corpus("finsler*")
        assert [r.name for r in s.results] == ["finsler_base", "finsler_prolonged", "finsler_landsberg",
                                               "finsler_kbasic", "finsler_constk"]
        assert s.passed and s.exit_code == 0

    def test_empty_filter(self):
        s = run_corpus("no_such_entry*")
        assert s.table().startswith("0 entries") and s.exit_code == 0

    def test_parse_error_exit_two(self, tmp_path):
        (entry,) = [e for e in load_manifest() if e.name == "frobenius"]
        bad = tmp_path / "bad.eds"
        bad.write_text("coframe a;\nd a = \n")
        res = run_entry(replace(entry, dsl_file=str(bad)))
        assert res.exit_code == 2 and "parse error" in res.error


class TestSeed:
    def test_default(self, monkeypatch):
        monkeypatch.delenv("EDS_SEED", raising=False)
        assert default_seed() == 0

    def test_env(self, monkeypatch):
        monkeypatch.setenv("EDS_SEED", "17")
        assert default_seed() == 17

    def test_bad_env(self, monkeypatch):
        monkeypatch.setenv("EDS_SEED", "seventeen")
        with pytest.raises(EdsError):
            default_seed()

    def test_cli_reports_env_seed(self, monkeypatch, capsys):
        monkeypatch.setenv("EDS_SEED", "5")
        assert main(["point", str(corpus_dir() / "frobenius.eds"), "--format", "json"]) == 0
        assert json.loads(capsys.readouterr().out)["seed"] == 5


def path(name):
    return str(corpus_dir() / f"{name}.eds")


class TestCli:
    def test_check_ok(self, capsys):
        assert main(["check", path("grad_k_unit"), "--no-timing"]) == 0
        out = capsys.readouterr().out
        assert "verdict:     applies" in out and "time:        0 ms" in out

    def test_check_failing_identity(self, capsys):
        assert main(["check", path("hessian_generic")]) == 1
        assert "d(d K1) -> fails" in capsys.readouterr().out

    def test_missing_file(self, capsys):
        assert main(["check", "/nonexistent.eds"]) == 2
        assert "no such file" in capsys.readouterr().err

    def test_parse_error(self, tmp_path, capsys):
        p = tmp_path / "x.eds"
        p.write_text("coframe a;\nd a = b;\n")
        assert main(["check", str(p)]) == 2
        assert "unknown identifier 'b'" in capsys.readouterr().err

    def test_usage_error(self, capsys):
        assert main(["frobnicate"]) == 2
        assert main(["corpus", "run", "--jobs", "0"]) == 2

    def test_tableau_json(self, capsys):
        assert main(["tableau", path("finsler_base"), "--format", "json"]) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["characters"] == [0, 2, 1] and d["prolongation"] == d["bound"] == 7
        assert d["involutive"] is True

    def test_point(self, capsys):
        assert main(["point", path("nonordinary_example"), "--format", "json"]) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["verdict"] == "not_ordinary" and d["dims"]["codim"] == 2

    def test_prolong_round_trips(self, capsys, tmp_path):
        assert main(["prolong", path("grad_k_unit")]) == 0
        p = tmp_path / "p.eds"
        p.write_text(capsys.readouterr().out)
        assert main(["check", str(p), "--format", "json"]) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["entry"] == "grad_k_unit_p1" and d["characters"]["s"] == [2, 1, 0, 0]

    def test_prolong_twice_names(self, capsys):
        assert main(["prolong", path("grad_k_unit"), "--k", "2"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("system grad_k_unit_p2;") and "free c1;" in out

    def test_hstruct(self, capsys):
        assert main(["hstruct", path("su2"), "--format", "json"]) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["dims"]["K0"] == 5 and d["dims"]["K1"] == 12
        assert "2 functions of 3 variables" in d["generality"]

    def test_hstruct_emit_parses(self, capsys, tmp_path):
        assert main(["hstruct", path("so3"), "--emit"]) == 0
        p = tmp_path / "so3.eds"
        p.write_text(capsys.readouterr().out)
        assert main(["check", str(p)]) == 0

    def test_corpus_text(self, capsys):
        assert main(["corpus", "run", "--filter", "lagrangian*", "--no-timing"]) == 0
        out = capsys.readouterr().out
        assert out.splitlines()[0] == "2 entries" and out.count("PASS") == 2

    def test_corpus_json(self, capsys):
        assert main(["corpus", "run", "--filter", "so[23]", "--format", "json", "--no-timing"]) == 0
        d = json.loads(capsys.readouterr().out)
        assert d["entries"] == d["passed"] == 2
        assert all(r["report"]["ms"] == 0 for r in d["results"])

    def test_corpus_empty(self, capsys):
        assert main(["corpus", "run", "--filter", "zzz"]) == 0
        assert capsys.readouterr().out.startswith("0 entries")
