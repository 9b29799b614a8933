"""Front-door plumbing: argument handling, exit codes, report output.

Suites themselves are tested against oracles elsewhere; these tests pin
the command surface: flag parsing, fixture loading, JSON determinism,
and the exit code contract (0 pass, 1 check failure, 2 usage errors).
"""
import json

import pytest

from tritopos.cli import main
from tritopos.formats import fixture_path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_passing_algebra(self, capsys):
        code, out, _ = run(capsys, "heyting-check", "--heyting", "chain3")
        assert code == 0
        assert "19/19 checks passed" in out

    def test_failing_algebra(self, capsys):
        code, out, _ = run(capsys, "heyting-check", "--heyting", "m3")
        assert code == 1
        assert "heyting.build" in out
        assert "counterexample" in out

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "heyting-check", "--heyting",
                           "/nonexistent/algebra.json")
        assert code == 2
        assert "error:" in err

    def test_unknown_command(self, capsys):
        assert run(capsys, "frobnicate")[0] == 2

    def test_missing_required_flag(self, capsys):
        assert run(capsys, "tripos-verify")[0] == 2

    def test_invalid_object_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.per"
        bad.write_text(json.dumps({"carrier": ["x0", "x1"],
                                   "matrix": ["1", "h", "0", "1"]}))
        code, _, err = run(capsys, "resolve", "--heyting", "chain3",
                           "--object", str(bad))
        assert code == 2
        assert "symmetry" in err
        assert "witness" in err


class TestSuites:
    def test_tripos_verify(self, capsys):
        code, out, _ = run(capsys, "tripos-verify", "--heyting", "chain3",
                           "--max-set", "2")
        assert code == 0
        assert out.strip().endswith("8/8 checks passed")

    def test_topos_laws_small(self, capsys):
        code, out, _ = run(capsys, "topos-laws", "--heyting", "chain3",
                           "--max-carrier", "1")
        assert code == 0
        assert "category.associative_triples" in out

    def test_resolve_bundled_object(self, capsys):
        code, out, _ = run(capsys, "resolve", "--heyting", "chain3",
                           "--object", str(fixture_path("linked_pair.per")))
        assert code == 0
        assert "resolution.factorization" in out

    def test_kan_on_assembly(self, capsys):
        code, out, _ = run(capsys, "kan", "--heyting", "chain3",
                           "--object", str(fixture_path("weak_point.per")))
        assert code == 0
        assert "kan.unit_iso" in out
        assert "counit.instance_0" in out

    def test_quotient_finset_fixture(self, capsys, tmp_path):
        out_path = tmp_path / "report.json"
        code, out, _ = run(capsys, "quotient", "--category", "finset",
                           "--pseq", str(fixture_path("merge_pair.pseq")),
                           "--json", str(out_path))
        assert code == 0
        report = json.loads(out_path.read_text())
        result = next(c for c in report["checks"]
                      if c["check"] == "quotient.result")
        assert result["witness"]["classes"] == [["a", "b"], ["c"]]

    def test_quotient_category_mismatch(self, capsys):
        code, _, err = run(capsys, "quotient", "--category", "btopos",
                           "--heyting", "chain3",
                           "--pseq", str(fixture_path("merge_pair.pseq")))
        assert code == 2
        assert "finset" in err

    def test_quotient_btopos_record(self, capsys, tmp_path):
        per = {"carrier": ["x0", "x1"], "matrix": ["1", "h", "h", "1"]}
        span = {"category": "btopos", "x1": per, "x0": per,
                "d0": ["1", "h", "h", "1"], "d1": ["1", "h", "h", "1"]}
        path = tmp_path / "identity_span.pseq"
        path.write_text(json.dumps(span))
        code, out, _ = run(capsys, "quotient", "--heyting", "chain3",
                           "--pseq", str(path))
        assert code == 0
        assert "quotient.result" in out

    def test_ortho_sweep(self, capsys):
        code, out, _ = run(capsys, "ortho", "--max-set", "2")
        assert code == 0
        assert "ortho.covers_vs_monos" in out
        assert "ortho.monos_not_left_orthogonal" in out

    def test_sub_nabla_iso_sizes(self, capsys):
        code, out, _ = run(capsys, "sub-nabla-iso", "--heyting", "chain2",
                           "--max-set", "1")
        assert code == 0
        assert "sub_nabla.complete.size_0" in out
        assert "sub_nabla.complete.size_1" in out


class TestReports:
    @staticmethod
    def _strip_timing(report):
        for check in report["checks"]:
            check["elapsed_ms"] = 0.0
        return report

    def test_json_shape(self, capsys, tmp_path):
        out_path = tmp_path / "r.json"
        code, _, _ = run(capsys, "ortho", "--max-set", "2",
                         "--json", str(out_path))
        assert code == 0
        report = json.loads(out_path.read_text())
        assert set(report) == {"tool", "version", "config", "checks"}
        assert all(set(c) >= {"check", "status"} for c in report["checks"])

    def test_reports_deterministic_modulo_timing(self, capsys, tmp_path):
        paths = [tmp_path / "a.json", tmp_path / "b.json"]
        for p in paths:
            assert run(capsys, "ortho", "--max-set", "2",
                       "--json", str(p))[0] == 0
        first, second = (self._strip_timing(json.loads(p.read_text()))
                         for p in paths)
        assert json.dumps(first, sort_keys=True) == json.dumps(
            second, sort_keys=True)

    def test_failures_carry_witnesses(self, capsys):
        _, out, _ = run(capsys, "heyting-check", "--heyting", "m3")
        line = next(l for l in out.splitlines() if l.startswith("fail"))
        assert "witness=" in line
