import csv
import io
import json
import os
import subprocess
import sys
from fractions import Fraction

import pytest

from unilyap.cli import main
from unilyap.schema import InputParseError, parse_input, serialize

HALF = {"kind": "tuple", "matrices": [[["1/2", 0], [0, 0]], [[0, "1/2"], [0, 0]], [[0, 0], ["1/2", 0]], [[0, 0], [0, "1/2"]]]}
SCALAR_NO = {"kind": "tuple", "matrices": [[[2]], [[1]]]}
MCMULLEN = {"kind": "carpet", "A": [[1] * 6] * 6, "tau": [0, 1, 0, 1, 0, 1]}
SELF_AFFINE_HALF = {
    "kind": "self_affine",
    "A": [[2]],
    "digits": [[0], [1]],
    "weights": ["1/2", "1/2"],
    "n0": 1,
    "tile_digits": [[0], [1]],
    "translations": [[0]],
    "options": {"fourier_box_radius": 3},
}


@pytest.fixture
def run(tmp_path, capsys):
    def _run(doc, *args):
        path = tmp_path / "in.json"
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        code = main([args[0], str(path), *args[1:]])
        out, err = capsys.readouterr()
        return code, out, err

    return _run


def report(out):
    return json.loads(out)


class TestExitCodes:
    def test_yes(self, run):
        code, out, _ = run(HALF, "check")
        assert code == 0 and report(out)["decision"] == "Yes"

    def test_no(self, run):
        code, out, _ = run(SCALAR_NO, "check")
        assert code == 1 and report(out)["decision"] == "No"

    def test_inconclusive(self, run):
        # Residual ≈ 1e-8 sits inside the gray band (tol, 10 tol].
        doc = {"kind": "tuple", "matrices": [[[1]], [["1.00000002"]]]}
        code, out, _ = run(doc, "check", "--tol", "1e-8")
        assert code == 2 and report(out)["decision"] == "Inconclusive"

    def test_missing_file(self, capsys):
        assert main(["check", "/nonexistent/file.json"]) == 66

    def test_bad_subcommand(self, capsys):
        assert main(["frobnicate", "x.json"]) == 64

    def test_bad_json(self, run):
        code, _, err = run("{not json", "check")
        assert code == 64 and "invalid JSON" in err

    def test_shape_pointer(self, run):
        doc = {"kind": "tuple", "matrices": [[[1, 0], [0, 1]], [[1, 0]]]}
        code, _, err = run(doc, "check")
        assert code == 64 and "/matrices/1" in err

    def test_entry_pointer(self, run):
        doc = {"kind": "tuple", "matrices": [[[1, 0], [0, 1]], [[1, 0], [0, "a/b"]]]}
        code, _, err = run(doc, "check")
        assert code == 64 and "/matrices/1/1" in err

    def test_wrong_kind(self, run):
        code, _, err = run(HALF, "carpet")
        assert code == 64 and "/kind" in err

    def test_mixed_sign_criterion_A(self, run):
        doc = {"kind": "tuple", "matrices": [[[1, -1], [1, 1]], [[1, 0], [0, 1]]]}
        code, _, _ = run(doc, "check", "--method", "A")
        assert code == 65

    def test_reducible_carpet(self, run):
        code, _, _ = run({"kind": "carpet", "A": [[1, 1], [0, 1]], "tau": [0, 1]}, "carpet")
        assert code == 65

    def test_resource_cap(self, run):
        code, _, err = run(HALF, "check", "--method", "B", "--kron-cap", "10")
        assert code == 69 and "resource" in err

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0


class TestReports:
    def test_report_fields(self, run):
        _, out, err = run(HALF, "check", "--method", "all")
        rep = report(out)
        assert list(rep)[-1] == "timing"
        assert set(rep["result"]["verdicts"]) == {"A", "A-fast", "B"}
        assert rep["options"]["method"] == "all" and rep["options"]["mode"] == "float"
        assert "decision: Yes" in err

    def test_quiet_and_out(self, run, tmp_path):
        target = tmp_path / "report.json"
        code, out, err = run(HALF, "check", "-q", "--out", str(target))
        assert code == 0 and out == "" and err == ""
        assert report(target.read_text())["decision"] == "Yes"

    def test_text_format(self, run):
        _, out, _ = run(HALF, "check", "--format", "text", "-q")
        assert out.startswith("unilyap check") and "decision: Yes" in out

    def test_entropy(self, run):
        _, out, _ = run(HALF, "entropy", "-n", "5")
        res = report(out)["result"]
        assert res["language_count"] == 2 ** 6 and res["h_top"] == pytest.approx(0.6931471805599453)

    def test_pressure(self, run):
        _, out, _ = run(SCALAR_NO, "pressure", "-n", "6")
        res = report(out)["result"]
        assert set(res["estimates"]) == {"1", "2", "4", "6"}
        assert res["defect"] > 0

    def test_profile(self, run):
        _, out, _ = run(HALF, "profile", "-n", "4")
        res = report(out)["result"]
        assert len(res["min"]) == 4 and "normalized_max" in res

    def test_sweep_csv(self, run):
        code, out, _ = run(SCALAR_NO, "pressure", "--sweep", "1:3:0.5", "-n", "4")
        rows = list(csv.reader(io.StringIO(out)))
        assert code == 0 and rows[0] == ["q", "estimate_n", "pressure_even_if_available"]
        assert [r[0] for r in rows[1:]] == ["1.0", "1.5", "2.0", "2.5", "3.0"]
        assert rows[1][2] == "" and rows[3][2] != ""

    def test_sweep_outside_pressure(self, run):
        code, _, _ = run(HALF, "check", "--sweep", "1:2:1")
        assert code == 64

    def test_carpet(self, run):
        code, out, _ = run(MCMULLEN, "carpet")
        res = report(out)["result"]
        assert code == 0 and report(out)["options"]["mode"] == "rational"
        assert res["conclusion"] == "Parry measure projects to Parry measure (dims coincide)"
        assert res["alpha"] == pytest.approx(6.0) and res["beta"] == pytest.approx(2.0)

    def test_carpet_compaction_warning(self, run):
        code, out, err = run({"kind": "carpet", "A": [[1, 1], [1, 1]], "tau": [0, 2], "m": 3}, "carpet")
        assert code == 0 and "compacted" in err
        assert any("compacted" in n for n in report(out)["result"]["notes"])

    def test_self_affine(self, run):
        code, out, _ = run(SELF_AFFINE_HALF, "self-affine")
        res = report(out)["result"]
        assert code == 0 and res["absolutely_continuous"] is True
        assert res["fourier_diagnostic"]["heuristic"] is True
        assert res["fourier_diagnostic"]["box_radius"] == 3

    def test_self_similar(self, run):
        doc = {"kind": "self_similar", "matrices": HALF["matrices"], "rho": "1/3"}
        code, out, _ = run(doc, "self-similar")
        res = report(out)["result"]
        assert code == 0 and res["verdict_Hs"] == "Yes" and res["verdict_Leb"] == "No"
        assert "caveat" in res


class TestSchema:
    def test_round_trip(self):
        docs = [HALF, SCALAR_NO, MCMULLEN, SELF_AFFINE_HALF, {"kind": "self_similar", "matrices": [[[1]]], "rho": 0.5}]
        for obj in docs:
            doc = parse_input(json.dumps(obj))
            again = parse_input(serialize(doc))
            assert again == doc
            assert serialize(again) == serialize(doc)

    def test_exact_values(self):
        doc = parse_input('{"kind": "tuple", "matrices": [[[0.1, "2/6", 3], [1, 1, 1], [1, 1, 1]]]}')
        assert doc.payload["matrices"][0][0] == [Fraction(1, 10), Fraction(1, 3), Fraction(3)]

    def test_rational_mode_rejects_floats(self):
        text = '{"kind": "tuple", "matrices": [[[0.5]]], "options": {"mode": "rational"}}'
        with pytest.raises(InputParseError) as exc:
            parse_input(text)
        assert exc.value.pointer == "/matrices/0/0/0"

    def test_rational_override_from_cli(self, run):
        code, _, err = run({"kind": "tuple", "matrices": [[[0.5]]]}, "check", "--mode", "rational")
        assert code == 64 and "/matrices/0/0/0" in err

    def test_unknown_key(self):
        with pytest.raises(InputParseError):
            parse_input('{"kind": "tuple", "matrices": [[[1]]], "extra": 1}')

    def test_declared_k_mismatch(self):
        with pytest.raises(InputParseError) as exc:
            parse_input('{"kind": "tuple", "k": 2, "matrices": [[[1]]]}')
        assert exc.value.pointer == "/matrices"

    def test_cli_flag_beats_document_option(self, run):
        doc = dict(HALF, options={"tol": 1e-3})
        _, out, _ = run(doc, "check", "--tol", "1e-6")
        assert report(out)["options"]["tol"] == 1e-6
        _, out, _ = run(doc, "check")
        assert report(out)["options"]["tol"] == 1e-3


def _subprocess_report(path, threads):
    env = dict(os.environ, ULE_THREADS=str(threads))
    proc = subprocess.run(
        [sys.executable, "-m", "unilyap", "check", str(path), "--method", "all", "-q"],
        capture_output=True,
        text=True,
        env=env,
        check=False,
    )
    rep = json.loads(proc.stdout)
    rep.pop("timing")
    return proc.returncode, json.dumps(rep, sort_keys=True)


def test_deterministic_across_thread_counts(tmp_path):
    path = tmp_path / "in.json"
    path.write_text(json.dumps(HALF))
    assert _subprocess_report(path, 1) == _subprocess_report(path, 4)
