import json
import subprocess
import sys
from pathlib import Path

import pytest

from crinvariants.cli import EXIT_INPUT, EXIT_OK, EXIT_VIOLATION, FIXTURES, main
from crinvariants.parser import load_spec
from crinvariants.report import SCHEMA, AnalysisConfig, analyze

DANGELO = FIXTURES / "dangelo.crs"
QUARTIC_U = FIXTURES / "quartic-with-u-term.crs"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_json_report_matches_golden(capsys):
    code, out, _ = run(capsys, "analyze", str(QUARTIC_U), "--report", "json")
    assert code == EXIT_OK
    assert out == QUARTIC_U.with_suffix(".json").read_text(encoding="utf-8")
    data = json.loads(out)
    assert data["schema"] == SCHEMA
    assert data["summary"]["passed"] is True


def test_report_is_byte_deterministic():
    spec = load_spec(DANGELO)
    assert analyze(spec).to_json() == analyze(spec).to_json()


def test_parallel_points_match_serial():
    spec = load_spec(DANGELO)
    assert analyze(spec, AnalysisConfig(jobs=2)).to_json() == analyze(spec).to_json()


def test_text_report(capsys):
    code, out, _ = run(capsys, "analyze", str(QUARTIC_U))
    assert code == EXIT_OK
    assert "multitype: (1,4)" in out
    assert "[FAIL" not in out


def test_point_override(capsys):
    code, out, _ = run(capsys, "analyze", str(DANGELO), "--point", "i/2, 0, 0", "--report", "json")
    assert code == EXIT_OK
    pts = json.loads(out)["points"]
    assert len(pts) == 1
    assert pts[0]["invariants"]["levi_rank"] == 1


def test_violation_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.crs"
    bad.write_text("n = 2\nrho = -2*Re(w) + z1*conj(z1)\nexpect.levi_rank = 0\n", encoding="utf-8")
    code, out, _ = run(capsys, "analyze", str(bad))
    assert code == EXIT_VIOLATION
    assert "[FAIL" in out


@pytest.mark.parametrize("content, argv, needle", [
    ("n = 2\nrho = z1 +\n", [], "line 2, column 11"),
    ("n = 2\nrho = -2*Re(w)\n", ["--point", "1, 0"], "not on"),
    ("n = 2\nrho = -2*Re(w)\n", ["--point", "0"], "coordinates"),
    ("n = 2\nrho = -2*Re(w)\n", ["--order", "2"], "order"),
])
def test_input_errors(tmp_path, capsys, content, argv, needle):
    f = tmp_path / "m.crs"
    f.write_text(content, encoding="utf-8")
    code, _, err = run(capsys, "analyze", str(f), *argv)
    assert code == EXIT_INPUT
    assert needle in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "analyze", "/nonexistent/model.crs")
    assert code == EXIT_INPUT
    assert "cannot read" in err


def test_output_file(tmp_path, capsys):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "analyze", str(QUARTIC_U), "--report", "json", "-o", str(target))
    assert code == EXIT_OK and out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["schema"] == SCHEMA


def test_corpus_detects_drift(tmp_path, capsys):
    for name in ("quartic-with-u-term", "levi-flat"):
        for ext in (".crs", ".json"):
            (tmp_path / (name + ext)).write_bytes((FIXTURES / (name + ext)).read_bytes())
    code, out, _ = run(capsys, "corpus", "--dir", str(tmp_path))
    assert code == EXIT_OK and out.count("ok") == 2
    gold = tmp_path / "levi-flat.json"
    gold.write_text(gold.read_text(encoding="utf-8").replace('"levi_rank": 0', '"levi_rank": 9'), encoding="utf-8")
    code, out, _ = run(capsys, "corpus", "--dir", str(tmp_path))
    assert code == EXIT_VIOLATION and "DIFFERS levi-flat.crs" in out


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "crinvariants.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("crinv ")


def test_tau21_constant_reported():
    data = analyze(load_spec(FIXTURES / "cubic-2re.crs")).data
    cal = [c for c in data["points"][0]["claims"] if c["id"] == "tau21-calibration"]
    assert cal and cal[0]["status"] == "pass"
    assert cal[0]["constant"] == {"re": "0", "im": "1"}


def test_weight_vectors_are_checked(tmp_path, capsys):
    f = tmp_path / "m.crs"
    f.write_text("n = 2\nrho = -2*Re(w) + (z1*conj(z1))^2\nweights = 1, 4\nweights = 1, 5/2\n", encoding="utf-8")
    code, out, _ = run(capsys, "analyze", str(f), "--report", "json")
    assert code == EXIT_OK
    got = json.loads(out)["model"]["weights"]
    assert got == [{"weights": ["1", "4"], "admissible": True}, {"weights": ["1", "5/2"], "admissible": False}]
