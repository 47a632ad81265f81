import json
import shutil

import pytest

from phidiag.cli import EXIT_DIAGNOSABLE, EXIT_INPUT_ERROR, EXIT_NOT_DIAGNOSABLE, main
from phidiag_tests import DATA_DIR


@pytest.fixture(autouse=True)
def no_color(monkeypatch):
    monkeypatch.setenv("PHIDIAG_COLOR", "0")


def _data(name: str) -> str:
    return str(DATA_DIR / name)


def test_check_permanent_failure(capsys):
    assert main(["check", _data("g1.json"), _data("g1_per.json")]) == EXIT_NOT_DIAGNOSABLE
    out = capsys.readouterr().out
    assert "g1.json: Not diagnosable." in out
    assert "faulty run:" in out and "(" in out and ")^ω" in out


def test_check_raw_constraint():
    assert main(["check", _data("g1.json"), _data("g1_per_raw.json")]) == EXIT_NOT_DIAGNOSABLE


def test_check_diagnosable(capsys):
    assert main(["check", _data("g2.json"), _data("g2_kloss.json")]) == EXIT_DIAGNOSABLE
    assert "Diagnosable." in capsys.readouterr().out


def test_check_json(capsys):
    assert main(["check", _data("g3.json"), _data("true.json"), "--json"]) == EXIT_NOT_DIAGNOSABLE
    report = json.loads(capsys.readouterr().out)
    assert report["diagnosable"] is False
    assert report["projections"]["rendered"]["observation"] == "o1 (o1 o2)^ω"

    assert main(["check", _data("g3.json"), _data("g3_fair.json"), "--json"]) == EXIT_DIAGNOSABLE
    report = json.loads(capsys.readouterr().out)
    assert report["diagnosable"] is True and report["witness"] is None


def test_check_with_oracle(capsys):
    assert main(["check", _data("g1.json"), _data("true.json"), "--json", "--oracle"]) == EXIT_NOT_DIAGNOSABLE
    report = json.loads(capsys.readouterr().out)
    assert report["oracle"] is False


def test_check_writes_dot_files(tmp_path):
    dot_dir = tmp_path / "dots"
    assert main(["check", _data("g1.json"), _data("g1_per.json"), "--dot-dir", str(dot_dir)]) == EXIT_NOT_DIAGNOSABLE
    names = sorted(p.name for p in dot_dir.iterdir())
    assert names == ["augmented.dot", "constrained.dot", "nba.dot", "verifier.dot"]
    assert "peripheries=2" in (dot_dir / "verifier.dot").read_text()


def test_check_glob(tmp_path, capsys):
    shutil.copy(DATA_DIR / "g1.json", tmp_path / "a.json")
    shutil.copy(DATA_DIR / "g3.json", tmp_path / "b.json")
    pattern = str(tmp_path / "*.json")
    assert main(["check", pattern, _data("true.json"), "--glob", "--json"]) == EXIT_NOT_DIAGNOSABLE
    reports = json.loads(capsys.readouterr().out)
    assert [r["file"] for r in reports] == [str(tmp_path / "a.json"), str(tmp_path / "b.json")]
    assert main(["check", str(tmp_path / "*.none"), _data("true.json"), "--glob"]) == EXIT_INPUT_ERROR


def test_input_errors(tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps({"ltl": "G q", "ap": ["p"]}))
    assert main(["check", _data("g1.json"), str(broken)]) == EXIT_INPUT_ERROR
    assert "Input error" in capsys.readouterr().err

    malformed = tmp_path / "plant.json"
    malformed.write_text('{"states": [}')
    assert main(["check", str(malformed), _data("true.json")]) == EXIT_INPUT_ERROR

    bad_formula = tmp_path / "syntax.json"
    bad_formula.write_text(json.dumps({"ltl": "G (a &", "ap": ["a"]}))
    assert main(["check", _data("g1.json"), str(bad_formula)]) == EXIT_INPUT_ERROR
    assert main(["check", _data("g1.json"), str(tmp_path / "missing.json")]) == EXIT_INPUT_ERROR


def test_translate(tmp_path, capsys):
    assert main(["translate", "G (m1 -> G !m0)", "--samples", "50", "--seed", "3"]) == EXIT_DIAGNOSABLE
    captured = capsys.readouterr()
    assert captured.out.startswith("digraph NBA {")
    assert "50/50 sampled words agree" in captured.err

    out = tmp_path / "nba.dot"
    assert main(["translate", "p U q", "--ap", "p,q,r", "--out", str(out)]) == EXIT_DIAGNOSABLE
    assert out.read_text().startswith("digraph NBA {")
    assert main(["translate", "a &"]) == EXIT_INPUT_ERROR


def test_replay(tmp_path, capsys):
    args = ["replay", _data("g3.json"), _data("true.json"), _data("g3_faulty.txt"), "--json"]
    assert main(args) == EXIT_DIAGNOSABLE
    trace = json.loads(capsys.readouterr().out)
    assert [row["alarm"] for row in trace["steps"]] == [0, 0, 0, 0, 1, 1]
    assert trace["steps"][0]["symbol"] is None
    assert trace["infeasible_at"] is None

    stream = tmp_path / "acab.txt"
    stream.write_text("a\nc\na\nb\n")
    args = ["replay", _data("g1.json"), _data("g1_per.json"), str(stream), "--json"]
    assert main(args) == EXIT_NOT_DIAGNOSABLE
    captured = capsys.readouterr()
    assert json.loads(captured.out)["infeasible_at"] == 4
    assert "Infeasible observation at step 4" in captured.err

    unknown = tmp_path / "z.txt"
    unknown.write_text("z\n")
    assert main(["replay", _data("g1.json"), _data("g1_per.json"), str(unknown)]) == EXIT_INPUT_ERROR


def test_replay_text(capsys):
    assert main(["replay", _data("g3.json"), _data("true.json"), _data("g3_faulty.txt")]) == EXIT_DIAGNOSABLE
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 6
    assert lines[-1].endswith("alarm=1")
    assert lines[0].endswith("alarm=0")


def test_export(tmp_path, capsys):
    assert main(["export", _data("g2.json"), _data("g2_kloss.json"), "--dot-dir", str(tmp_path)]) == EXIT_DIAGNOSABLE
    printed = capsys.readouterr().out.split()
    assert len(printed) == 4
    assert (tmp_path / "nba.dot").read_text().startswith("digraph NBA {")
