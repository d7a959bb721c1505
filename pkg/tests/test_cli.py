from __future__ import annotations

import json

import pytest

from flfusion import cli
from flfusion.errors import InconsistencyError


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr().out


def test_fusion_json(capsys):
    code, out = run(["fusion", "A1", "V(w1)", "V(w1)"], capsys)
    data = json.loads(out)
    assert code == 0
    assert data["dim"] == 4
    assert data["filtration"]["stages"] == [3, 4]


def test_demazure_character_json(capsys):
    code, out = run(["char", "A1", "--demazure", "1", "2w1"], capsys)
    assert code == 0
    assert json.loads(out)["dim"] == 4


def test_verify_report_shape(capsys):
    code, out = run(["verify", "A1", "qsystem", "--lmax", "2"], capsys)
    data = json.loads(out)
    assert code == 0
    assert set(data) == {"claim", "evidence", "instances", "pass"}
    assert [i["qshift"] for i in data["instances"]] == [1, 2]


def test_verification_failure_exit_code(capsys):
    # a zero budget leaves every family unrun, which fails the claim
    code, out = run(["verify", "A1", "param-independence", "--cap", "2", "--trials", "2",
                     "--budget", "0"], capsys)
    data = json.loads(out)
    assert code == 1 and not data["pass"]
    assert all(i["timeout"] for i in data["instances"])


@pytest.mark.parametrize("argv", [
    ["fusion", "A1", "V(w1)", "V(w1)", "--points", "1,1"],
    ["char", "A1", "--weyl", "3x"],
    ["verify", "A1", "nonsense"],
    ["char", "A1"],
])
def test_usage_errors(argv, capsys):
    code, out = run(argv, capsys)
    assert code == 2
    assert "error" in json.loads(out)


def test_argparse_usage_exit():
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2


def test_internal_inconsistency_exit_code(capsys, monkeypatch):
    def broken(args):
        raise InconsistencyError("rank mismatch")
    monkeypatch.setitem(cli.COMMANDS, "char", broken)
    code, out = run(["char", "A1", "--weyl", "w1"], capsys)
    assert code == 3
    assert json.loads(out)["error"] == "InconsistencyError"


def test_output_file_and_formats(tmp_path, capsys):
    target = tmp_path / "out.tsv"
    code, out = run(["verify", "A2", "remark-2.4", "--cap", "3", "--format", "tsv",
                     "-o", str(target)], capsys)
    assert code == 0 and out == ""
    text = target.read_text()
    assert text.startswith("input\tequal\tqshift")
    assert "instance evidence" in text


def test_reruns_are_byte_identical(capsys):
    argv = ["verify", "A1", "param-independence", "--cap", "3", "--trials", "3", "--seed", "4"]
    first = run(argv, capsys)
    second = run(argv, capsys)
    assert first == second
