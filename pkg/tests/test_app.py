import json

import pytest

from src import app


def _run(capsys, *argv):
    code = app.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_norm_command_reports_exact_value(capsys):
    code, out = _run(capsys, "norm", "--p", "-inf", "--f", "[3,1,2]")
    assert code == app.EXIT_PASS
    report = json.loads(out)
    assert report["command"] == "norm"
    assert report["verdict"] == "pass"
    assert report["result"]["norm"] == {"num": 1, "den": 1}


def test_same_arguments_give_identical_bytes(capsys):
    argv = ("norm-dual", "--p", "-1", "--f", "[1,4]", "--seed", "3")
    _, first = _run(capsys, *argv)
    _, second = _run(capsys, *argv)
    assert first == second


def test_counterexample_exit_code(capsys):
    code, out = _run(capsys, "check-mcp", "--catalog", "c", "--lam", "0", "--eta", "1", "--budget", "16")
    assert code == app.EXIT_COUNTEREXAMPLE
    assert json.loads(out)["verdict"] == "fail"


def test_invalid_exponent_is_input_error(capsys):
    code, out = _run(capsys, "norm", "--p", "2", "--f", "[1,1]")
    assert code == app.EXIT_INPUT_ERROR
    assert out == ""


def test_malformed_json_is_input_error(capsys):
    code, _ = _run(capsys, "dm", "--in", "{not json")
    assert code == app.EXIT_INPUT_ERROR


def test_unknown_subcommand(capsys):
    code, _ = _run(capsys, "bogus")
    assert code == app.EXIT_INPUT_ERROR


def test_failed_hypothesis_is_input_error(capsys):
    spec = '{"mu":[1,1],"generators":[[1,0],[1,1]],"values":[5,1]}'
    code, _ = _run(capsys, "extend", "--spec", spec)
    assert code == app.EXIT_INPUT_ERROR


def test_dm_of_inline_poset(capsys):
    code, out = _run(capsys, "dm", "--in", '{"elements":["a","b"],"leq":[]}')
    assert code == app.EXIT_PASS
    assert json.loads(out)["verdict"] == "pass"


def test_csv_output(capsys):
    code, out = _run(capsys, "cone-suite", "--n", "2", "--cases", "20", "--format", "csv")
    assert code == app.EXIT_PASS
    assert out.splitlines()[0] == "suite,family,anchor,checked,failed,verdict"


def test_report_written_to_file(capsys, tmp_path):
    target = tmp_path / "norm.json"
    code, out = _run(capsys, "norm", "--p", "1/2", "--f", "[1,1]", "--out", str(target))
    assert code == app.EXIT_PASS
    assert out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["verdict"] == "pass"


def test_suite_requires_selection(capsys):
    code, _ = _run(capsys, "suite")
    assert code == app.EXIT_INPUT_ERROR


@pytest.mark.parametrize("argv, expected", [
    (["--p", "-inf", "--f", "[1]"], ["--p=-inf", "--f", "[1]"]),
    (["--p", "1/2"], ["--p", "1/2"]),
    (["--s", "-1/2", "--quick"], ["--s=-1/2", "--quick"]),
    (["--p", "--f"], ["--p", "--f"]),
])
def test_join_signed_values(argv, expected):
    assert app.join_signed_values(argv) == expected
