import json
from pathlib import Path

import jsonschema
import pytest

from khall.cli import load_schema, main

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def strip_timing(obj):
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k != "timing_seconds"}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj


def test_expand_geometric(capsys):
    code, out, _ = run(capsys, "expand", "1/(1-u*x)", "--var", "x", "--at", "zero", "--order", "3")
    assert code == 0
    assert "[1, u, u^2, u^3]" in out


def test_expand_at_infinity_json(capsys):
    code, out, _ = run(capsys, "expand", "1/(1-u*x)", "--var", "x", "--at", "inf", "--order", "3", "--json")
    assert code == 0
    report = json.loads(out)
    jsonschema.validate(report, load_schema())
    assert report["result"]["coefficients"] == {"-3": "-u^-3", "-2": "-u^-2", "-1": "-u^-1"}


def test_shuffle_degree_one(capsys):
    code, out, _ = run(capsys, "shuffle", "1", "z1")
    assert code == 0
    assert out.strip() == "z1+z2"


def test_order_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("KHALL_ORDER", "2")
    code, out, _ = run(capsys, "expand", "1/(1-x)", "--var", "x", "--at", "zero", "--json")
    assert code == 0
    assert json.loads(out)["order"] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "x +"],
        ["verify"],
        ["expand", "1/(1-x)", "--var", "x", "--at", "left"],
        ["eval", "1", "--order", "-1"],
        ["weyl-rank", "--d", "0"],
        [],
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "khall:" in err


def test_bad_environment_order(capsys, monkeypatch):
    monkeypatch.setenv("KHALL_ORDER", "abc")
    code, _, _ = run(capsys, "eval", "1")
    assert code == 2


def test_kernel_error_exits_one(capsys):
    code, _, err = run(capsys, "shuffle", "z1", "1", "--degrees", "2", "1")
    assert code == 1
    assert "error[" in err


def test_weyl_rank(capsys):
    code, out, _ = run(capsys, "weyl-rank", "--d", "3", "--json")
    assert code == 0
    report = json.loads(out)
    assert report["pass"] is True and report["result"]["rank"] == 3


def test_residue_check_json(capsys):
    code, out, _ = run(capsys, "residue-check", "--count", "4", "--order", "4", "--json")
    assert code == 0
    report = json.loads(out)
    jsonschema.validate(report, load_schema())
    assert report["pass"] is True


@pytest.mark.parametrize("path", sorted(DATA.glob("commutator_*.json")), ids=lambda p: p.stem)
def test_golden_reports(capsys, path):
    _, rank, ring, order, model = path.stem.split("_")
    argv = ["verify", "commutator", "--rank", rank[1:], "--ring", ring, "--order", order[1:], "--model", model, "--json"]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    got = json.loads(out)
    jsonschema.validate(got, load_schema())
    want = json.loads(path.read_text())
    assert strip_timing(got) == strip_timing(want)
