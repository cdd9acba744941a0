import json
import subprocess
import sys

import pytest

from toral_orbits.census import CyclePolynomial
from toral_orbits.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_census_text(capsys):
    code, out, _ = run(capsys, "census", "-M", "0,12;1,6", "-n", "15")
    assert code == 0
    assert out.splitlines() == ["(1-t)(1-t^2)^2(1-t^4)^5", "pretail points: 200"]


def test_census_json_roundtrip(capsys):
    code, out, _ = run(capsys, "census", "-M", "4,0;1,4", "-n", "6", "--json")
    data = json.loads(out)
    assert set(data) == {"matrix", "modulus", "cycles", "pretail_points", "zeta"}
    assert data["cycles"] == [{"length": 1, "count": 3}, {"length": 3, "count": 2}]
    rebuilt = CyclePolynomial.from_pairs((c["length"], c["count"]) for c in data["cycles"])
    _, text, _ = run(capsys, "census", "-M", "4,0;1,4", "-n", "6")
    assert str(rebuilt) == data["zeta"] == text.splitlines()[0]


def test_census_enumerate_agrees(capsys):
    _, a, _ = run(capsys, "census", "-M", "2,1;1,1", "-pp", "3^2")
    _, b, _ = run(capsys, "census", "-M", "2,1;1,1", "-pp", "3^2", "--enumerate")
    assert a == b


def test_output_is_deterministic(capsys):
    outs = {run(capsys, "symmetries", "-M", "4,4;1,4", "-n", "8")[1] for _ in range(2)}
    assert len(outs) == 1


def test_pretail_dot(tmp_path, capsys):
    path = tmp_path / "out.dot"
    code, out, _ = run(capsys, "pretail", "-M", "4,0;1,4", "-n", "6", "--dot", str(path))
    assert code == 0 and "v = 1 1 2" in out
    text = path.read_text()
    assert text.count("[label=") == 36 and text.count("->") == 36
    tree = tmp_path / "tree.dot"
    run(capsys, "pretail", "-M", "4,0;1,4", "-n", "6", "--dot", str(tree), "--tree")
    assert tree.read_text().count("[label=") == 4


def test_catmap(capsys):
    code, out, _ = run(capsys, "catmap", "arnold", "-pp", "5^1")
    assert code == 0 and out.strip() == "(1-t)(1-t^2)^2(1-t^10)^2"
    code, out, _ = run(capsys, "catmap", "fibonacci", "--table", "13", "--json")
    rows = json.loads(out)["table"]
    assert [r["p"] for r in rows] == [2, 3, 5, 7, 11, 13]
    assert rows[4]["n_p"] == 1


def test_order(capsys):
    code, out, _ = run(capsys, "order", "-M", "2,1;1,1", "-n", "1000", "--json")
    data = json.loads(out)
    assert data["order"] == data["order_via_mgcd"] == 750
    assert {p["p"]: p["shape"] for p in data["profiles"]} == {2: "initial-plateau", 5: "no-plateau"}


def test_classify_reversor_conjugate(capsys):
    code, out, _ = run(capsys, "classify", "-M", "2,1;1,1", "-p", "5", "--json")
    assert json.loads(out)["class"] == "II"
    code, out, _ = run(capsys, "reversor", "-M=0,-4;1,0", "-n", "45", "--exhaustive", "--json")
    assert code == 0 and json.loads(out)["verdict"] is False
    code, out, _ = run(capsys, "reversor", "-M", "4,9;7,16", "-n", "7")
    assert "involutory reversor" in out
    code, out, _ = run(capsys, "conjugate", "-M", "2,1;1,1", "-N", "1,1;1,0", "-n", "5")
    assert out.startswith("not conjugate")


@pytest.mark.parametrize(
    "argv",
    [
        ["census", "-M", "1,2;3", "-n", "5"],
        ["census", "-M", "1,2;3,4"],
        ["census", "-M", "1,2;3,4", "-pp", "6^2"],
        ["classify", "-M", "1,2;3,4", "-p", "4"],
        ["catmap", "arnold"],
        ["frobnicate"],
        ["census", "-M", "1,2;3,4", "-n", "0"],
    ],
)
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_parse_error_reports_position(capsys):
    code, _, err = run(capsys, "census", "-M", "1,x;3,4", "-n", "5")
    assert code == 2 and "position" in err


def test_domain_errors(capsys):
    code, _, err = run(capsys, "census", "-M", "1,2;3,4", "-n", "1000", "--enumerate", "--max-points", "100")
    assert code == 1 and "at least 1000000" in err
    code, _, err = run(capsys, "reversor", "-M", "2,0;0,1", "-n", "4")
    assert code == 1 and "not a unit" in err
    code, _, err = run(capsys, "symmetries", "-M", "1,2;3,4", "-n", "12", "--max-group", "10")
    assert code == 1 and "cap" in err


def test_console_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "toral_orbits", "catmap", "fibonacci", "-pp", "2^1"],
        capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "(1-t)(1-t^3)"


def test_selftest_command(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0 and out.count("PASS") == 8 and "FAIL" not in out
