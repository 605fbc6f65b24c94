import csv
import json
import subprocess
import sys

import pytest

from conftest import CURVES
from kahlerval.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    assert code == 0
    return json.loads(out)


def test_info_running_example(capsys):
    doc = run_json(capsys, "info", CURVES / "running_example.json")
    assert doc["charExponents"] == [18, 25] and doc["sgGens"] == [15, 18, 97]
    assert doc["exponentsPrefix"][:5] == [18, 21, 24, 25, 26]


def test_info_cusp(capsys):
    assert run_json(capsys, "info", CURVES / "cusp.json")["sgGens"] == [2, 3]


def test_basis_all(capsys):
    doc = run_json(capsys, "basis", CURVES / "genus2_n4.json")
    assert (doc["cx"], doc["s"], doc["cw"], doc["c"]) == (
        [4, 6, 11, 13], [4, 6, 11, 13], [4, 6, 11], [4, 6])
    assert doc["forms"][2]["form"] == "y dx - 2/3 x dy"


def test_basis_kind_and_trace(capsys):
    doc = run_json(capsys, "basis", CURVES / "cusp.json", "--kind", "cx", "--trace")
    assert doc["cx"] == [2, 3] and "s" not in doc and doc["trace"]


def test_lambda(capsys):
    doc = run_json(capsys, "lambda", CURVES / "genus2_n4.json", "--bound", 16)
    assert doc["values"] == [4, 6, 8, 10, 11, 12, 13, 14, 15, 16]


def test_directions_genus2_n4_empty(capsys):
    doc = run_json(capsys, "directions", CURVES / "genus2_n4.json")
    assert doc and all(r["directions"] == [] for r in doc)


def test_classify_with_companion(capsys):
    doc = run_json(capsys, "classify", CURVES / "genus2_n4.json", "--companion")
    types = [f["type"] for f in doc["forms"]]
    assert types == ["trivial", "trivial", "1", "2"]
    assert doc["forms"][2]["companion"]["terms"] == [[6, "1"]]


def test_oracle_check(capsys):
    code, out, _ = run(capsys, "oracle-check", CURVES / "running_example.json", "--pretty")
    assert code == 0 and out.startswith("OK: Lambda agrees on [1, ")


def test_decompose_cusp(capsys):
    doc = run_json(capsys, "decompose", CURVES / "cusp.json", "--form", "y dy")
    assert doc["coefficients"] == ["3/2 x^2", "0"] and doc["residual"] == "infinity"


def test_random_round_trips(capsys, curve_file):
    doc = run_json(capsys, "random", "--seed", 3, "--genus", 2)
    path = curve_file(doc)
    info = run_json(capsys, "info", path)
    assert len(info["charExponents"]) == 2


def test_batch(capsys, tmp_path):
    out = tmp_path / "out"
    doc = run_json(capsys, "batch", CURVES, "--out", out)
    assert doc["processed"] == len(list(CURVES.glob("*.json")))
    rows = list(csv.reader(open(out / "summary.csv")))
    assert rows[0] == ["file", "exponents", "basis_values", "direction_count"]
    assert (out / "cusp.report.json").exists()


def test_out_flag(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "info", CURVES / "cusp.json", "--out", target)
    assert code == 0 and out == "" and json.loads(target.read_text())["n"] == 2


def test_pretty_renders_text(capsys):
    code, out, _ = run(capsys, "basis", CURVES / "genus2_n4.json", "--pretty")
    assert code == 0 and "cx: [4, 6, 11, 13]" in out


@pytest.mark.parametrize("doc", ["{bad", '{"n": 2}', '{"n": 2, "terms": [[3, "x/y"]]}',
                                 '{"n": 4, "terms": [[6, "1"]]}'])
def test_input_errors_exit_2(capsys, curve_file, doc):
    code, out, err = run(capsys, "info", curve_file(doc))
    assert code == 2 and out == "" and err.startswith("input error:")


def test_missing_file_exit_2(capsys, tmp_path):
    assert run(capsys, "info", tmp_path / "nope.json")[0] == 2


def test_output_is_byte_identical():
    cmd = [sys.executable, "-m", "kahlerval.cli", "basis", str(CURVES / "running_example.json"),
           "--trace"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first
