"""CLI behavior: golden outputs, schema conformance, determinism and exit codes.

Regenerate the golden files with ``NOETHKIT_REGEN=1 pytest tests/test_cli.py``.
"""

import json
import os
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest
from mpmath import log10, mp, mpf

from noethkit import BoundExpr
from noethkit.cli import _schema, run

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = Path(__file__).resolve().parent / "golden"

CASES = {
    "bounds": ["bounds", "--m", "1", "--n", "1", "--delta", "2", "--d", "2"],
    "loja": ["loja", "--m", "1", "--n", "1", "--delta", "2", "--d", "2"],
    "grid": ["verify-bounds-grid", "--max-mn", "1", "--max-d", "2"],
    "derive": ["derive", "--chain", "chains/exp.json", "--poly", "x1*f1", "--word", "1,1"],
    "derive_twisted": ["derive", "--chain", "chains/twisted.json", "--poly", "f1", "--word", "1,2"],
    "jet": ["jet", "--chain", "chains/exp.json", "--poly", "f1", "--point", "origin", "--order", "4"],
    "il": ["il", "--chain", "chains/twisted.json", "--depth", "1", "--point", "on_locus"],
    "mult": ["mult", "--trivial", "2", "--system", "x1^2 - x2^3", "--system", "x2^2", "--point", "0,0"],
    "mult_chain": ["mult", "--chain", "chains/exp.json", "--system", "f1 - 1 - x1 - 1/2*x1^2",
                   "--point", "origin"],
    "deflicity": ["deflicity", "--chain", "chains/plane.json", "--system", "x2*(x2-x1^2)", "--rho", "x1",
                  "--point", "0,0"],
    "deflicity_both": ["deflicity", "--chain", "chains/plane.json", "--system", "x2^2 - x1^3", "--rho", "x1",
                       "--point", "0,0", "--method", "both"],
    "deflicity_family": ["deflicity", "--trivial", "2", "--family", "x1^2 - eps", "--family", "x2^2 - eps",
                         "--point", "0,0", "--method", "both"],
    "ni": ["ni", "--trivial", "2", "--system", "x2*(x2 - x1^2)", "--rho", "x2", "--point", "1/3,0",
           "--order", "3"],
    "perturb": ["perturb-verify", "--trivial", "2", "--system", "x2*(x2 - x1^2)", "--rho", "x1",
                "--point", "0,0", "--eprime", "x1^4", "--seed", "3"],
    "sard": ["sard", "--trivial", "2", "--system", "x2^2 - x1^3", "--rho", "x1", "--e", "x1",
             "--point", "0,0", "--trials", "5", "--seed", "1"],
}

ERRORS = {
    "parse": (["derive", "--trivial", "1", "--poly", "x1 +* 2", "--word", "1"], 2),
    "usage": (["bounds", "--m", "1"], 2),
    "unknown_command": (["frobnicate"], 2),
    "bad_chain_file": (["il", "--chain", "chains/missing.json"], 2),
    "not_integrable": (["jet", "--chain", "chains/twisted.json", "--poly", "f1", "--point", "0,0,0",
                        "--order", "2"], 3),
    "inconclusive": (["mult", "--trivial", "2", "--system", "x1*x2", "--system", "x1", "--point", "0,0",
                      "--order", "6"], 4),
}


def invoke(argv, capsys):
    code = run(argv)
    return code, capsys.readouterr().out


@pytest.fixture(autouse=True)
def at_root(monkeypatch):
    monkeypatch.chdir(ROOT)


@pytest.fixture(scope="module")
def output_schema():
    return _schema("output.schema.json")


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, capsys, output_schema):
    code, out = invoke(CASES[name], capsys)
    assert code == 0, out
    path = GOLDEN / f"{name}.json"
    if os.environ.get("NOETHKIT_REGEN"):
        path.write_text(out)
    assert out == path.read_text()
    doc = json.loads(out)
    jsonschema.validate(doc, output_schema)
    assert doc["command"] == CASES[name][0]


def test_golden_values(capsys):
    docs = {name: json.loads(invoke(CASES[name], capsys)[1]) for name in
            ("bounds", "deflicity", "mult", "grid", "derive_twisted")}
    res = docs["bounds"]["result"]
    assert res["d_IL"] == 20741
    assert res["rough_k"]["power_product"] == "2^128"
    assert res["main_bound"]["power_product"] == "2^268435456"
    with mp.workdps(40):
        lo, hi = (mpf(v) for v in res["main_bound"]["log10"])
        assert lo <= 268435456 * log10(mpf(2)) <= hi
    assert docs["deflicity"]["result"]["deflicity"] == 2
    assert docs["mult"]["result"]["multiplicity"] == 4
    assert docs["grid"]["result"]["all_true"] is True
    assert docs["derive_twisted"]["result"]["derivative"] == "x1"


@pytest.mark.parametrize("name", ["bounds", "sard", "perturb", "deflicity_family"])
def test_byte_identical(name, capsys):
    first = invoke(CASES[name] + ["--json"], capsys)[1]
    second = invoke(CASES[name] + ["--json"], capsys)[1]
    assert first == second
    assert first.count("\n") == 1


@pytest.mark.parametrize("name", sorted(ERRORS))
def test_exit_codes(name, capsys, output_schema):
    argv, expected = ERRORS[name]
    code, out = invoke(argv, capsys)
    assert code == expected
    doc = json.loads(out)
    jsonschema.validate(doc, output_schema)
    assert set(doc["error"]) == {"type", "message"}


def test_ledger_violation_exit_code(capsys, monkeypatch):
    from noethkit import ni_perturb
    from noethkit.errors import DegreeLedgerError

    def boom(*args, **kwargs):
        raise DegreeLedgerError("forced")
    monkeypatch.setattr("noethkit.cli.perturb", boom)
    code, out = invoke(CASES["perturb"], capsys)
    assert code == 5 and json.loads(out)["error"]["type"] == "DegreeLedgerError"
    assert ni_perturb.perturb is not boom


def test_delta_expected_is_checked(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 1, "m": 1, "g": [["f1^2"]], "delta_expected": 1}))
    code, out = invoke(["il", "--chain", str(bad)], capsys)
    assert code == 2 and "delta_expected" in out


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "noethkit.cli", "loja", "--m", "1", "--n", "1",
                           "--delta", "1", "--d", "1", "--json"], capture_output=True, text=True, cwd=ROOT)
    assert proc.returncode == 0
    text = json.loads(proc.stdout)["result"]["loja_exponent"]["power_product"]
    assert BoundExpr.parse(text) == BoundExpr(1, [(4, 134217728)])
