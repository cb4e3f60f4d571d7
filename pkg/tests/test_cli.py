import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from kgshape.cli import main

GOLDEN = Path(__file__).parent / "golden"

TABLE1 = ["--family", "tanh", "--m", "0.25", "--s0", "4", "--v0", "0.35"]
TABLE3 = ["--family", "exp", "--m", "1.6", "--s0", "4", "--v0", "0.25"]
TABLE4 = ["--family", "linear", "--m", "0.5", "--s0", "4", "--v0", "0.35"]

RECORD_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "command", "inputs", "results", "warnings"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": "1"},
        "command": {"enum": ["spectrum", "tables", "wavefunction", "verify"]},
        "inputs": {"type": "object"},
        "results": {"type": "object"},
        "warnings": {"type": "array", "items": {"type": "string"}},
    },
}

NUM_OR_NULL = {"type": ["number", "null"]}

STATE_SCHEMA = {
    "type": "object",
    "required": ["n", "sign", "energy", "epsilon", "A", "B"],
    "properties": {
        "n": {"type": "integer", "minimum": 0},
        "sign": {"enum": ["+", "-"]},
        "energy": {"type": "number"},
    },
}

SPECTRUM_SCHEMA = {
    "type": "object",
    "required": ["family", "couplings", "n_max_scan", "pairing", "accepted", "rejected"],
    "properties": {
        "accepted": {"type": "array", "items": STATE_SCHEMA},
        "rejected": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["n", "sign", "reason"],
                "properties": {
                    "reason": {"enum": ["NoRealRoot", "S1NonPositive", "S2NonPositive", "ANonPositive",
                                        "LevelBoundExceeded", "PartnerRejected"]}
                },
            },
        },
    },
}

TABLES_SCHEMA = {
    "type": "object",
    "required": ["tolerance", "tables", "pass"],
    "properties": {
        "pass": {"type": "boolean"},
        "tables": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["table", "family", "entries", "max_abs_diff", "pass"],
                "properties": {
                    "entries": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["n", "quantity", "published", "computed", "abs_diff"],
                            "properties": {"computed": NUM_OR_NULL, "abs_diff": NUM_OR_NULL},
                        },
                    }
                },
            },
        },
    },
}

VERIFY_SCHEMA = {
    "type": "object",
    "required": ["rows", "pass"],
    "properties": {
        "rows": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["check", "status"],
                "properties": {
                    "check": {"enum": ["oracle", "shape", "pt_defect", "shifted_residual",
                                       "spectrum_shift_invariance"]},
                    "status": {"enum": ["pass", "fail", "skipped"]},
                },
            },
        },
    },
}

WAVEFUNCTION_SCHEMA = {
    "type": "object",
    "required": ["energy", "epsilon", "shift", "residual", "node_count", "x", "re_psi", "im_psi"],
    "properties": {
        "x": {"type": "array", "items": {"type": "number"}},
        "re_psi": {"type": "array", "items": {"type": "number"}},
        "im_psi": {"type": "array", "items": {"type": "number"}},
    },
}


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def run_json(argv, schema):
    code, text = run(argv)
    record = json.loads(text)
    jsonschema.validate(record, RECORD_SCHEMA)
    jsonschema.validate(record["results"], schema)
    return code, record


def read_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    comments = dict(ln[2:].split("=", 1) for ln in text.splitlines() if ln.startswith("# "))
    return list(csv.DictReader(lines)), comments


def assert_close_tree(a, b, rel=1e-12):
    if isinstance(a, dict):
        assert a.keys() == b.keys()
        for k in a:
            assert_close_tree(a[k], b[k], rel)
    elif isinstance(a, list):
        assert len(a) == len(b)
        for x, y in zip(a, b):
            assert_close_tree(x, y, rel)
    elif isinstance(a, float) and isinstance(b, float):
        assert a == pytest.approx(b, rel=rel, abs=1e-300)
    else:
        assert a == b


# --- spectrum ------------------------------------------------------------------------


def test_spectrum_table1_golden():
    code, record = run_json(["spectrum", *TABLE1], SPECTRUM_SCHEMA)
    assert code == 0
    golden = json.loads((GOLDEN / "spectrum_table1.json").read_text())
    assert_close_tree(record, golden)
    counts = {"+": 0, "-": 0}
    for s in record["results"]["accepted"]:
        counts[s["sign"]] += 1
    assert counts == {"+": 3, "-": 3}


def test_spectrum_linear_contains_published_level():
    code, record = run_json(["spectrum", *TABLE4, "--nmax", "5"], SPECTRUM_SCHEMA)
    assert code == 0
    levels = {(s["n"], s["sign"]): s["energy"] for s in record["results"]["accepted"]}
    assert levels[(2, "-")] == pytest.approx(-3.18785, abs=1e-4)


def test_spectrum_precondition_exit():
    code, text = run(["spectrum", "--family", "tanh", "--m", "1", "--s0", "1", "--v0", "2"])
    assert code == 2 and text == ""


def test_spectrum_csv():
    code, text = run(["spectrum", *TABLE1, "--format", "csv"])
    assert code == 0
    rows, _ = read_csv(text)
    accepted = [r for r in rows if r["status"] == "accepted"]
    assert len(accepted) == 6
    assert float(accepted[0]["energy"]) == pytest.approx(1.83314, abs=1e-5)
    assert {r["reason"] for r in rows if r["status"] == "rejected"} == {"S1NonPositive", "S2NonPositive"}


def test_spectrum_pairing_flag():
    args = ["spectrum", "--family", "tanh", "--m", "0.5", "--s0", "4", "--v0", "0.35"]
    _, row = run_json(args, SPECTRUM_SCHEMA)
    _, branch = run_json(args + ["--pairing", "branch"], SPECTRUM_SCHEMA)
    assert len(row["results"]["accepted"]) == 4
    assert len(branch["results"]["accepted"]) == 5


def test_numbers_keep_full_precision():
    _, text = run(["spectrum", *TABLE1])
    record = json.loads(text)
    e = record["results"]["accepted"][0]["energy"]
    # repr output round-trips the double exactly
    assert repr(e) in text
    assert len(repr(e).replace("-", "").replace(".", "").lstrip("0")) >= 12


@pytest.mark.parametrize("command", [["spectrum", *TABLE1], ["spectrum", *TABLE3, "--pairing", "branch"]])
def test_round_trip_inputs_reproduce_results(command):
    _, first = run(command)
    record = json.loads(first)
    inputs = record["inputs"]
    argv = ["spectrum", "--family", inputs["family"], "--m", repr(inputs["m"]), "--s0", repr(inputs["s0"]),
            "--v0", repr(inputs["v0"]), "--nmax", str(inputs["nmax"]), "--pairing", inputs["pairing"]]
    _, second = run(argv)
    assert second == first


# --- tables --------------------------------------------------------------------------


def test_tables_all():
    code, record = run_json(["tables", "--table", "all"], TABLES_SCHEMA)
    assert code == 0
    results = record["results"]
    assert results["pass"] is True
    assert [t["table"] for t in results["tables"]] == [1, 2, 3, 4]
    assert [len(t["entries"]) for t in results["tables"]] == [18, 12, 8, 6]
    for t in results["tables"]:
        assert t["max_abs_diff"] < 1e-4


def test_tables_single():
    code, record = run_json(["tables", "--table", "3"], TABLES_SCHEMA)
    assert code == 0
    entries = record["results"]["tables"][0]["entries"]
    minus = [e for e in entries if e["quantity"] == "A-" and e["n"] == 1][0]
    assert minus["published"] == 1.00294
    assert minus["abs_diff"] < 1e-4


def test_tables_csv_golden():
    code, text = run(["tables", "--format", "csv"])
    assert code == 0
    rows, comments = read_csv(text)
    golden, _ = read_csv((GOLDEN / "tables_all.csv").read_text())
    assert len(rows) == len(golden) == 44
    for r, g in zip(rows, golden):
        assert (r["table"], r["n"], r["quantity"], r["published"]) == (g["table"], g["n"], g["quantity"], g["published"])
        assert float(r["computed"]) == pytest.approx(float(g["computed"]), rel=1e-12)
    assert comments["pass"] == "true"


def test_tables_failure_exit(monkeypatch):
    import kgshape.cli as cli

    monkeypatch.setattr(cli, "reproduce_table", _broken_reproduce)
    code, _ = run(["tables", "--table", "1"])
    assert code == 4


def _broken_reproduce(number):
    from kgshape.tables import reproduce_table

    out = reproduce_table(number)
    out.entries[0]["abs_diff"] = 1.0
    return out


# --- wavefunction ----------------------------------------------------------------


def test_wavefunction_linear_ground():
    code, text = run(["wavefunction", *TABLE4, "--n", "0", "--sign", "plus"])
    assert code == 0
    rows, meta = read_csv(text)
    assert list(rows[0]) == ["x", "re_psi", "im_psi"]
    assert len(rows) == 4001
    assert int(meta["node_count"]) == 0
    assert float(meta["residual"]) < 1e-4
    assert all(float(r["im_psi"]) == 0 for r in rows)
    h = float(rows[1]["x"]) - float(rows[0]["x"])
    total = sum(float(r["re_psi"]) ** 2 for r in rows) - 0.5 * (
        float(rows[0]["re_psi"]) ** 2 + float(rows[-1]["re_psi"]) ** 2)
    assert total * h == pytest.approx(1.0, abs=1e-8)


def test_wavefunction_shifted():
    _, plain = run(["wavefunction", *TABLE4, "--n", "0", "--sign", "plus"])
    code, text = run(["wavefunction", *TABLE4, "--n", "0", "--sign", "plus", "--shift", "0.3"])
    assert code == 0
    rows, meta = read_csv(text)
    _, plain_meta = read_csv(plain)
    assert meta["epsilon"] == plain_meta["epsilon"]
    assert meta["shift"] == "0.3"
    assert float(meta["residual"]) < 1e-3
    assert any(float(r["im_psi"]) != 0 for r in rows)


def test_wavefunction_rejected_state(capsys):
    code, text = run(["wavefunction", *TABLE1, "--n", "5", "--sign", "plus"])
    assert code == 3 and text == ""
    assert "S2NonPositive" in capsys.readouterr().err


def test_wavefunction_json_and_grid():
    code, record = run_json(["wavefunction", *TABLE1, "--n", "1", "--sign", "minus", "--grid", "-15:15:4001",
                             "--format", "json"], WAVEFUNCTION_SCHEMA)
    assert code == 0
    results = record["results"]
    assert results["node_count"] == 1
    assert results["residual"] < 1e-3
    assert len(results["x"]) == 4001


def test_wavefunction_bad_grid_is_precondition():
    code, _ = run(["wavefunction", *TABLE4, "--n", "0", "--sign", "plus", "--grid", "5:1:10"])
    assert code == 2


def test_wavefunction_pole_band_is_precondition():
    code, _ = run(["wavefunction", *TABLE1, "--n", "0", "--sign", "plus", "--shift", "1.55"])
    assert code == 2


# --- verify --------------------------------------------------------------------------


def test_verify_linear_all():
    code, record = run_json(["verify", *TABLE4, "--nmax", "2"], VERIFY_SCHEMA)
    assert code == 0
    rows = record["results"]["rows"]
    oracle = [r for r in rows if r["check"] == "oracle"]
    assert len(oracle) == 6 and all(r["abs_diff"] < 2e-3 for r in oracle)
    assert all(r["defect"] < 1e-10 for r in rows if r["check"] == "shape")


def test_verify_exp_marks_marginal_rows():
    code, record = run_json(["verify", *TABLE3, "--check", "oracle"], VERIFY_SCHEMA)
    assert code == 0
    rows = {(r["n"], r["sign"]): r for r in record["results"]["rows"]}
    assert rows[(1, "-")]["status"] == "skipped" and rows[(1, "-")]["skipped_marginal"] is True
    assert rows[(1, "-")]["oracle"] is None
    assert any("skipped" in w for w in record["warnings"])


def test_verify_pt():
    code, record = run_json(["verify", *TABLE1, "--check", "pt", "--shift", "0.4"], VERIFY_SCHEMA)
    assert code == 0
    rows = record["results"]["rows"]
    assert all(r["defect"] > 0 for r in rows if r["check"] == "pt_defect")
    assert all(r["residual"] < 1e-3 for r in rows if r["check"] == "shifted_residual")
    assert [r["status"] for r in rows if r["check"] == "spectrum_shift_invariance"] == ["pass"]


def test_verify_failure_exit():
    # too few oracle points to meet the tolerance on the tanh table
    code, record = run_json(["verify", *TABLE1, "--check", "oracle", "--oracle-points", "101"], VERIFY_SCHEMA)
    assert code == 4
    assert record["results"]["pass"] is False


def test_verify_csv():
    code, text = run(["verify", *TABLE4, "--nmax", "1", "--check", "shape", "--format", "csv"])
    assert code == 0
    rows, comments = read_csv(text)
    assert comments["pass"] == "true"
    assert len(rows) == 8 and {r["status"] for r in rows} == {"pass"}


# --- usage ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["spectrum", "--family", "cosh", "--m", "1", "--s0", "2", "--v0", "0"],
        ["spectrum", "--family", "tanh", "--m", "abc", "--s0", "2", "--v0", "0"],
        ["spectrum", "--family", "tanh", "--s0", "2", "--v0", "0"],
        ["wavefunction", *TABLE1, "--n", "0", "--sign", "up"],
    ],
)
def test_usage_errors(argv, capsys):
    code, text = run(argv)
    assert code == 1 and text == ""
    assert "usage" in capsys.readouterr().err


def test_help_exits_zero(capsys):
    code, _ = run(["--help"])
    assert code == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "kgshape", "spectrum", *TABLE3],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    record = json.loads(proc.stdout)
    assert len(record["results"]["accepted"]) == 4
    bad = subprocess.run([sys.executable, "-m", "kgshape", "spectrum"], capture_output=True, text=True)
    assert bad.returncode == 1 and "usage" in bad.stderr
