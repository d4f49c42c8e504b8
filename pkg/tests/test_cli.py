import csv
import io
import subprocess
import sys

import pytest

from fockgate.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def diagonal(text):
    # diagonal cells of the text matrix, keyed by row label
    lines = text.strip().splitlines()
    labels = lines[0].split()
    return {row.split()[0]: row.split()[1 + i] for i, row in enumerate(lines[1:])}, labels


def test_effop_sign_element():
    code, out, _ = run("effop", "--builtin", "s11", "--R", "1/4")
    assert code == EXIT_OK
    diag, labels = diagonal(out)
    assert labels[:3] == ["|0>", "|1>", "|2>"]
    assert (diag["|0>"], diag["|1>"], diag["|2>"]) == ("0.5+0j", "-0.5+0j", "-0.625+0j")


def test_effop_phase_gate():
    code, out, _ = run("effop", "--builtin", "phase-gate")
    assert code == EXIT_OK
    diag, labels = diagonal(out)
    assert labels == ["VV", "VH", "HV", "HH"]
    assert [diag[k] for k in labels] == ["0.333333333333+0j"] * 3 + ["-0.333333333333+0j"]


GOLDEN_S11 = """row,col,re,im
|0>,|0>,0.5,0
|0>,|1>,0,0
|0>,|2>,0,0
|0>,|3>,0,0
|1>,|0>,0,0
|1>,|1>,-0.5,0
|1>,|2>,0,0
|1>,|3>,0,0
|2>,|0>,0,0
|2>,|1>,0,0
|2>,|2>,-0.625,0
|2>,|3>,0,0
|3>,|0>,0,0
|3>,|1>,0,0
|3>,|2>,0,0
|3>,|3>,-0.5,0
"""


def test_effop_csv_golden():
    code, out, _ = run("effop", "--builtin", "s11", "--R", "0.25", "--format", "csv")
    assert code == EXIT_OK
    assert out == GOLDEN_S11


def test_empty_circuit_is_identity(tmp_path):
    f = tmp_path / "empty.lop"
    f.write_text("# nothing but modes\nmodes 2\n")
    code, out, _ = run("effop", "--circuit", str(f), "--cutoff", "1", "--format", "csv")
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(out)))[1:]
    assert len(rows) == 9
    for row, col, re, im in rows:
        assert (re, im) == ("1" if row == col else "0", "0")


def test_circuit_file_matches_builtin(tmp_path):
    f = tmp_path / "ns.lop"
    f.write_text("modes 2\nbs 0 1 R=1/4\nancilla 1 in=1 out=1\ninput 2\n")
    code, out, _ = run("prob", "--circuit", str(f))
    assert code == EXIT_OK
    assert "success probability 0.390625" in out  # (5/8)^2


def test_parse_error_goes_to_stderr(tmp_path):
    f = tmp_path / "bad.lop"
    f.write_text("modes 2\nbs 0 5 R=2\n")
    code, out, err = run("effop", "--circuit", str(f))
    assert code == EXIT_USAGE
    assert out == ""
    assert err.count(": error:") == 2
    assert f"{f}:2:" in err


def test_missing_file():
    code, _, err = run("effop", "--circuit", "/nonexistent/x.lop")
    assert code == EXIT_USAGE and "cannot read" in err


def test_verify_default():
    code, out, _ = run("verify")
    assert code == EXIT_OK
    assert "9/9 checks passed" in out


def test_verify_impossible_tolerance():
    code, out, _ = run("verify", "--tol", "1e-30")
    assert code == EXIT_FAIL
    assert "FAIL" in out


def test_verify_negative_control():
    code, out, _ = run("verify", "--builtin", "phase-gate", "--R", "0.3", "--format", "csv")
    assert code == EXIT_FAIL
    row = next(line for line in out.splitlines() if line.startswith("phase-gate,"))
    assert row.endswith(",fail") and float(row.split(",")[2]) > 1e-3


def test_verify_capacity_error():
    code, out, err = run("verify", "--builtin", "phase-gate", "--cutoff", "1")
    assert code == EXIT_USAGE
    assert out == "" and "cutoff" in err
    code, _, err = run("verify", "--cutoff", "3")  # the filters need 4
    assert code == EXIT_USAGE and "at least 4" in err


def test_verify_phase_gate_at_its_photon_number():
    code, _, _ = run("verify", "--builtin", "phase-gate", "--cutoff", "2")
    assert code == EXIT_OK


def test_oracle_default():
    code, out, _ = run("oracle")
    assert code == EXIT_OK
    assert out.strip().endswith("PASS")


def test_oracle_deterministic():
    first = run("oracle", "--seed", "7", "--format", "csv")
    assert first == run("oracle", "--seed", "7", "--format", "csv")


def test_oracle_vacuum_cutoff():
    code, out, _ = run("oracle", "--cutoff", "0")
    assert code == EXIT_OK and "PASS" in out


def test_prob_circular_inputs():
    code, out, _ = run("prob", "--builtin", "pol-filter", "--input", "R,L")
    assert code == EXIT_OK
    assert "success probability 0.03125" in out
    assert "VV: 0.707106781187+0j" in out and "HH: 0.707106781187+0j" in out


def test_prob_phase_gate():
    code, out, _ = run("prob", "--builtin", "phase-gate", "--input", "H,H")
    assert code == EXIT_OK
    assert "success probability 0.111111111111" in out
    assert "HH: -1+0j" in out


def test_prob_core_filter_zero():
    code, out, _ = run("prob", "--builtin", "core-filter", "--input", "0,1")
    assert code == EXIT_OK
    assert "success probability 0" in out and "never succeeds" in out


def test_prob_csv_header_once():
    code, out, _ = run("prob", "--builtin", "pol-filter", "--input", "R,L", "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "input,probability,state,re,im"
    assert out.count("input,probability") == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["prob", "--builtin", "pol-filter", "--input", "R,X"],
        ["prob", "--builtin", "pol-filter"],
        ["prob", "--builtin", "core-filter", "--input", "5,5"],
        ["effop"],
        ["effop", "--builtin", "s11", "--tol", "0"],
        ["effop", "--builtin", "s11", "--cutoff", "-1"],
        ["effop", "--builtin", "nope"],
        ["effop", "--builtin", "s11", "--R", "abc"],
        ["frobnicate"],
    ],
)
def test_usage_errors(argv):
    code, _, _ = run(*argv)
    assert code == EXIT_USAGE


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "fockgate", "effop", "--builtin", "s00", "--R", "1/4", "--cutoff", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "0.25+0j" in proc.stdout
