import json
import subprocess
import sys

import pytest

from tatekit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_count(capsys):
    code, out = run(capsys, "count", "--p", "5")
    assert code == 0 and out["nonsingular_pairs"] == 20


def test_frobenius_and_torsion(capsys):
    code, out = run(capsys, "frobenius", "--p", "7", "--a", "1", "--b", "4", "--n", "3")
    assert code == 0 and out["trace"] == out["trace_of_curve"] % 3
    code, out = run(capsys, "torsion", "--p", "7", "--a", "1", "--b", "4", "--n", "3")
    assert code == 0 and out["degree"] == 6


def test_exit_codes(capsys):
    assert run(capsys, "frobenius", "--p", "7", "--a", "0", "--b", "0", "--n", "3")[0] == 2
    assert run(capsys, "torsion", "--p", "7", "--a", "1", "--b", "4", "--n", "29")[0] == 3
    assert run(capsys, "twins", "--p", "5", "--level-bound", "8")[0] == 4
    assert run(capsys, "coprime-index", "--disc", "-15", "--ideal", "3,2,1", "--ell", "2")[0] == 2


def test_other_subcommands(capsys):
    assert run(capsys, "homspace", "--p", "7", "--curve1", "1,4", "--curve2", "3,4", "--n", "4")[1]["isomorphic"]
    assert run(capsys, "isogeny", "--p", "7", "--curve", "1,4", "--kernel-order", "3")[1]["isogenies"]
    assert run(capsys, "quaternion", "--n", "5", "--samples", "100")[1]["squares"] == [2, 0, 0, 0]
    assert run(capsys, "classgroup", "--disc", "-23")[1]["class_number"] == 3
    out = run(capsys, "coprime-index", "--disc", "-15", "--ideal", "2,0,1", "--ell", "3")[1]
    assert out["index"] % 3


def test_twins_output_is_byte_identical():
    cmd = [sys.executable, "-m", "tatekit.cli", "twins", "--p", "7", "--level-bound", "16"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["p"] == 7


def test_report(tmp_path, capsys):
    code, out = run(capsys, "report", "--out", str(tmp_path), "--primes", "5", "7", "--level-bound", "8")
    assert code == 0
    for f in out["files"]:
        assert (tmp_path / f).stat().st_size > 0
    assert (tmp_path / "traces.png").read_bytes()[:4] == b"\x89PNG"
    assert out["twin_primes"] == [7]
