from __future__ import annotations

import json
import subprocess
import sys

import pytest

from hermtheta.cli import EXIT_FAIL, EXIT_MATH, EXIT_OK, EXIT_USAGE, main
from hermtheta.lambda2 import parse_gauss

from conftest import DATA


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eisenstein_ok(capsys):
    code, out, err = run(capsys, "eisenstein", "--weight", "4", "--trace", "2", "--format", "table")
    assert code == EXIT_OK
    assert "[1,1+i,1]" in out and "2880" in out
    assert "in_theorem_range=False" in err


def test_eisenstein_records_deterministic(capsys, tmp_path):
    f1, f2 = tmp_path / "a.txt", tmp_path / "b.txt"
    for f in (f1, f2):
        assert main(["eisenstein", "--disc", "-3", "--weight", "12", "--trace", "2", "--out", str(f)]) == EXIT_OK
    assert f1.read_text() == f2.read_text()
    from hermtheta.qseries import loads

    assert loads(f1.read_text()).weight == 12


@pytest.mark.parametrize("argv", [
    ["eisenstein", "--weight", "7"],
    ["eisenstein", "--weight", "8", "--disc", "-12"],
    ["eisenstein"],
    ["verify", "no-such-check"],
    ["verify", "mod7", "--trace", "3"],
    ["conjecture-scan", "--prime", "13"],
    ["frobnicate"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_USAGE


def test_theta_g4(capsys):
    code, out, err = run(capsys, "theta", str(DATA / "g4.gram"), "--trace", "2", "--format", "table")
    assert code == EXIT_OK
    assert "half-norm 1: 240 vectors" in err
    assert "[1,1+i,1]        2880" in out


def test_theta_rank_one_support(capsys, tmp_path):
    from hermtheta.lambda2 import rank
    from hermtheta.qseries import loads

    f = tmp_path / "two.gram"
    f.write_text("disc -4\nrank 1\nunimodular 0\nlabel two\n2,0\n")
    code, out, _ = run(capsys, "theta", str(f), "--trace", "3")
    assert code == EXIT_OK
    th = loads(out)
    # X* G X has rank <= 1, so rank-2 indices such as [1,1+i,1] never occur
    assert all(rank(H) <= 1 for H in th.coeffs)
    assert [th[parse_gauss(s)] for s in ("[1,2,1]", "[1,-2,1]", "[1,2i,1]", "[1,-2i,1]", "[1,1+i,1]")] == [4, 4, 4, 4, 0]


def test_theta_malformed(capsys, tmp_path):
    bad = tmp_path / "bad.gram"
    bad.write_text("disc -4\nrank 2\nunimodular 1\nlabel x\n2,0 1,0\n")
    assert run(capsys, "theta", str(bad))[0] == EXIT_USAGE


def test_theta_not_even(capsys, tmp_path):
    f = tmp_path / "odd.gram"
    f.write_text("disc -4\nrank 1\nunimodular 1\nlabel odd\n1,0\n")
    assert run(capsys, "theta", str(f), "--trace", "1")[0] == EXIT_MATH


def test_theta_not_definite(capsys, tmp_path):
    f = tmp_path / "indef.gram"
    f.write_text("disc -4\nrank 1\nunimodular 0\nlabel neg\n-2,0\n")
    assert run(capsys, "theta", str(f))[0] == EXIT_MATH


def test_table1_reports_mismatch(capsys):
    code, out, _ = run(capsys, "table", "1")
    assert code == EXIT_FAIL
    assert "[3,0,1]" in out and "MISMATCH" in out and "22/23 rows equal" in out


def test_table2_passes(capsys, gens):
    code, out, _ = run(capsys, "table", "2")
    assert code == EXIT_OK and "29/29 rows equal" in out


def test_table_tampered_golden(capsys, tmp_path):
    from importlib import resources

    text = resources.files("hermtheta.data").joinpath("table1.txt").read_text()
    f = tmp_path / "t1.txt"
    f.write_text(text.replace("2880", "2881", 1))
    assert run(capsys, "table", "1", "--golden", str(f))[0] == EXIT_FAIL


def test_verify_records(capsys, gens):
    code, out, _ = run(capsys, "verify", "neg-kernel", "--no-external-data", "--format", "records")
    assert code == EXIT_OK
    rec = json.loads(out.splitlines()[0])
    assert rec["check"] == "neg-kernel" and rec["status"] == "PASS" and rec["prime"] == 7


def test_verify_uses_cache(capsys, gens, tmp_path, monkeypatch):
    from hermtheta.graded_ring import save_generators

    save_generators(gens, tmp_path / "generators-T6")
    monkeypatch.setenv("HERMTHETA_CACHE", str(tmp_path))
    code, _, err = run(capsys, "verify", "cor1")
    assert code == EXIT_OK and "building" not in err


def test_conjecture_scan(capsys, gens):
    code, out, _ = run(capsys, "conjecture-scan", "--prime", "7")
    assert code == EXIT_OK
    assert "theta_H1: ProvedViaSturm" in out and "theta_H3: Refuted" in out


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "hermtheta.cli", "eisenstein", "--weight", "9"],
                       capture_output=True, text=True)
    assert r.returncode == EXIT_USAGE and "weight" in r.stderr
