import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import cvmbqc.gadgets as gadgets
from cvmbqc.cli import figure3_csv, main
from cvmbqc.correction import tmsv_cov

PROGRAMS = Path(__file__).parent.parent / "programs"


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_example1(capsys):
    code, out, _ = _run(capsys, "example1", "--s", "0.5", "--epsilon", "0.1", "--trials", "2000")
    assert code == 0
    assert "result: PASS" in out and "U_ec:" in out


def test_example2(capsys):
    code, out, _ = _run(capsys, "example2", "--r", "1", "--cluster-db", "10", "--trials", "0")
    assert code == 0
    assert out.count("PASS") == 5


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["example1", "--epsilon", "1.5"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["example1", "--epsilon", "0.1", "--cluster-db", "10"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 2


def test_run_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.prog"
    bad.write_text("modes: 2\nsteps:\n  cz 1 on 0 7\n")
    code, _, err = _run(capsys, "run", str(bad))
    assert code == 2
    assert "line 3, column 3" in err


def test_run_missing_file(capsys):
    code, _, err = _run(capsys, "run", "/nonexistent.prog")
    assert code == 2 and err.startswith("error:")


def test_run_needs_epsilon(tmp_path, capsys):
    prog = tmp_path / "p.prog"
    prog.write_text("modes: 1\nsteps:\n  phase 1 on 0\n")
    code, _, err = _run(capsys, "run", str(prog), "--mode", "corrected")
    assert code == 2 and "epsilon" in err


@pytest.mark.parametrize("path", sorted(PROGRAMS.glob("*.prog")), ids=lambda p: p.name)
def test_run_shipped_programs(path, capsys):
    code, out, _ = _run(capsys, "run", str(path), "--trials", "2000")
    assert code == 0
    assert "ledger:" in out and "total_updated=" in out


def test_run_four_mode_ledger(capsys):
    _, out, _ = _run(capsys, "run", str(PROGRAMS / "four_mode_single_step.prog"))
    assert "total_updated=28" in out


def test_run_example2_program_matches_target(tmp_path, capsys):
    csv = tmp_path / "cov.csv"
    code, _, _ = _run(capsys, "run", str(PROGRAMS / "two_mode_squeezed.prog"), "--trials", "5000", "--out", str(csv))
    assert code == 0
    cov = np.loadtxt(csv, delimiter=",")
    assert np.abs(cov - tmsv_cov(1.0)).max() < 4 / np.sqrt(5000)


def test_figure3_bytes_stable(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["figure3", "--out", str(a)]) == 0
    assert main(["figure3", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()
    code, out, _ = _run(capsys, "figure3")
    assert out == a.read_text()


def test_figure3_properties():
    lines = figure3_csv([4.0, 6.0, 10.0]).strip().split("\n")
    assert lines[0] == "input_squeezing_db,alpha_db_4,alpha_db_6,alpha_db_10"
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
    assert np.all(data[0, 1:] == 0)
    assert np.all(np.diff(data[:, 1:], axis=0) > 0)
    assert np.all(data[1:, 1] > data[1:, 2]) and np.all(data[1:, 2] > data[1:, 3])


def test_figure3_epsilon_columns():
    head = figure3_csv([], epsilons=[0.1, 0.2]).split("\n")[0]
    assert head == "input_squeezing_db,alpha_db_eps_0.1,alpha_db_eps_0.2"


def test_verify_deterministic(capsys):
    code, a, _ = _run(capsys, "verify", "--trials", "500", "--seed", "3")
    _, b, _ = _run(capsys, "verify", "--trials", "500", "--seed", "3")
    assert code == 0 and a == b
    assert "FAIL" not in a


def test_verify_catches_feedforward_sign_flip(monkeypatch, capsys):
    original = gadgets.feedforward_single

    def flipped(*args):
        ff = np.array(original(*args))
        ff[..., 1] *= -1
        return ff

    monkeypatch.setattr(gadgets, "feedforward_single", flipped)
    code, out, _ = _run(capsys, "verify", "--trials", "500")
    assert code == 1
    assert "FAIL [mbqc-gadgets]" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cvmbqc", "example2", "--trials", "0"], capture_output=True, text=True)
    assert res.returncode == 0 and "alpha:" in res.stdout
