import json

import pytest

from silentqec import cli
from silentqec.artifacts import read_csv


def _run(tmp_path, name, *args):
    out = tmp_path / name
    rc = cli.main([*args, "--output", str(out)])
    return rc, out


def test_budget_minimal_flags(tmp_path):
    rc, out = _run(tmp_path, "b", "--experiment", "budget", "--n-ops", "1e15", "--n-logical", "100",
                   "--n-code", "1000", "--p", "1e-4", "--p-th", "1e-2", "--p-s", "1e-20")
    assert rc == 0
    row = read_csv(out / "results.csv")[0]
    assert abs(float(row["silent_term"]) - 1.0) < 1e-12
    hdr = json.loads((out / "header.json").read_text())
    assert hdr["config"]["noise"]["p_s"] == 1e-20 and "version" in hdr


def test_negative_shots_rejected(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("experiment: montecarlo\nshots: -5\n")
    assert cli.main(["--config", str(cfg)]) == 2
    assert "shots" in capsys.readouterr().err


def test_unknown_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("experiment: montecarlo\nnoise:\n  temperature: 3\n")
    assert cli.main(["--config", str(cfg)]) == 2
    assert "temperature" in capsys.readouterr().err


def test_malformed_file(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("experiment: [unclosed\n")
    assert cli.main(["--config", str(cfg)]) == 2


def test_circuit_mode_large_surface_rejected(tmp_path, capsys):
    rc, _ = _run(tmp_path, "x", "precision", "--code", "surface", "--size", "5", "--mode", "circuit")
    assert rc == 2
    assert "mode" in capsys.readouterr().err


def test_parse_twice_identical(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("experiment: threshold\nsweep:\n  sizes: [3, 5]\n  ps: [1e-2, 3e-2]\nshots: 1e3\n")
    a = cli.canonical(cli.parse_config(["--config", str(cfg)]))
    b = cli.canonical(cli.parse_config(["--config", str(cfg)]))
    assert a == b and a["shots"] == 1000


def test_flags_override_file(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("experiment: montecarlo\nnoise:\n  p: 0.1\n")
    assert cli.parse_config(["--config", str(cfg), "--p", "2e-2"])["p"] == 0.02


def test_describe(tmp_path, capsys):
    rc, out = _run(tmp_path, "d", "describe", "--code", "surface", "--size", "3")
    assert rc == 0
    text = capsys.readouterr().out
    assert "data qubits 13" in text and "stabilizers 12" in text
    rows = read_csv(out / "results.csv")
    assert sum(r["object"] == "stabilizer" for r in rows) == 12


def test_closed_form_check(tmp_path):
    rc, out = _run(tmp_path, "e", "eq4-check", "--size", "3", "--eta", "0.1", "--seed", "7")
    assert rc == 0
    assert max(float(r["max_deviation"]) for r in read_csv(out / "results.csv")) < 1e-12


@pytest.mark.parametrize(
    "args",
    [
        ["eq4-check", "--eta", "0.3", "--angle-mode", "uniform", "--shots", "20"],
        ["precision", "--etas", "0.1,0.2", "--angle-mode", "uniform", "--shots", "300", "--cycles", "2", "--rows", "true"],
        ["silent-drift", "--size", "5", "--eta", "0.05", "--T", "5", "--shots", "100", "--silent", "1"],
        ["montecarlo", "--code", "surface", "--p", "0.05", "--q", "0.01", "--cycles", "2", "--shots", "3000"],
        ["threshold", "--code", "surface", "--sizes", "3,5", "--ps", "0.03,0.1", "--shots", "2000"],
        ["silent-mc", "--sizes", "3,5", "--p", "0.02", "--p-s", "0.05", "--cycles", "4", "--shots", "2000"],
    ],
    ids=lambda a: a[0],
)
def test_header_rerun_is_byte_identical(tmp_path, args):
    rc, first = _run(tmp_path, "a", *args, "--seed", "123", "--threads", "1")
    assert rc == 0
    rc, again = _run(tmp_path, "b", "--config", str(first / "header.json"), "--threads", "3")
    assert rc == 0
    assert (first / "results.csv").read_bytes() == (again / "results.csv").read_bytes()
