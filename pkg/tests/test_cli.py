import json
import subprocess
import sys

import numpy as np
import pytest

from ritzbounds import cli, linalg
from ritzbounds.config import scenario_dir, scenario_names


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def run_bin(*args, env=None):
    return subprocess.run([sys.executable, "-m", "ritzbounds", *args], capture_output=True, text=True,
                          check=False, env=env)


def test_study_diag_m3(capsys):
    assert cli.main(["study", str(scenario_dir() / "diag_m3.json")]) == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("n,pooled_dim,mu_hat_1")
    assert "k=1: 1, k=2: 2, k=3: 3" in captured.err


def test_study_laplace_m2(tmp_path, capsys):
    out = tmp_path / "laplace.csv"
    assert cli.main(["study", str(scenario_dir() / "laplace_m2.json"), "--csv", str(out)]) == 0
    last = out.read_text().splitlines()[-1].split(",")
    assert float(last[6]) < 1e-3
    assert "csv:" in capsys.readouterr().out


def test_study_m_zero(tmp_path, capsys):
    path = write(tmp_path, "m0.json", {"operator": {"kind": "diagonal", "rule": "affine"},
                                       "family": "truncation", "m": 0, "steps": 3})
    assert cli.main(["study", path]) == 1
    assert "m must be ≥ 1" in capsys.readouterr().err


@pytest.mark.parametrize("patch, field", [
    ({"steps": 0}, "steps"),
    ({"target_tol": -1}, "target_tol"),
    ({"operator": {"kind": "banana"}}, "operator.kind"),
    ({"operator": {"kind": "schrodinger_1d", "potential": "cubic", "half_width": 1, "nodes": 5}},
     "operator.potential"),
    ({"family": {"kind": "mesh_interpolation"}}, "family"),
])
def test_study_invalid_config_names_field(tmp_path, capsys, patch, field):
    data = {"operator": {"kind": "diagonal", "rule": "affine"}, "family": "truncation", "m": 2, "steps": 3}
    data.update(patch)
    assert cli.main(["study", write(tmp_path, "bad.json", data)]) == 1
    assert field in capsys.readouterr().err


def test_study_unmet_target(tmp_path, capsys):
    data = {"operator": {"kind": "dirichlet_laplacian", "length": "pi", "nodes": 15},
            "family": {"kind": "mesh_interpolation"}, "m": 1, "steps": 4, "target_tol": 1e-9}
    assert cli.main(["study", write(tmp_path, "s.json", data)]) == 2
    assert "k=1: never" in capsys.readouterr().err


def test_spectrum_full_basis_matrix(tmp_path, capsys):
    a = [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]
    data = {"operator": {"kind": "matrix", "entries": a}, "basis": np.eye(3).tolist()}
    csv_path = tmp_path / "spec.csv"
    assert cli.main(["spectrum", write(tmp_path, "f.json", data), "--csv", str(csv_path)]) == 0
    rows = csv_path.read_text().splitlines()[1:]
    values = [float(r.split(",")[1]) for r in rows]
    assert np.allclose(values, np.linalg.eigvalsh(np.array(a, dtype=float)), atol=1e-12)


def test_spectrum_complex_entries(tmp_path, capsys):
    data = {"operator": {"kind": "matrix", "entries": [[1, [0, -1]], [[0, 1], 1]]},
            "basis": [{"coords": [[0, 1]]}, {"coords": [[1, 1]]}]}
    assert cli.main(["spectrum", write(tmp_path, "c.json", data)]) == 0
    lines = capsys.readouterr().out.splitlines()[1:3]
    values = [float(line.split()[1]) for line in lines]
    assert np.allclose(values, [0.0, 2.0], atol=1e-12)


def test_spectrum_single_hat(capsys):
    assert cli.main(["spectrum", str(scenario_dir() / "single_hat.json")]) == 0
    assert "1.21585" in capsys.readouterr().out


def test_spectrum_family_step(tmp_path, capsys):
    data = {"operator": {"kind": "dirichlet_laplacian", "length": "pi", "nodes": 31},
            "family": {"kind": "mesh_interpolation"}, "m": 2, "step": 3, "pooled": True}
    assert cli.main(["spectrum", write(tmp_path, "p.json", data)]) == 0
    assert "basis vectors" in capsys.readouterr().out


def test_spectrum_dependent_basis(tmp_path, capsys):
    data = {"operator": {"kind": "matrix", "entries": [[2, -1], [-1, 2]]}, "basis": [[1, 2], [1, 2]]}
    assert cli.main(["spectrum", write(tmp_path, "dep.json", data)]) == 1
    err = capsys.readouterr().err
    assert "degenerate" in err and "basis vector 1" in err


def test_verify_default_passes(capsys):
    assert cli.main(["verify", "--trials", "10"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert [line.split()[0] for line in out] == ["oracle", "minimax", "upper_bound", "monotone", "sandwich"]
    assert all("10/10" in line for line in out)


def test_verify_zero_trials(capsys):
    assert cli.main(["verify", "--trials", "0"]) == 0
    captured = capsys.readouterr()
    assert "warning" in captured.err
    assert captured.out.count("0/0") == 5


def test_verify_detects_corrupted_solver(monkeypatch, capsys):
    original = linalg._jacobi

    def corrupted(a, *args, **kwargs):
        values, vectors = original(a, *args, **kwargs)
        return values * (1 + 1e-6), vectors

    monkeypatch.setattr(linalg, "_jacobi", corrupted)
    assert cli.main(["verify", "--trials", "5", "--seed", "4"]) == 3
    out = capsys.readouterr().out
    assert "reproduce: ritzbounds verify --seed 4 --suite oracle --case" in out


def test_verify_replays_single_case(capsys):
    assert cli.main(["verify", "--suite", "minimax", "--case", "17", "--seed", "2"]) == 0
    assert capsys.readouterr().out.startswith("minimax      ok   1/1")


def test_threads_env_fallback(monkeypatch, capsys):
    monkeypatch.setenv("RITZ_THREADS", "zero")
    assert cli.main(["verify", "--trials", "1"]) == 1
    assert "RITZ_THREADS" in capsys.readouterr().err
    monkeypatch.setenv("RITZ_THREADS", "3")
    assert cli._threads(None) == 3
    assert cli._threads(2) == 2


def test_demo_lists_and_runs(tmp_path, capsys):
    assert {"diag_m3", "laplace_m2", "harmonic_m3", "single_hat"} <= set(scenario_names())
    assert cli.main(["demo", "multiplicity_m3", "--out-dir", str(tmp_path)]) == 0
    assert (tmp_path / "multiplicity_m3.csv").exists()
    assert cli.main(["demo", "nope"]) == 1


def test_binary_exit_codes(tmp_path):
    assert run_bin("study", str(scenario_dir() / "diag_m3.json")).returncode == 0
    bad = write(tmp_path, "m0.json", {"operator": {"kind": "diagonal", "rule": "affine"},
                                      "family": "truncation", "m": 0, "steps": 1})
    proc = run_bin("study", bad)
    assert proc.returncode == 1 and "m must be ≥ 1" in proc.stderr
    assert run_bin("verify", "--trials", "0").returncode == 0
    assert run_bin("study", str(tmp_path / "missing.json")).returncode == 1


def test_binary_corrupted_solver_exit_3():
    code = ("import sys, ritzbounds.linalg as L\n"
            "orig = L._jacobi\n"
            "L._jacobi = lambda a, *k: (orig(a, *k)[0] + 1e-7, orig(a, *k)[1])\n"
            "from ritzbounds.cli import main\n"
            "sys.exit(main(['verify', '--trials', '3']))\n")
    proc = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=False)
    assert proc.returncode == 3
    assert "--seed 0" in proc.stdout and "--case" in proc.stdout
