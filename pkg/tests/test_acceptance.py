"""Acceptance criteria, each at its stated tolerance and time budget.

A summary line per criterion is printed at the end of the pytest run.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from ritzbounds import (family_mesh_interpolation, family_oracle, family_truncation, form_limit_check,
                        gram_limit_check, make_diagonal_operator, make_dirichlet_laplacian,
                        make_schrodinger_1d, run_study, supinf_verify)
from ritzbounds.config import scenario_dir
from ritzbounds.forms import CoefficientVector
from ritzbounds.linalg import HermitianMatrix
from ritzbounds.oracles import random_hermitian
from ritzbounds.suites import oracle_suite, upper_bound_suite

SEED = 20240611


@pytest.mark.criterion(1, "generalized eigensolver matches the inertia-bisection oracle on 1000 pencils")
def test_oracle_equivalence():
    start = time.perf_counter()
    result = oracle_suite(SEED, 1000)
    elapsed = time.perf_counter() - start
    assert result.cases == 1000
    assert result.failures == []
    assert result.worst < 1e-9
    assert elapsed < 5.0


@pytest.mark.criterion(2, "sampled sup-inf never exceeds mu_n; eigenvector constraints attain it")
def test_minimax_suite():
    start = time.perf_counter()
    rng = np.random.default_rng(SEED)
    for j in range(4):
        a = HermitianMatrix(random_hermitian(rng, 6))
        for n in (1, 2, 3):
            rep = supinf_verify(a, n, trials=500, seed=SEED + j)
            assert rep.max_sampled <= rep.mu_n + 1e-10
            assert abs(rep.achieved - rep.mu_n) <= 1e-10
    assert time.perf_counter() - start < 10.0


@pytest.mark.criterion(3, "Ritz values dominate the reference spectrum for 200 random bases")
def test_upper_bound_law():
    start = time.perf_counter()
    result = upper_bound_suite(SEED, 200)
    assert result.cases == 200
    assert result.failures == []
    assert result.worst <= 1e-10
    assert time.perf_counter() - start < 10.0


@pytest.mark.criterion(4, "Dirichlet Laplacian study: O(h^2) convergence to (1, 4), sandwich and monotonicity")
def test_dirichlet_laplacian_study():
    start = time.perf_counter()
    op = make_dirichlet_laplacian(math.pi, 255)
    report = run_study(op, family_mesh_interpolation(op, 2, levels=8), steps=8, target_tol=1e-3)
    elapsed = time.perf_counter() - start

    assert report.reference == pytest.approx((1.0, 4.0), abs=1e-12)
    final = report.final()
    assert final.errors[0] < 2e-3
    assert final.errors[1] < 8e-3
    assert report.sandwich_ok and all(r.sandwich_ok for r in report.records)
    assert report.monotone_ok
    errs = np.array([r.errors for r in report.records])
    for k in range(2):
        col = errs[:, k][~np.isnan(errs[:, k])]
        ratios = col[:-1] / col[1:]
        assert len(ratios) >= 5
        assert np.all((ratios >= 3.2) & (ratios <= 4.8)), ratios
    assert elapsed < 30.0


@pytest.mark.criterion(5, "harmonic oscillator: oracle agreement < 1e-8 and analytic agreement < 1e-2")
def test_harmonic_oscillator_study():
    start = time.perf_counter()
    op = make_schrodinger_1d("harmonic", 10.0, 400)
    report = run_study(op, family_oracle(op, 3), steps=8, target_tol=1e-8)
    elapsed = time.perf_counter() - start

    mu = np.array(report.final().mu_hat)
    oracle = op.discrete_spectrum()[:3]
    assert np.max(np.abs(mu - oracle)) < 1e-8
    assert np.max(np.abs(mu - [1.0, 3.0, 5.0])) < 1e-2
    assert report.sandwich_ok and report.monotone_ok
    assert elapsed < 60.0


@pytest.mark.criterion(6, "multiplicity: mu_hat equals (1, 1, 2) exactly from step 3")
def test_multiplicity_handling():
    rule = lambda i: (1.0, 1.0, 2.0)[i] if i < 3 else float(i)  # noqa: E731
    op = make_diagonal_operator(rule)
    report = run_study(op, family_truncation(op, 3), steps=6)
    for r in report.records[2:]:
        assert r.mu_hat == (1.0, 1.0, 2.0)
    assert report.converged_at[2] <= 3
    assert report.sandwich_ok and report.monotone_ok


@pytest.mark.criterion(7, "Gram-limit check on the mixed diagonal tail family at n = 100")
def test_gram_limit():
    op = make_diagonal_operator(lambda i: i + 1.0, mixing_seed=7, tail_power=3.0)
    report = gram_limit_check(family_truncation(op, 2), op, steps=100)
    final = report.final()
    assert final.n == 100
    assert final.gram_deviation < 1e-6
    assert final.form_deviation < 1e-6
    assert abs(final.det_gram - report.det_limit) < 1e-6


@pytest.mark.criterion(8, "form-limit check: truncations settle below 1e-6 by n = 60; e_n flagged")
def test_form_limit():
    op = make_diagonal_operator(lambda i: i + 1.0)

    def truncation(n):
        i = np.arange(n)
        return CoefficientVector(i, 1.0 / (i + 1.0) ** 2)

    report = form_limit_check(truncation, truncation, op, steps=150)
    divergent = form_limit_check(lambda n: CoefficientVector.unit(n - 1), lambda n: CoefficientVector.unit(n - 1),
                                 op, steps=80)
    assert divergent.settles_below(1e-6) is None
    assert min(divergent.energy_cauchy) >= 1.0
    settled = report.settles_below(1e-6, series="form")
    assert settled is not None and settled <= 60, f"form increments settle below 1e-6 only from n = {settled}"


def _run(*args):
    proc = subprocess.run([sys.executable, "-m", "ritzbounds", *args], capture_output=True, check=False)
    return proc.returncode, proc.stdout, proc.stderr


@pytest.mark.criterion(9, "verify and study output is byte-identical across runs and thread counts")
def test_determinism(tmp_path):
    outputs = []
    for threads in ("1", "1", "4"):
        outputs.append(_run("verify", "--seed", "11", "--threads", threads))
    assert all(code == 0 for code, _, _ in outputs)
    assert outputs[0][1] == outputs[1][1] == outputs[2][1]

    csvs = []
    for j, threads in enumerate(("1", "1", "4")):
        for name in ("laplace_m2", "mixed_tail_m2"):
            path = tmp_path / f"{name}_{j}.csv"
            code, out, _ = _run("study", str(scenario_dir() / f"{name}.json"), "--csv", str(path),
                                "--threads", threads)
            assert code == 0
            csvs.append((name, path.read_bytes(), out.replace(str(path).encode(), b"")))
    by_name = {}
    for name, data, summary in csvs:
        by_name.setdefault(name, set()).add((data, summary))
    assert all(len(v) == 1 for v in by_name.values())


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
