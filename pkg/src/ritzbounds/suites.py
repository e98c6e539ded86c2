"""Seeded property suites behind ``ritzbounds verify``.

Case ``c`` of suite ``s`` draws from ``default_rng([seed, s, c])``, so any
single case can be replayed from the seed and its index.
"""

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .convergence import family_truncation, run_study
from .forms import CoefficientVector, make_diagonal_operator, make_matrix_operator
from .minimax import constrained_inf
from .oracles import pencil_eigenvalues_bisection, random_hermitian, random_pencil
from .ritz import BOUND_TOL, TrialBasis, nested_monotonicity_check, ritz_spectrum, upper_bound_violation

ORACLE_TOL = 1e-9
MINIMAX_TOL = 1e-10


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: list = field(default_factory=list)
    worst: float = 0.0

    @property
    def ok(self):
        return not self.failures

    def summary(self):
        status = "ok" if self.ok else "FAIL"
        passed = self.cases - len(self.failures)
        return f"{self.name:<12} {status:<4} {passed}/{self.cases} cases passed, worst {self.worst:.3e}"


def _case_list(cases):
    """``cases`` is a count or an explicit iterable of case indices."""
    return list(range(cases)) if isinstance(cases, int) else [int(c) for c in cases]


def case_rng(seed, suite_id, case):
    return np.random.default_rng([seed, suite_id, case])


def _random_vector(rng, n, support=None):
    support = n if support is None else support
    idx = np.sort(rng.choice(n, size=support, replace=False))
    vals = rng.uniform(-1, 1, support) + 1j * rng.uniform(-1, 1, support)
    return CoefficientVector(idx, vals)


def oracle_suite(seed, cases, threads=1):
    """Generalized eigensolver against bisection on the inertia count."""
    cases = _case_list(cases)
    res = SuiteResult("oracle", len(cases))
    pencils = {}
    for c in cases:
        rng = case_rng(seed, 0, c)
        n = int(rng.integers(2, 7))
        pencils[c] = random_pencil(rng, n)
    by_dim = {}
    for c in cases:
        by_dim.setdefault(pencils[c][0].shape[0], []).append(c)
    for n, idx in sorted(by_dim.items()):
        # the oracle is vectorized over pencils of one size
        ref = pencil_eigenvalues_bisection(np.array([pencils[c][0] for c in idx]),
                                           np.array([pencils[c][1] for c in idx]))
        for c, r in zip(idx, ref):
            values = linalg.eigen_generalized(*pencils[c]).values
            err = float(np.max(np.abs(values - r)))
            res.worst = max(res.worst, err)
            if not err < ORACLE_TOL:
                res.failures.append((c, f"eigenvalue error {err:.3e}"))
    res.failures.sort()
    return res


def minimax_suite(seed, cases, threads=1, dim=6, ranks=(1, 2, 3)):
    """Random constraint sets never beat mu_n; eigenvector constraints attain it."""
    cases = _case_list(cases)
    res = SuiteResult("minimax", len(cases))
    for c in cases:
        rng = case_rng(seed, 1, c)
        a = linalg.HermitianMatrix(random_hermitian(rng, dim))
        eig = linalg.eigen_hermitian(a)
        for n in ranks:
            mu = float(eig.values[n - 1])
            cons = list(rng.uniform(-1, 1, (n - 1, dim)) + 1j * rng.uniform(-1, 1, (n - 1, dim)))
            excess = constrained_inf(a, cons) - mu
            gap = abs(constrained_inf(a, [eig.vectors[:, j] for j in range(n - 1)]) - mu)
            res.worst = max(res.worst, excess, gap)
            if excess > MINIMAX_TOL or gap > MINIMAX_TOL:
                res.failures.append((c, f"n={n} sampled excess {excess:.3e}, attained gap {gap:.3e}"))
                break
    return res


def upper_bound_case(rng, c):
    if c % 2 == 0:
        op = make_diagonal_operator(lambda i: i + 1.0, probe=64)
        support_max = 12
    else:
        op = make_matrix_operator(random_hermitian(rng, 8))
        support_max = 8
    k = int(rng.integers(1, 7))
    # supports of size >= k satisfy Hall's condition, so the vectors are generically independent
    basis = [_random_vector(rng, support_max, int(rng.integers(k, support_max + 1))) for _ in range(k)]
    return op, TrialBasis(basis)


def upper_bound_suite(seed, cases, threads=1):
    """Sorted Ritz values dominate the reference eigenvalues."""
    cases = _case_list(cases)
    res = SuiteResult("upper_bound", len(cases))
    for c in cases:
        op, basis = upper_bound_case(case_rng(seed, 2, c), c)
        viol = upper_bound_violation(ritz_spectrum(basis, op, threads).values, op.reference_spectrum)
        res.worst = max(res.worst, viol)
        if viol > BOUND_TOL:
            res.failures.append((c, f"Ritz value below reference by {viol:.3e} (relative)"))
    return res


def monotonicity_suite(seed, cases, threads=1, dim=8):
    """Ritz values do not increase along a nested chain of trial spaces."""
    cases = _case_list(cases)
    res = SuiteResult("monotone", len(cases))
    for c in cases:
        rng = case_rng(seed, 3, c)
        op = make_matrix_operator(random_hermitian(rng, dim))
        vectors = [_random_vector(rng, dim) for _ in range(dim)]
        cuts = np.sort(rng.choice(np.arange(1, dim + 1), size=4, replace=False))
        report = nested_monotonicity_check([TrialBasis(vectors[:k]) for k in cuts], op, threads)
        rise = max(s.max_increase for s in report.steps)
        res.worst = max(res.worst, rise)
        if not report.ok:
            res.failures.append((c, f"Ritz value rose by {rise:.3e} (relative)"))
    return res


def sandwich_suite(seed, cases, threads=1, steps=8):
    """Mini convergence studies: lambda_k <= mu_hat_k <= lambda_hat_k and monotone mu_hat."""
    cases = _case_list(cases)
    res = SuiteResult("sandwich", len(cases))
    for c in cases:
        rng = case_rng(seed, 4, c)
        m = int(rng.integers(1, 4))
        if c % 2 == 0:
            op = make_matrix_operator(random_hermitian(rng, 8))
        else:
            offset, slope = rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)
            op = make_diagonal_operator(lambda i, a=offset, b=slope: a + b * i,
                                        mixing_seed=int(rng.integers(2**31)), tail_power=2.0, probe=200)
        report = run_study(op, family_truncation(op, m), steps, threads=threads)
        if not (report.sandwich_ok and report.monotone_ok):
            bad = [r.n for r in report.records if not r.sandwich_ok]
            res.failures.append((c, f"m={m} sandwich failures at steps {bad}, monotone={report.monotone_ok}"))
    return res


SUITES = (
    ("oracle", oracle_suite),
    ("minimax", minimax_suite),
    ("upper_bound", upper_bound_suite),
    ("monotone", monotonicity_suite),
    ("sandwich", sandwich_suite),
)


def run_all(seed, trials, threads=1):
    """Run every suite with ``trials`` cases each."""
    return [fn(seed, trials, threads) for _, fn in SUITES]
