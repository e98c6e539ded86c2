"""Simultaneous approximation of the lowest ``m`` eigenvalues.

Given approximating sequences ``X_kn -> X_k`` of the first ``m``
eigenvectors, two Ritz problems are solved at every step ``n``:

* on the small space spanned by ``X_1n, ..., X_mn`` (values ``lambda_hat``),
* on the pooled space spanned by every ``X_ks`` with ``s <= n``
  (the first ``m`` values are ``mu_hat``).

The pooled space contains the small one and both lie in the form domain,
so ``lambda_k <= mu_hat_k <= lambda_hat_k`` at every step; ``lambda_hat``
converges because the small Gram and form matrices do, and ``mu_hat`` is
squeezed along with it.
"""

import csv
from dataclasses import dataclass
import io
import math

import numpy as np

from .errors import EmptyBasis, GramDegenerate, Unsupported
from .forms import CoefficientVector, MeshOperator
from .ritz import BOUND_TOL, TrialBasis, assemble_form_matrix, assemble_gram, ritz_spectrum

DEFAULT_TARGET_TOL = 1e-6
DEFAULT_PRUNE_TOL = 1e-8
# prune tolerances tried, in order, when the pooled Gram matrix still fails Cholesky
RESCUE_PRUNE_TOLS = (1e-6, 1e-4)


@dataclass(frozen=True)
class ApproximatingFamily:
    """Vectors ``X_kn`` for ``k = 1..m`` and steps ``n = 1, 2, ...``.

    ``generator(k, n)`` must be deterministic.
    """

    m: int
    generator: object
    description: str = ""

    def __call__(self, k, n):
        return self.generator(k, n)

    def step_vectors(self, n):
        return [self.generator(k, n) for k in range(1, self.m + 1)]


def family_truncation(op, m):
    """``X_kn`` = first ``n`` coordinates of the ``k``-th exact eigenvector.

    Works for operators exposing exact eigenvectors in coordinates
    (matrix and diagonal models, mixed or not).
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    op.eigenvector_truncation(0, 1)  # raises Unsupported early
    return ApproximatingFamily(m, lambda k, n: op.eigenvector_truncation(k - 1, n),
                               f"coordinate truncation of the first {m} eigenvectors ({op.kind})")


def default_levels(op):
    """Number of dyadic levels whose coarsest mesh still has an interior node."""
    return max(1, int(math.floor(math.log2(op.dim + 1))))


def interpolate_levels(fine_values, level, levels):
    """Nodal interpolant on the level-``level`` submesh, in fine hat coordinates.

    The submesh keeps every ``2**(levels - level)``-th node of the fine mesh
    (plus both walls), so its hat functions are exact combinations of the fine
    ones and the interpolant is represented without error.
    """
    fine = np.asarray(fine_values)
    n = fine.size
    padded = np.concatenate([[0.0], fine, [0.0]])
    stride = 2 ** max(levels - level, 0)
    coarse = np.arange(0, n + 2, stride)
    if coarse[-1] != n + 1:
        coarse = np.append(coarse, n + 1)
    grid = np.arange(n + 2)
    if np.iscomplexobj(padded):
        vals = (np.interp(grid, coarse, padded[coarse].real)
                + 1j * np.interp(grid, coarse, padded[coarse].imag))
    else:
        vals = np.interp(grid, coarse, padded[coarse])
    return CoefficientVector.from_dense(vals[1:-1])


def _nodal_family(op, m, levels, table, description):
    if levels is None:
        levels = default_levels(op)
    levels = int(levels)
    if levels < 1:
        raise ValueError("levels must be >= 1")
    cache = {}

    def nodal(k):
        if k not in cache:
            cache[k] = np.asarray(table(k - 1))
        return cache[k]

    def generator(k, n):
        return interpolate_levels(nodal(k), min(n, levels), levels)

    return ApproximatingFamily(m, generator, f"{description}, {levels} levels")


def family_mesh_interpolation(op, m, levels=None):
    """Nodal interpolants of the exact eigenfunctions on nested submeshes.

    Step ``n`` interpolates on the level-``n`` submesh; steps beyond
    ``levels`` repeat the finest interpolant.
    """
    if not isinstance(op, MeshOperator):
        raise Unsupported("mesh interpolation needs a mesh-based operator")
    if m < 1:
        raise ValueError("m must be >= 1")
    if not op.has_eigenfunctions():
        raise Unsupported(f"no analytic eigenfunctions for {op.kind} "
                          f"(potential {op.potential_name!r}); use the oracle family")
    return _nodal_family(op, m, levels, lambda k: op.eigenfunction(k, op.x).real,
                         f"interpolated eigenfunctions 1..{m}")


def family_oracle(op, m, levels=None):
    """Like :func:`family_mesh_interpolation`, but interpolating the exact
    eigenvectors of the assembled discrete pencil (computed by LAPACK).

    At the finest level the vectors are the discrete eigenvectors themselves.
    """
    if not isinstance(op, MeshOperator):
        raise Unsupported("the oracle family needs a mesh-based operator")
    if m < 1:
        raise ValueError("m must be >= 1")
    return _nodal_family(op, m, levels, lambda k: op.discrete_eigenvector(k).to_dense(op.dim),
                         f"discrete oracle eigenvectors 1..{m}")


class _Pruner:
    """Sequential two-pass modified Gram-Schmidt in the operator's inner product.

    A vector is kept when its residual against the kept ones is at least
    ``prune_tol`` times its norm.  Feeding vectors in several batches gives
    the same result as one batch, which lets a study extend its pooled basis
    step by step.
    """

    def __init__(self, op, prune_tol):
        self.op = op
        self.prune_tol = prune_tol
        self.kept = []
        self._ortho = []
        self.seen = 0

    def feed(self, vectors):
        op = self.op
        for v in vectors:
            self.seen += 1
            norm = op.norm(v)
            if norm == 0.0:
                continue
            r = v
            for _ in range(2):
                for q in self._ortho:
                    r = r - q * op.inner(q, r)
            rnorm = op.norm(r)
            if rnorm < self.prune_tol * norm or rnorm == 0.0:
                continue
            self.kept.append(v)
            self._ortho.append(r / rnorm)
        return self


def pooled_vectors(family, n):
    """``X_ks`` for ``s = 1..n`` (outer) and ``k = 1..m`` (inner)."""
    return [family(k, s) for s in range(1, n + 1) for k in range(1, family.m + 1)]


def build_pooled_basis(family, n, op, prune_tol=DEFAULT_PRUNE_TOL):
    """Basis of the pooled space ``span{X_ks : k <= m, s <= n}``.

    Vectors are visited step by step; a vector is dropped when its residual
    after projection onto the span of the kept ones is below ``prune_tol``
    times its norm.  The kept vectors are returned in visiting order, so the
    basis at step ``n`` is a prefix of the basis at step ``n + 1``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    return _basis_from(_Pruner(op, prune_tol).feed(pooled_vectors(family, n)), n)


def _basis_from(pruner, n):
    if not pruner.kept:
        raise EmptyBasis(f"every pooled vector was pruned at step {n}")
    return TrialBasis(pruner.kept)


@dataclass(frozen=True)
class StudyRecord:
    n: int
    pooled_dim: int
    mu_hat: tuple
    lambda_hat: tuple
    errors: tuple
    sandwich_ok: bool
    gram_condition_pooled: float
    gram_condition_small: float
    skipped: bool = False
    rescued: bool = False
    extra_ritz: tuple = ()


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return ""
    return repr(x)


@dataclass(frozen=True)
class ConvergenceReport:
    m: int
    records: tuple
    reference: tuple
    converged_at: tuple
    monotone_ok: bool
    target_tol: float

    @property
    def sandwich_ok(self):
        return all(r.sandwich_ok for r in self.records)

    @property
    def fully_converged(self):
        return self.reference is not None and all(c is not None for c in self.converged_at)

    def final(self):
        return self.records[-1]

    def columns(self):
        ks = range(1, self.m + 1)
        return (["n", "pooled_dim"] + [f"mu_hat_{k}" for k in ks] + [f"lambda_hat_{k}" for k in ks]
                + [f"err_{k}" for k in ks] + ["sandwich_ok", "gram_cond_pooled", "gram_cond_small"])

    def rows(self):
        blank = (None,) * self.m
        for r in self.records:
            yield ([r.n, r.pooled_dim] + list(r.mu_hat) + list(r.lambda_hat or blank)
                   + list(r.errors or blank)
                   + [r.sandwich_ok, r.gram_condition_pooled, r.gram_condition_small])

    def write_csv(self, stream):
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(self.columns())
        for row in self.rows():
            writer.writerow([_fmt(x) for x in row])

    def csv_text(self):
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def _first_ritz(values, m):
    out = [float(v) for v in values[:m]]
    return tuple(out + [math.nan] * (m - len(out)))


def _pooled_spectrum(family, n, op, prune_tol, threads, pruners):
    """Ritz problem on the pooled space, loosening the prune tolerance if needed.

    ``pruners`` maps tolerance to a pruner that has already seen the vectors
    of earlier steps.
    """
    tried = [prune_tol] + [t for t in RESCUE_PRUNE_TOLS if t > prune_tol]
    for attempt, tol in enumerate(tried):
        pruner = pruners.setdefault(tol, _Pruner(op, tol))
        for step in range(pruner.seen // family.m + 1, n + 1):
            pruner.feed(family.step_vectors(step))
        basis = _basis_from(pruner, n)
        try:
            return basis, ritz_spectrum(basis, op, threads), attempt > 0
        except GramDegenerate:
            if attempt == len(tried) - 1:
                raise


def run_study(op, family, steps, target_tol=DEFAULT_TARGET_TOL, prune_tol=DEFAULT_PRUNE_TOL,
              threads=1, keep_extra=False):
    """Run the two Ritz problems for ``n = 1..steps`` and check the sandwich.

    Steps whose small-space Gram matrix is degenerate are recorded as
    ``skipped`` (no ``lambda_hat``); convergence is only asserted for large
    ``n``.  ``converged_at[k]`` is the first step from which
    ``|mu_hat_k - lambda_k| < target_tol`` holds at every later step.
    """
    m = family.m
    if steps < 1:
        raise ValueError("steps must be >= 1")
    ref_full = op.reference_spectrum
    if op.ess_inf is not None and ref_full is not None and m > len(ref_full):
        raise ValueError(f"m={m} exceeds the {len(ref_full)} eigenvalues below the essential "
                         f"spectrum at {op.ess_inf}")
    reference = None
    if ref_full is not None and len(ref_full) >= m:
        reference = tuple(float(v) for v in ref_full[:m])

    records = []
    pruners = {}
    for n in range(1, steps + 1):
        small = TrialBasis(family.step_vectors(n))
        try:
            small_spec = ritz_spectrum(small, op, threads)
            lam_hat = tuple(float(v) for v in small_spec.values)
            cond_small = small_spec.gram_condition
        except GramDegenerate:
            lam_hat, cond_small = None, math.nan
        basis, pooled, rescued = _pooled_spectrum(family, n, op, prune_tol, threads, pruners)
        mu_hat = _first_ritz(pooled.values, m)

        ok = True
        errors = None
        if reference is not None:
            errors = tuple(abs(mu - lam) for mu, lam in zip(mu_hat, reference))
            for mu, lam in zip(mu_hat, reference):
                if not math.isnan(mu) and mu < lam - BOUND_TOL * max(1.0, abs(lam)):
                    ok = False
        if lam_hat is not None:
            for mu, lh in zip(mu_hat, lam_hat):
                if math.isnan(mu) or mu > lh + BOUND_TOL * max(1.0, abs(lh)):
                    ok = False
        extra = tuple(float(v) for v in pooled.values[m:]) if keep_extra else ()
        records.append(StudyRecord(n, len(basis), mu_hat, lam_hat, errors, ok,
                                   pooled.gram_condition, cond_small, lam_hat is None, rescued, extra))

    monotone = True
    for a, b in zip(records, records[1:]):
        for x, y in zip(a.mu_hat, b.mu_hat):
            if not math.isnan(x) and (math.isnan(y) or y > x + BOUND_TOL * max(1.0, abs(x))):
                monotone = False

    converged = [None] * m
    if reference is not None:
        for k in range(m):
            first = None
            for r in records:
                err = r.errors[k]
                if err < target_tol:
                    if first is None:
                        first = r.n
                else:
                    first = None
            converged[k] = first
    return ConvergenceReport(m, tuple(records), reference, tuple(converged), monotone, target_tol)


@dataclass(frozen=True)
class GramLimitStep:
    n: int
    gram_deviation: float
    form_deviation: float
    det_gram: float


@dataclass(frozen=True)
class GramLimitReport:
    steps: tuple
    det_limit: float

    def final(self):
        return self.steps[-1]


def gram_limit_check(family, op, steps, limits=None):
    """Entry deviations of the step Gram/form matrices from their limits.

    ``limits`` are the exact limit vectors; when omitted the operator's own
    exact eigenvectors are used (Gram = identity, form = diagonal of
    eigenvalues).
    """
    if limits is not None:
        if len(limits) != family.m:
            raise ValueError(f"expected {family.m} limit vectors, got {len(limits)}")
        g_lim = assemble_gram(TrialBasis(limits), op).array
        h_lim = assemble_form_matrix(TrialBasis(limits), op).array
    else:
        try:
            g_lim, h_lim = op.exact_matrices(family.m)
        except Unsupported:
            raise Unsupported("no limit vectors supplied and the operator has no exact eigenvectors") from None
    out = []
    for n in range(1, steps + 1):
        basis = TrialBasis(family.step_vectors(n))
        g = assemble_gram(basis, op).array
        h = assemble_form_matrix(basis, op).array
        out.append(GramLimitStep(n, float(np.max(np.abs(g - g_lim))), float(np.max(np.abs(h - h_lim))),
                                 float(np.linalg.det(g).real)))
    return GramLimitReport(tuple(out), float(np.linalg.det(g_lim).real))
