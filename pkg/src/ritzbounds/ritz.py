"""Rayleigh-Ritz on a finite trial basis inside the form domain.

The restriction of the form to ``span(basis)`` is represented by the pair
(form matrix, Gram matrix); its eigenvalues are those of the generalized
problem ``H c = mu G c``.  Trial vectors only need finite form values, so
hat functions and other non-smooth vectors are admissible.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, GramDegenerate, NotPositiveDefinite
from .forms import CoefficientVector, combine
from .linalg import HermitianMatrix, condition_estimate, eigen_generalized

#: relative slack on the upper-bound and monotonicity comparisons
BOUND_TOL = 1e-10


@dataclass(frozen=True)
class TrialBasis:
    vectors: tuple

    def __init__(self, vectors):
        vectors = tuple(vectors)
        if not vectors:
            raise DimensionMismatch("a trial basis needs at least one vector")
        if not all(isinstance(v, CoefficientVector) for v in vectors):
            raise TypeError("trial basis vectors must be CoefficientVector instances")
        object.__setattr__(self, "vectors", vectors)

    def __len__(self):
        return len(self.vectors)

    def is_prefix_of(self, other):
        if len(self) > len(other):
            return False
        return all(a is b or (np.array_equal(a.indices, b.indices) and np.array_equal(a.values, b.values))
                   for a, b in zip(self.vectors, other.vectors))


def _as_basis(basis):
    return basis if isinstance(basis, TrialBasis) else TrialBasis(basis)


def _assemble(vectors, pairing, threads):
    n = len(vectors)
    out = np.zeros((n, n), dtype=complex)

    def row(i):
        return i, [pairing(vectors[i], vectors[j]) for j in range(i, n)]

    if threads and threads > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, range(n)))
    else:
        rows = [row(i) for i in range(n)]
    for i, entries in rows:
        out[i, i:] = entries
        out[i:, i] = np.conj(entries)
    return HermitianMatrix(out)


def assemble_gram(basis, op, threads=1):
    """Gram matrix ``G[s, q] = <X_s|X_q>``."""
    return _assemble(_as_basis(basis).vectors, op.inner, threads)


def assemble_form_matrix(basis, op, threads=1):
    """Form matrix ``H[s, k] = q(X_s, X_k)``."""
    return _assemble(_as_basis(basis).vectors, op.form, threads)


@dataclass(frozen=True)
class RitzSpectrum:
    """Ritz values of a trial basis.

    ``vectors`` holds ``G``-orthonormal coefficient columns: column ``j``
    combines the basis vectors into the ``j``-th Ritz vector.
    ``upper_bound_ok`` is ``None`` when the operator has no reference spectrum.
    """

    values: np.ndarray
    vectors: np.ndarray
    gram_condition: float
    residual: float
    upper_bound_ok: object = None
    basis: TrialBasis = field(default=None, repr=False)

    def ritz_vector(self, j):
        return combine(self.basis.vectors, self.vectors[:, j])


def upper_bound_violation(values, reference):
    """Largest amount by which a Ritz value undercuts the matching reference eigenvalue,
    in units of ``max(1, |value|)``; non-positive means the bound holds."""
    k = min(len(values), len(reference))
    if k == 0:
        return -np.inf
    v = np.asarray(values[:k], dtype=float)
    r = np.asarray(reference[:k], dtype=float)
    return float(np.max((r - v) / np.maximum(1.0, np.abs(v))))


def ritz_spectrum(basis, op, threads=1):
    """Ritz values and coefficient vectors of ``basis`` for operator ``op``.

    Raises
    ------
    GramDegenerate
        If the basis is numerically linearly dependent; ``vector_index``
        names the first offending vector.
    """
    basis = _as_basis(basis)
    g = assemble_gram(basis, op, threads)
    h = assemble_form_matrix(basis, op, threads)
    try:
        eig = eigen_generalized(h, g)
    except NotPositiveDefinite as exc:
        raise GramDegenerate(exc.pivot_index, exc.pivot_value) from None
    ok = None
    ref = op.reference_spectrum
    if ref is not None:
        ok = upper_bound_violation(eig.values, ref) <= BOUND_TOL
    return RitzSpectrum(eig.values, eig.vectors, condition_estimate(g), eig.residual, ok, basis)


@dataclass(frozen=True)
class MonotonicityStep:
    small: int
    large: int
    max_increase: float
    ok: bool


@dataclass(frozen=True)
class MonotonicityReport:
    steps: tuple
    values: tuple

    @property
    def ok(self):
        return all(s.ok for s in self.steps)


def nested_monotonicity_check(chain, op, threads=1):
    """Check that enlarging a nested trial space never raises the k-th Ritz value.

    ``chain`` is a sequence of bases, each a prefix of the next.  For each
    consecutive pair the largest increase ``mu_k(larger) - mu_k(smaller)``
    over the shared ranks is reported, scaled by ``max(1, |mu_k(smaller)|)``.
    """
    chain = [_as_basis(b) for b in chain]
    if not chain:
        raise ValueError("chain must contain at least one basis")
    for a, b in zip(chain, chain[1:]):
        if not a.is_prefix_of(b):
            raise ValueError("each basis in the chain must be a prefix of the next")
    spectra = [ritz_spectrum(b, op, threads).values for b in chain]
    steps = []
    for (a, sa), (b, sb) in zip(zip(chain, spectra), zip(chain[1:], spectra[1:])):
        n = len(a)
        rise = float(np.max((sb[:n] - sa) / np.maximum(1.0, np.abs(sa))))
        steps.append(MonotonicityStep(len(a), len(b), rise, rise <= BOUND_TOL))
    return MonotonicityReport(tuple(steps), tuple(tuple(float(x) for x in s) for s in spectra))
