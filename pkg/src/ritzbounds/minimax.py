"""Minimax and minimum principles for finite Hermitian matrices.

For a Hermitian matrix the sup-inf of the Rayleigh quotient over unit
vectors orthogonal to ``n-1`` constraint vectors is the ``n``-th smallest
eigenvalue, counted with multiplicity.  An essential spectrum cannot occur
in finite dimension, so only the "eigenvalue" alternative of the minimax
principle is exercised here.
"""

from dataclasses import dataclass
import math

import numpy as np
import scipy.linalg

from .errors import NotEigenvector, RankOutOfRange
from .linalg import as_hermitian, eigen_hermitian

TOL = 1e-10


def _check_rank(a, n):
    if not 1 <= n <= a.dim:
        raise RankOutOfRange(f"rank n={n} outside 1..{a.dim}")


def mu_n(a, n):
    """The ``n``-th smallest eigenvalue of ``a`` (1-based, with multiplicity)."""
    a = as_hermitian(a)
    _check_rank(a, n)
    return float(eigen_hermitian(a).values[n - 1])


def complement_basis(dim, constraints):
    """Orthonormal columns spanning the vectors orthogonal to every constraint."""
    if len(constraints) == 0:
        return np.eye(dim, dtype=complex)
    c = np.array([np.asarray(v, dtype=complex).reshape(-1) for v in constraints])
    if c.shape[1] != dim:
        raise ValueError(f"constraint vectors must have length {dim}")
    # rows of c.conj() annihilate exactly the vectors orthogonal to all constraints
    return scipy.linalg.null_space(c.conj())


def constrained_inf(a, constraints):
    """Min of ``<X|A X>`` over unit ``X`` orthogonal to all constraint vectors.

    Returns ``inf`` when the orthogonal complement is ``{0}``.
    """
    a = as_hermitian(a)
    z = complement_basis(a.dim, list(constraints))
    if z.shape[1] == 0:
        return math.inf
    compressed = z.conj().T @ a.array @ z
    return float(eigen_hermitian(compressed).values[0])


def random_constraints(dim, count, seed, trial):
    """Constraint vectors for one trial, uniform on [-1, 1] per real and imaginary part.

    The generator for trial ``t`` is seeded with ``(seed, t)``, so trials can be
    drawn in any order.
    """
    rng = np.random.default_rng([seed, trial])
    re = rng.uniform(-1.0, 1.0, (count, dim))
    im = rng.uniform(-1.0, 1.0, (count, dim))
    return list(re + 1j * im)


@dataclass(frozen=True)
class SupInfReport:
    n: int
    trials: int
    mu_n: float
    max_sampled: float
    achieved: float

    @property
    def ok(self):
        bound_ok = self.max_sampled <= self.mu_n + TOL
        return bound_ok and abs(self.achieved - self.mu_n) <= TOL


def supinf_verify(a, n, trials, seed):
    """Sample the sup-inf with random constraint sets and certify it with eigenvectors.

    ``max_sampled`` is the largest constrained infimum over ``trials`` random
    sets of ``n-1`` constraints (``-inf`` if no trial was drawn, the plain
    minimum for ``n = 1``).  ``achieved`` uses the first ``n-1`` exact
    eigenvectors as constraints.
    """
    a = as_hermitian(a)
    _check_rank(a, n)
    eig = eigen_hermitian(a)
    target = float(eig.values[n - 1])
    if n == 1:
        sampled = constrained_inf(a, []) if trials > 0 else -math.inf
    else:
        sampled = max((constrained_inf(a, random_constraints(a.dim, n - 1, seed, t))
                       for t in range(trials)), default=-math.inf)
    achieved = constrained_inf(a, [eig.vectors[:, j] for j in range(n - 1)])
    return SupInfReport(n, trials, target, sampled, achieved)


def minimum_principle(a, eigvecs):
    """Deflated minimum: the next eigenvalue after the supplied eigenvectors.

    Raises
    ------
    NotEigenvector
        If some supplied vector fails ``||A v - rho v|| <= 1e-8 ||A||_max``
        after normalization, ``rho`` being its Rayleigh quotient.
    """
    a = as_hermitian(a)
    limit = 1e-8 * a.max_abs()
    for j, v in enumerate(eigvecs):
        v = np.asarray(v, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        av = a.array @ v
        rho = np.vdot(v, av).real
        if np.linalg.norm(av - rho * v) > limit:
            raise NotEigenvector(f"vector {j} is not an eigenvector (residual above {limit:.1e})")
    return constrained_inf(a, eigvecs)
