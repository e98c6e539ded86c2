"""Dense complex-Hermitian linear algebra.

Everything here works on small dense matrices: Cholesky factorization with
an explicit pivot threshold, a cyclic Jacobi eigensolver for Hermitian
matrices, the Cholesky reduction of the generalized problem ``H v = lam G v``
and a spectral condition number.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ConvergenceFailure, DimensionMismatch, NotPositiveDefinite

#: relative pivot threshold for Cholesky, measured against the largest diagonal entry
PD_EPS = 1e-13
#: Jacobi stops once the off-diagonal Frobenius norm is below this fraction of ||A||_F
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


class HermitianMatrix:
    """Immutable square complex matrix with conjugate symmetry.

    The input is symmetrized as ``(A + A^H) / 2``; the largest deviation from
    symmetry seen in the input is kept in :attr:`asymmetry`.  Diagonal
    imaginary parts are exactly zero afterwards.
    """

    __slots__ = ("_a", "asymmetry")

    def __init__(self, entries):
        a = np.array(entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        ah = a.conj().T
        self.asymmetry = float(np.max(np.abs(a - ah)))
        a = 0.5 * (a + ah)
        a[np.diag_indices_from(a)] = a.diagonal().real
        a.setflags(write=False)
        self._a = a

    @property
    def array(self):
        return self._a

    @property
    def dim(self):
        return self._a.shape[0]

    def max_abs(self):
        return float(np.max(np.abs(self._a)))

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._a.copy()
        return self._a.astype(dtype)

    def __repr__(self):
        return f"HermitianMatrix(dim={self.dim}, asymmetry={self.asymmetry:.2e})"


def as_hermitian(a):
    return a if isinstance(a, HermitianMatrix) else HermitianMatrix(a)


@dataclass(frozen=True)
class EigenDecomposition:
    """Ascending eigenvalues, eigenvectors as columns, and the max residual."""

    values: np.ndarray
    vectors: np.ndarray
    residual: float


def cholesky(g):
    """Lower-triangular ``L`` with ``G = L L^H``.

    Raises
    ------
    NotPositiveDefinite
        If some pivot is not above ``PD_EPS * max(diag(G))``.
    """
    a = as_hermitian(g).array
    n = a.shape[0]
    diag = a.diagonal().real
    dmax = float(diag.max())
    if dmax <= 0.0:
        j = int(np.argmin(diag))
        raise NotPositiveDefinite(j, diag[j])
    threshold = PD_EPS * dmax
    low = np.zeros((n, n), dtype=complex)
    for j in range(n):
        row = low[j, :j]
        d = diag[j] - float(np.vdot(row, row).real)
        if not d > threshold:
            raise NotPositiveDefinite(j, d)
        ljj = math.sqrt(d)
        low[j, j] = ljj
        if j + 1 < n:
            low[j + 1:, j] = (a[j + 1:, j] - low[j + 1:, :j] @ row.conj()) / ljj
    return low


def _jacobi(a, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Cyclic complex Jacobi; returns (diagonal, accumulated unitary)."""
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return a.diagonal().real.copy(), v
    offmask = ~np.eye(n, dtype=bool)
    for sweep in range(max_sweeps + 1):
        off = math.sqrt(float(np.sum(np.abs(a[offmask]) ** 2)))
        if off <= tol * scale:
            break
        if sweep == max_sweeps:
            raise ConvergenceFailure(max_sweeps)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                g = abs(apq)
                if g == 0.0:
                    continue
                phase = apq / g
                tau = (a[q, q].real - a[p, p].real) / (2.0 * g)
                if tau == 0.0:
                    t = 1.0
                else:
                    t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                cph = phase.conjugate()
                # A <- U^H A U with U = [[c, s], [-s*conj(ph), c*conj(ph)]] on (p, q)
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - s * cph * colq
                a[:, q] = s * colp + c * cph * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - s * phase * rowq
                a[q, :] = s * rowp + c * phase * rowq
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * cph * vq
                v[:, q] = s * vp + c * cph * vq
    return a.diagonal().real.copy(), v


def _sorted(values, vectors):
    order = np.argsort(values, kind="stable")
    return values[order], vectors[:, order]


def eigen_hermitian(a):
    """Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Returns values in ascending order and orthonormal eigenvectors as columns.
    """
    a = as_hermitian(a).array
    values, vectors = _sorted(*_jacobi(a))
    resid = np.linalg.norm(a @ vectors - vectors * values, axis=0)
    values.setflags(write=False)
    vectors.setflags(write=False)
    return EigenDecomposition(values, vectors, float(resid.max()))


def eigen_generalized(h, g):
    """Solve ``H v = lam G v`` for Hermitian ``H`` and positive definite ``G``.

    ``G = L L^H`` is factored and the standard problem for ``L^-1 H L^-H`` is
    diagonalized; the product ``G^-1 H`` is never formed.  The returned
    vectors are ``G``-orthonormal.
    """
    h = as_hermitian(h)
    g = as_hermitian(g)
    if h.dim != g.dim:
        raise DimensionMismatch(f"pencil dimensions differ: {h.dim} vs {g.dim}")
    low = cholesky(g)
    y = solve_triangular(low, h.array, lower=True)
    c = solve_triangular(low, y.conj().T, lower=True)
    values, w = _sorted(*_jacobi(as_hermitian(c).array))
    vectors = solve_triangular(low.conj().T, w, lower=False)
    resid = np.linalg.norm(h.array @ vectors - (g.array @ vectors) * values, axis=0)
    values.setflags(write=False)
    vectors.setflags(write=False)
    return EigenDecomposition(values, vectors, float(resid.max()))


def condition_estimate(g):
    """Ratio of extreme eigenvalues; ``inf`` when the smallest is not positive."""
    values = eigen_hermitian(g).values
    lo, hi = values[0], values[-1]
    if lo <= 0.0:
        return math.inf
    return float(hi / lo)
