"""Vectors and operators known only through inner products and form values.

A vector is a finitely supported list of coordinates over a fixed countable
computational basis of the operator (unit vectors for the diagonal and
matrix models, hat functions for the mesh models).  An operator model
evaluates two sesquilinear maps on such vectors: the scalar product
``<X|Y>`` and the quadratic form ``q(X, Y)``.  Both are conjugate linear in
the first slot and linear in the second.
"""

from dataclasses import dataclass
from functools import cached_property
import math

import numpy as np
import scipy.linalg
from scipy.special import eval_hermite, gammaln

from .errors import IndexOutOfRange, Unsupported
from .linalg import as_hermitian, eigen_hermitian

#: stored coordinates below this magnitude are dropped
ZERO_CUTOFF = 1e-300


class CoefficientVector:
    """Finitely supported complex coordinates, kept in canonical form.

    Indices are strictly increasing; duplicate indices passed to the
    constructor are summed and negligible entries are removed.
    """

    __slots__ = ("indices", "values")

    def __init__(self, indices=(), values=()):
        idx = np.asarray(indices, dtype=np.int64).reshape(-1)
        val = np.asarray(values, dtype=complex).reshape(-1)
        if idx.shape != val.shape:
            raise ValueError("indices and values must have the same length")
        if idx.size and idx.min() < 0:
            raise IndexOutOfRange("coordinate indices must be non-negative")
        if not np.all(np.isfinite(val)):
            raise ValueError("coordinates must be finite")
        if idx.size > 1 and not np.all(np.diff(idx) > 0):
            idx, inv = np.unique(idx, return_inverse=True)
            summed = np.zeros(idx.size, dtype=complex)
            np.add.at(summed, inv, val)
            val = summed
        keep = np.abs(val) >= ZERO_CUTOFF
        if not keep.all():
            idx, val = idx[keep], val[keep]
        idx.setflags(write=False)
        val.setflags(write=False)
        self.indices = idx
        self.values = val

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        if not pairs:
            return cls()
        idx, val = zip(*pairs)
        return cls(idx, val)

    @classmethod
    def from_dense(cls, coords, offset=0):
        coords = np.asarray(coords, dtype=complex).reshape(-1)
        return cls(np.arange(coords.size) + offset, coords)

    @classmethod
    def unit(cls, index, value=1.0):
        return cls([index], [value])

    def to_dense(self, dim):
        if self.indices.size and self.indices[-1] >= dim:
            raise IndexOutOfRange(
                f"coordinate index {int(self.indices[-1])} out of range for dimension {dim}")
        out = np.zeros(dim, dtype=complex)
        out[self.indices] = self.values
        return out

    def truncate(self, n):
        """Keep coordinates with index < n."""
        cut = np.searchsorted(self.indices, n)
        return CoefficientVector(self.indices[:cut], self.values[:cut])

    @property
    def max_index(self):
        return int(self.indices[-1]) if self.indices.size else -1

    def is_zero(self):
        return self.indices.size == 0

    def __len__(self):
        return int(self.indices.size)

    def __add__(self, other):
        if not isinstance(other, CoefficientVector):
            return NotImplemented
        return CoefficientVector(np.concatenate([self.indices, other.indices]),
                                 np.concatenate([self.values, other.values]))

    def __neg__(self):
        return CoefficientVector(self.indices, -self.values)

    def __sub__(self, other):
        if not isinstance(other, CoefficientVector):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        return CoefficientVector(self.indices, self.values * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return CoefficientVector(self.indices, self.values / complex(scalar))

    def __repr__(self):
        body = ", ".join(f"{i}: {v:.6g}" for i, v in zip(self.indices[:6], self.values[:6]))
        more = ", ..." if self.indices.size > 6 else ""
        return f"CoefficientVector({{{body}{more}}})"


def combine(vectors, coeffs):
    """Linear combination ``sum_j coeffs[j] * vectors[j]``."""
    idx = np.concatenate([v.indices for v in vectors]) if vectors else np.zeros(0, np.int64)
    val = (np.concatenate([v.values * complex(c) for v, c in zip(vectors, coeffs)])
           if vectors else np.zeros(0, complex))
    return CoefficientVector(idx, val)


def _overlap(x, y):
    """Positions of the common indices of two canonical vectors."""
    _, ix, iy = np.intersect1d(x.indices, y.indices, assume_unique=True, return_indices=True)
    return ix, iy


class OperatorModel:
    """A lower semi-definite self-adjoint operator seen through its form.

    Subclasses implement :meth:`inner` and :meth:`form`.  ``lower_bound`` is a
    constant ``C`` with ``q(X, X) >= C <X|X>``; ``reference_spectrum`` holds
    known eigenvalues below ``ess_inf`` in ascending order when available.
    """

    kind = "abstract"
    dim = None
    lower_bound = -math.inf
    ess_inf = None

    @property
    def reference_spectrum(self):
        return None

    def inner(self, x, y):
        raise NotImplementedError

    def form(self, x, y):
        raise NotImplementedError

    def validate(self, x):
        if self.dim is not None and x.max_index >= self.dim:
            raise IndexOutOfRange(
                f"coordinate index {x.max_index} out of range for {self.kind} operator "
                f"of dimension {self.dim}")

    def rayleigh_quotient(self, x):
        return self.form(x, x).real / self.inner(x, x).real

    def norm(self, x):
        return math.sqrt(max(self.inner(x, x).real, 0.0))

    # Exact eigenvector access, used by the truncation family and by the
    # Gram-limit check.  Only some models provide it.
    def eigenvector_truncation(self, k, n):
        """First-``n``-coordinate truncation of the ``k``-th (0-based) exact eigenvector."""
        raise Unsupported(f"{self.kind} operator has no coordinate eigenvector rule")

    def exact_matrices(self, m):
        """Gram and form matrices of the first ``m`` exact eigenvectors."""
        raise Unsupported(f"{self.kind} operator has no exact eigenvectors")


class MatrixOperator(OperatorModel):
    """``q(X, Y) = <X|(A + shift) Y>`` on ``C^dim`` with the Euclidean product."""

    kind = "matrix"

    def __init__(self, a, shift=0.0):
        self.matrix = as_hermitian(a)
        self.shift = float(shift)
        self.dim = self.matrix.dim
        eig = eigen_hermitian(self.matrix)
        self._values = eig.values + self.shift
        self._vectors = eig.vectors
        self.lower_bound = float(self._values[0])
        self._shifted = self.matrix.array + self.shift * np.eye(self.dim)

    @property
    def reference_spectrum(self):
        return tuple(float(v) for v in self._values)

    def inner(self, x, y):
        self.validate(x)
        self.validate(y)
        ix, iy = _overlap(x, y)
        return complex(np.sum(np.conj(x.values[ix]) * y.values[iy]))

    def form(self, x, y):
        self.validate(x)
        self.validate(y)
        block = self._shifted[np.ix_(x.indices, y.indices)]
        return complex(np.conj(x.values) @ block @ y.values)

    def eigenvector_truncation(self, k, n):
        return CoefficientVector.from_dense(self._vectors[:, k]).truncate(n)

    def exact_matrices(self, m):
        return np.eye(m, dtype=complex), np.diag(self._values[:m]).astype(complex)


def make_matrix_operator(a, shift=0.0):
    return MatrixOperator(a, shift)


class DiagonalOperator(OperatorModel):
    """Operator diagonal in the computational basis, optionally mixed.

    Without mixing, ``q(X, Y) = sum conj(x_i) lam_i y_i``.  With
    ``mixing_seed`` set the operator becomes ``U D U`` with the Householder
    reflection ``U = I - 2 w w^H``.  The unit vector ``w`` lives on indices
    ``0 .. probe-1`` with ``|w_i|`` proportional to ``(i+1)**-tail_power``
    and seeded phases.  The spectrum is unchanged, but every exact
    eigenvector ``U e_j`` carries a tail of that shape, so coordinate
    truncation is a genuine approximation.

    ``reference_spectrum`` sorts the rule values found at indices
    ``0 .. probe-1`` (those below ``ess_inf``); the rule is assumed to attain
    its smallest values inside that window.
    """

    kind = "diagonal"

    def __init__(self, eigenvalue_rule, ess_inf=None, mixing_seed=None, tail_power=1.0,
                 probe=2000, lower_bound=None):
        self.rule = eigenvalue_rule
        self.ess_inf = None if ess_inf is None else float(ess_inf)
        self.probe = int(probe)
        lam = np.array([float(eigenvalue_rule(i)) for i in range(self.probe)])
        if not np.all(np.isfinite(lam)):
            raise ValueError("eigenvalue rule must return finite values")
        self._probe_values = lam
        below = np.arange(self.probe) if self.ess_inf is None else np.flatnonzero(lam < self.ess_inf)
        order = below[np.argsort(lam[below], kind="stable")]
        self._order = order
        self.lower_bound = float(lam.min()) if lower_bound is None else float(lower_bound)

        self.mixing_seed = mixing_seed
        self.tail_power = float(tail_power)
        if mixing_seed is not None:
            rng = np.random.default_rng(mixing_seed)
            mag = np.arange(1, self.probe + 1, dtype=float) ** (-self.tail_power)
            w = mag * np.exp(2j * np.pi * rng.random(self.probe))
            w /= np.linalg.norm(w)
            self._w_full = w
            # <w|D w>
            self._w_energy = float(np.sum(lam * np.abs(w) ** 2))

    def _lam(self, indices):
        if indices.size and indices[-1] < self.probe:
            return self._probe_values[indices]
        return np.array([float(self.rule(int(i))) for i in indices])

    def _w(self, indices):
        """Coordinates of the unit mixing vector at the given indices."""
        out = np.zeros(indices.size, dtype=complex)
        inside = indices < self.probe
        out[inside] = self._w_full[indices[inside]]
        return out

    @property
    def reference_spectrum(self):
        return tuple(float(v) for v in self._probe_values[self._order])

    def inner(self, x, y):
        ix, iy = _overlap(x, y)
        return complex(np.sum(np.conj(x.values[ix]) * y.values[iy]))

    def _diag_form(self, x, y):
        ix, iy = _overlap(x, y)
        lam = self._lam(x.indices[ix])
        return complex(np.sum(np.conj(x.values[ix]) * lam * y.values[iy]))

    def form(self, x, y):
        base = self._diag_form(x, y)
        if self.mixing_seed is None:
            return base
        wx = self._w(x.indices)
        wy = self._w(y.indices)
        a_x = np.sum(np.conj(wx) * x.values)
        a_y = np.sum(np.conj(wy) * y.values)
        x_dw = np.sum(np.conj(x.values) * self._lam(x.indices) * wx)
        w_dy = np.sum(np.conj(wy) * self._lam(y.indices) * y.values)
        return complex(base - 2 * a_y * x_dw - 2 * np.conj(a_x) * w_dy
                       + 4 * np.conj(a_x) * a_y * self._w_energy)

    def eigenvalue_index(self, k):
        if k >= self._order.size:
            raise IndexError(f"only {self._order.size} eigenvalues below ess_inf inside the probe window")
        return int(self._order[k])

    def eigenvector_truncation(self, k, n):
        j = self.eigenvalue_index(k)
        if self.mixing_seed is None:
            return CoefficientVector.unit(j) if j < n else CoefficientVector()
        idx = np.arange(n)
        wj = self._w(np.array([j]))[0]
        coords = -2.0 * self._w(idx) * np.conj(wj)
        if j < n:
            coords[j] += 1.0
        return CoefficientVector(idx, coords)

    def exact_matrices(self, m):
        lam = [self._probe_values[self.eigenvalue_index(k)] for k in range(m)]
        return np.eye(m, dtype=complex), np.diag(lam).astype(complex)


def make_diagonal_operator(eigenvalue_rule, ess_inf=None, **kwargs):
    return DiagonalOperator(eigenvalue_rule, ess_inf, **kwargs)


def _tridiag_apply(diag, off, u):
    """``T u`` for a Hermitian tridiagonal ``T`` with real diagonal and off-diagonal."""
    out = diag * u
    out[:-1] += off * u[1:]
    out[1:] += off * u[:-1]
    return out


class MeshOperator(OperatorModel):
    """``-u'' + V u`` with Dirichlet walls, in a hat-function basis.

    The basis consists of the ``nodes`` interior hats of a uniform mesh on
    ``(left, right)``.  Mass and stiffness integrals are exact.  The potential
    is replaced by its value at each element midpoint, so the potential term
    is a weighted mass matrix and a constant potential ``c`` adds exactly
    ``c`` times the mass matrix.
    """

    kind = "mesh"

    def __init__(self, left, right, nodes, potential=None, potential_name="zero", eigenfunction=None,
                 analytic_spectrum=None):
        if not right > left:
            raise ValueError("mesh interval must have positive length")
        if int(nodes) < 1:
            raise ValueError("nodes must be >= 1")
        self.left = float(left)
        self.right = float(right)
        self.dim = int(nodes)
        self.h = (self.right - self.left) / (self.dim + 1)
        self.x = self.left + self.h * np.arange(1, self.dim + 1)
        self.potential_name = potential_name
        # one value per element; element e spans nodes e-1 and e (walls at -1 and dim)
        mids = self.left + self.h * (np.arange(self.dim + 1) + 0.5)
        pot = np.zeros(self.dim + 1) if potential is None else np.array(
            [float(potential(xm)) for xm in mids])
        self.potential_values = pot
        self.mass_diag = np.full(self.dim, 2.0 * self.h / 3.0)
        self.mass_off = np.full(self.dim - 1, self.h / 6.0)
        self.stiff_diag = 2.0 / self.h + self.h / 3.0 * (pot[:-1] + pot[1:])
        self.stiff_off = -1.0 / self.h + self.h / 6.0 * pot[1:-1]
        # each element adds V_e times a positive semidefinite block of the mass matrix
        self.lower_bound = float(pot.min())
        self._eigenfunction = eigenfunction
        self._analytic = analytic_spectrum

    @property
    def length(self):
        return self.right - self.left

    def mass_matrix(self):
        return np.diag(self.mass_diag) + np.diag(self.mass_off, 1) + np.diag(self.mass_off, -1)

    def form_matrix(self):
        return np.diag(self.stiff_diag) + np.diag(self.stiff_off, 1) + np.diag(self.stiff_off, -1)

    def _pair(self, x, y):
        return x.to_dense(self.dim), y.to_dense(self.dim)

    def inner(self, x, y):
        xd, yd = self._pair(x, y)
        return complex(np.vdot(xd, _tridiag_apply(self.mass_diag, self.mass_off, yd)))

    def form(self, x, y):
        xd, yd = self._pair(x, y)
        return complex(np.vdot(xd, _tridiag_apply(self.stiff_diag, self.stiff_off, yd)))

    @cached_property
    def _discrete(self):
        values, vectors = scipy.linalg.eigh(self.form_matrix(), self.mass_matrix())
        return values, vectors

    def discrete_spectrum(self):
        """Eigenvalues of the assembled pencil, from LAPACK (independent of the Jacobi path)."""
        return self._discrete[0]

    def discrete_eigenvector(self, k):
        return CoefficientVector.from_dense(self._discrete[1][:, k])

    @property
    def reference_spectrum(self):
        if self._analytic is not None:
            return tuple(float(self._analytic(k)) for k in range(self.dim))
        return tuple(float(v) for v in self.discrete_spectrum())

    def analytic_eigenvalue(self, k):
        if self._analytic is None:
            raise Unsupported(f"no analytic spectrum for potential {self.potential_name!r}")
        return float(self._analytic(k))

    def has_eigenfunctions(self):
        return self._eigenfunction is not None

    def eigenfunction(self, k, x):
        """Value of the ``k``-th (0-based) exact eigenfunction at points ``x``."""
        if self._eigenfunction is None:
            raise Unsupported(f"no analytic eigenfunctions for potential {self.potential_name!r}")
        return self._eigenfunction(k, np.asarray(x, dtype=float))


def make_dirichlet_laplacian(length, nodes):
    """``-u''`` on ``(0, length)``; reference spectrum ``(k pi / length)^2``."""
    length = float(length)
    if not length > 0:
        raise ValueError("length must be positive")
    op = MeshOperator(
        0.0, length, nodes,
        eigenfunction=lambda k, x: np.sin((k + 1) * np.pi * x / length),
        analytic_spectrum=lambda k: ((k + 1) * np.pi / length) ** 2)
    op.kind = "dirichlet_laplacian"
    return op


def _hermite_function(k, x):
    """Normalized eigenfunctions of ``-u'' + x^2 u`` on the whole line."""
    log_norm = -0.5 * (k * math.log(2.0) + gammaln(k + 1) + 0.5 * math.log(math.pi))
    return np.exp(log_norm - 0.5 * x * x) * eval_hermite(k, x)


@dataclass(frozen=True)
class Potential:
    function: object
    eigenfunction: object = None
    analytic_spectrum: object = None


def _registry(params):
    width = float(params.get("well_half_width", 1.0))
    height = float(params.get("well_height", 10.0))
    return {
        "harmonic": Potential(lambda x: x * x, lambda k, x: _hermite_function(k, x),
                              lambda k: 2.0 * k + 1.0),
        "square_well": Potential(lambda x: 0.0 if abs(x) <= width else height),
        "zero": Potential(lambda x: 0.0),
    }


POTENTIALS = ("harmonic", "square_well", "zero")


def make_schrodinger_1d(potential, half_width, nodes, **params):
    """``-u'' + V u`` on ``(-half_width, half_width)`` with Dirichlet walls.

    ``potential`` is either a callable or a name from ``POTENTIALS``.  The
    reference spectrum is the spectrum of the assembled discrete pencil; for
    the harmonic potential the whole-line levels ``2k + 1`` are available via
    :meth:`MeshOperator.analytic_eigenvalue`.
    """
    half_width = float(half_width)
    if not half_width > 0:
        raise ValueError("half_width must be positive")
    if callable(potential):
        name, pot = getattr(potential, "__name__", "custom"), Potential(potential)
    else:
        name = potential
        try:
            pot = _registry(params)[potential]
        except KeyError:
            raise ValueError(f"unknown potential {potential!r}; expected one of {POTENTIALS}") from None
    eigenfunction, levels = pot.eigenfunction, pot.analytic_spectrum
    if name == "zero":
        span = 2.0 * half_width
        eigenfunction = lambda k, x: np.sin((k + 1) * np.pi * (x + half_width) / span)  # noqa: E731
        levels = lambda k: ((k + 1) * np.pi / span) ** 2  # noqa: E731
    op = MeshOperator(-half_width, half_width, nodes, potential=pot.function, potential_name=name,
                      eigenfunction=eigenfunction)
    op._analytic_levels = levels
    op.kind = "schrodinger_1d"
    return op


def analytic_levels(op, m):
    """Whole-line analytic levels of a Schrodinger model, if the potential has them."""
    rule = getattr(op, "_analytic_levels", None)
    if rule is None:
        raise Unsupported(f"no analytic levels for potential {getattr(op, 'potential_name', '?')!r}")
    return tuple(rule(k) for k in range(m))


@dataclass(frozen=True)
class FormLimitReport:
    """Form values along two sequences and the energy of successive increments."""

    form_values: tuple
    energy_cauchy: tuple

    def form_increments(self):
        v = np.asarray(self.form_values)
        return tuple(float(d) for d in np.abs(np.diff(v)))

    def settles_below(self, tol, series="energy"):
        """First step ``n`` (1-based) after which every increment stays below ``tol``.

        ``series`` is ``"energy"`` for the energy increments or ``"form"`` for
        successive differences of the form values.  Returns ``None`` when the
        last increment is still at or above ``tol``.
        """
        inc = self.energy_cauchy if series == "energy" else self.form_increments()
        first = None
        for n, d in enumerate(inc, start=1):
            if d < tol:
                if first is None:
                    first = n
            else:
                first = None
        return first


def form_limit_check(xs, ys, op, steps):
    """Evaluate ``q(X_n, Y_n)`` and increment energies for ``n = 1..steps``.

    ``energy_cauchy[n-1] = q(D, D) - C ||D||^2`` with ``D = X_{n+1} - X_n``.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    xv = [xs(n) for n in range(1, steps + 1)]
    values = tuple(op.form(xv[n], ys(n + 1)) for n in range(steps))
    energies = []
    for a, b in zip(xv, xv[1:]):
        d = b - a
        energies.append(max(op.form(d, d).real - op.lower_bound * op.inner(d, d).real, 0.0))
    return FormLimitReport(values, tuple(energies))
