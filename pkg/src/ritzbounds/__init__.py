"""Rayleigh-Ritz eigenvalue bounds for semibounded Hermitian forms.

The lowest eigenvalues of an operator are approximated from finite trial
spaces inside its form domain.  Ritz values are upper bounds, and pooling the
trial vectors of all steps gives estimates squeezed between the exact
eigenvalues and the small-space Ritz values.
"""

from .convergence import (ApproximatingFamily, ConvergenceReport, build_pooled_basis, family_mesh_interpolation,
                          family_oracle, family_truncation, gram_limit_check, run_study)
from .errors import (ConfigInvalid, ConvergenceFailure, DimensionMismatch, EmptyBasis, GramDegenerate,
                     IndexOutOfRange, NotEigenvector, NotPositiveDefinite, RankOutOfRange, RitzError, Unsupported)
from .forms import (CoefficientVector, DiagonalOperator, MatrixOperator, MeshOperator, form_limit_check,
                    make_diagonal_operator, make_dirichlet_laplacian, make_matrix_operator, make_schrodinger_1d)
from .linalg import HermitianMatrix, cholesky, condition_estimate, eigen_generalized, eigen_hermitian
from .minimax import constrained_inf, minimum_principle, mu_n, supinf_verify
from .ritz import TrialBasis, nested_monotonicity_check, ritz_spectrum

__version__ = "0.1.0"
