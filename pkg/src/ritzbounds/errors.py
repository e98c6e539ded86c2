"""Exception types shared across the package."""


class RitzError(Exception):
    """Base class for all errors raised by ritzbounds."""


class NotPositiveDefinite(RitzError, ValueError):
    """A Cholesky pivot fell at or below the positive-definiteness threshold."""

    def __init__(self, pivot_index, pivot_value, message=None):
        self.pivot_index = int(pivot_index)
        self.pivot_value = float(pivot_value)
        if message is None:
            message = (f"matrix is not positive definite: pivot {self.pivot_index} "
                       f"= {self.pivot_value:.3e}")
        super().__init__(message)


class GramDegenerate(NotPositiveDefinite):
    """The Gram matrix of a trial basis is numerically singular.

    ``vector_index`` is the position of the first basis vector that is
    (numerically) a combination of the vectors before it.
    """

    def __init__(self, vector_index, pivot_value):
        self.vector_index = int(vector_index)
        super().__init__(
            vector_index, pivot_value,
            f"Gram matrix is degenerate: basis vector {vector_index} is linearly "
            f"dependent on the preceding vectors (pivot {float(pivot_value):.3e})")


class ConvergenceFailure(RitzError, RuntimeError):
    def __init__(self, iterations):
        self.iterations = int(iterations)
        super().__init__(f"Jacobi iteration did not converge in {iterations} sweeps")


class DimensionMismatch(RitzError, ValueError):
    pass


class IndexOutOfRange(RitzError, IndexError):
    pass


class RankOutOfRange(RitzError, ValueError):
    pass


class NotEigenvector(RitzError, ValueError):
    pass


class Unsupported(RitzError, TypeError):
    pass


class EmptyBasis(RitzError, ValueError):
    pass


class ConfigInvalid(RitzError, ValueError):
    pass
