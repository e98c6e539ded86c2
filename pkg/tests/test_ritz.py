import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ritzbounds.errors import DimensionMismatch, GramDegenerate, IndexOutOfRange
from ritzbounds.forms import CoefficientVector, make_diagonal_operator, make_dirichlet_laplacian, make_matrix_operator
from ritzbounds.oracles import random_hermitian
from ritzbounds.ritz import (TrialBasis, assemble_form_matrix, assemble_gram, nested_monotonicity_check,
                             ritz_spectrum)

e = CoefficientVector.unit
A2 = [[2, -1], [-1, 2]]


def test_trial_basis_validation():
    with pytest.raises(DimensionMismatch):
        TrialBasis([])
    with pytest.raises(TypeError):
        TrialBasis([[1, 0]])
    assert TrialBasis([e(0)]).is_prefix_of(TrialBasis([e(0), e(1)]))
    assert not TrialBasis([e(1)]).is_prefix_of(TrialBasis([e(0), e(1)]))


def test_gram_examples():
    op = make_diagonal_operator(lambda i: i + 1.0)
    assert np.allclose(assemble_gram([e(0), e(1)], op).array, np.eye(2))
    assert np.allclose(assemble_gram([e(0), e(0) + e(1)], op).array, [[1, 1], [1, 2]])
    lap = make_dirichlet_laplacian(math.pi, 3)
    h = lap.h
    assert np.allclose(assemble_gram([e(0), e(1)], lap).array, [[2 * h / 3, h / 6], [h / 6, 2 * h / 3]])
    assert np.allclose(assemble_form_matrix([e(0), e(1)], lap).array, [[2 / h, -1 / h], [-1 / h, 2 / h]])


def test_form_matrix_examples():
    op = make_diagonal_operator(lambda i: i + 1.0)
    assert np.allclose(assemble_form_matrix([e(0), e(1)], op).array, np.diag([1, 2]))
    a = random_hermitian(np.random.default_rng(0), 4)
    mop = make_matrix_operator(a)
    assert np.allclose(assemble_form_matrix([e(i) for i in range(4)], mop).array, a)


def test_index_out_of_range_propagates():
    with pytest.raises(IndexOutOfRange):
        assemble_gram([e(0), e(2)], make_matrix_operator(A2))


def test_threaded_assembly_is_identical():
    a = random_hermitian(np.random.default_rng(1), 8)
    op = make_matrix_operator(a)
    rng = np.random.default_rng(2)
    basis = [CoefficientVector.from_dense(rng.normal(size=8) + 1j * rng.normal(size=8)) for _ in range(6)]
    assert np.array_equal(assemble_gram(basis, op, threads=4).array, assemble_gram(basis, op).array)
    assert np.array_equal(ritz_spectrum(basis, op, threads=4).values, ritz_spectrum(basis, op).values)


def test_ritz_examples():
    op = make_diagonal_operator(lambda i: i + 1.0)
    spec = ritz_spectrum([e(i) for i in range(5)], op)
    assert np.array_equal(spec.values, [1, 2, 3, 4, 5])
    assert spec.upper_bound_ok

    lap = make_dirichlet_laplacian(math.pi, 1)
    spec = ritz_spectrum([e(0)], lap)
    assert spec.values[0] == pytest.approx(12 / math.pi**2)
    assert spec.values[0] >= 1 and spec.upper_bound_ok

    s = 1 / math.sqrt(2)
    spec = ritz_spectrum([(e(0) + e(1)) * s, (e(0) - e(1)) * s], make_matrix_operator(A2))
    assert np.allclose(spec.values, [1, 3], atol=1e-14)


def test_ritz_vectors_are_eigenvectors_in_invariant_subspace():
    op = make_matrix_operator(A2)
    spec = ritz_spectrum([e(0), e(1)], op)
    v = spec.ritz_vector(0)
    assert op.rayleigh_quotient(v) == pytest.approx(1.0)
    assert op.norm(v) == pytest.approx(1.0)


def test_degenerate_basis_names_vector():
    op = make_matrix_operator(np.eye(3))
    with pytest.raises(GramDegenerate) as info:
        ritz_spectrum([e(0), e(1), e(0) + e(1) * 2.0], op)
    assert info.value.vector_index == 2
    assert "basis vector 2" in str(info.value)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), k=st.integers(1, 6))
def test_upper_bound_property(seed, k):
    rng = np.random.default_rng(seed)
    op = make_matrix_operator(random_hermitian(rng, 6))
    basis = [CoefficientVector.from_dense(rng.normal(size=6) + 1j * rng.normal(size=6)) for _ in range(k)]
    spec = ritz_spectrum(basis, op)
    ref = np.array(op.reference_spectrum)
    assert np.all(spec.values >= ref[:k] - 1e-10 * np.maximum(1, np.abs(spec.values)))
    # interlacing from above as well: mu_j <= lambda_{j + dim - k}
    assert np.all(spec.values <= ref[6 - k:] + 1e-10 * np.maximum(1, np.abs(spec.values)))


def test_monotonicity_examples():
    op = make_diagonal_operator(lambda i: i + 1.0)
    rep = nested_monotonicity_check([[e(0)], [e(0), e(1)]], op)
    assert rep.ok and rep.values == ((1.0,), (1.0, 2.0))
    basis = [e(0) + e(3), e(1) - e(2) * 0.5]
    rep = nested_monotonicity_check([basis, basis], op)
    assert rep.ok
    assert abs(rep.steps[0].max_increase) <= 1e-12


def test_monotonicity_rejects_non_nested_chain():
    op = make_diagonal_operator(lambda i: i + 1.0)
    with pytest.raises(ValueError):
        nested_monotonicity_check([[e(1)], [e(0), e(1)]], op)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_monotonicity_property(seed):
    rng = np.random.default_rng(seed)
    op = make_matrix_operator(random_hermitian(rng, 7))
    vectors = [CoefficientVector.from_dense(rng.normal(size=7) + 1j * rng.normal(size=7)) for _ in range(7)]
    assert nested_monotonicity_check([vectors[:k] for k in range(1, 8)], op).ok
