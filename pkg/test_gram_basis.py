"""
Tests for the Gram polynomial basis
"""

import numpy as np
import pytest

from src.common.errors import BadBasisSize, IndexOutOfRange, LengthMismatch
from src.core.fc.gram_basis import build_gram_basis, discrete_inner, eval_gram, eval_gram_deriv, project


@pytest.mark.parametrize("d", range(2, 8))
def test_orthonormal_on_nodes(d):
    assert build_gram_basis(d).orthonormality_residual() <= 1e-10


def test_orthonormal_for_largest_basis():
    assert build_gram_basis(12).orthonormality_residual() <= 1e-8


@pytest.mark.parametrize("d", [3, 5, 8])
def test_first_polynomial_is_constant(d):
    basis = build_gram_basis(d)
    assert eval_gram(basis, 0, 0.3) == pytest.approx(1 / np.sqrt(d), rel=1e-14)
    assert np.allclose(basis.coeffs[0, 1:], 0.0)


def test_known_polynomials_for_three_and_five_nodes():
    """Test p_1 = y / sqrt(2) for d = 3 and p_4 for d = 5"""
    basis = build_gram_basis(3)
    assert basis.coeffs[1, 1] == pytest.approx(1 / np.sqrt(2), rel=1e-14)

    basis = build_gram_basis(5)
    lead = 140 / (3 * np.sqrt(70))
    expected = lead * np.array([9 / 70, 0.0, -31 / 28, 0.0, 1.0])
    np.testing.assert_allclose(basis.coeffs[4], expected, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("d", [4, 5, 6])
def test_parity(d):
    basis = build_gram_basis(d)
    y = np.linspace(-3.0, 3.0, 13)
    for ell in range(d):
        np.testing.assert_allclose(eval_gram(basis, ell, -y), (-1) ** ell * eval_gram(basis, ell, y),
                                   rtol=1e-12, atol=1e-12)


def test_endpoint_derivative_tables():
    basis = build_gram_basis(5)
    for ell in range(5):
        for m in range(5):
            assert basis.right_derivs[ell, m] == pytest.approx(eval_gram_deriv(basis, ell, m, 1.0), abs=1e-12)
            assert basis.left_derivs[ell, m] == pytest.approx(eval_gram_deriv(basis, ell, m, -1.0), abs=1e-12)


def test_derivative_beyond_degree_is_zero():
    basis = build_gram_basis(5)
    assert eval_gram_deriv(basis, 2, 3, 0.7) == 0.0
    assert np.all(eval_gram_deriv(basis, 1, 4, np.linspace(0, 1, 5)) == 0.0)


def test_index_errors():
    basis = build_gram_basis(4)
    with pytest.raises(IndexOutOfRange):
        eval_gram(basis, 4, 0.0)
    with pytest.raises(IndexOutOfRange):
        eval_gram_deriv(basis, 1, -1, 0.0)


@pytest.mark.parametrize("d", [1, 13])
def test_basis_size_limits(d):
    with pytest.raises(BadBasisSize):
        build_gram_basis(d)


def test_projection_of_a_basis_vector():
    basis = build_gram_basis(5)
    coefficients = project(basis, basis.node_values[2])
    np.testing.assert_allclose(coefficients, np.eye(5)[2], atol=1e-13)
    assert discrete_inner(basis, np.ones(5), 0) == pytest.approx(np.sqrt(5), rel=1e-14)


def test_projection_length_mismatch():
    basis = build_gram_basis(5)
    with pytest.raises(LengthMismatch):
        project(basis, np.ones(4))
    with pytest.raises(LengthMismatch):
        discrete_inner(basis, np.ones(6), 0)


def test_arrays_are_read_only():
    basis = build_gram_basis(5)
    with pytest.raises(ValueError):
        basis.coeffs[0, 0] = 1.0
