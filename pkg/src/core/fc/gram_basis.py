"""Gram polynomials: the basis orthonormal under the discrete inner product
on d equispaced nodes of [-1, 1].

The basis is built by modified Gram-Schmidt (with one reorthogonalization
pass) on the columns of the node Vandermonde matrix, carried out in
``np.longdouble``. The triangular factor is inverted by back-substitution
to obtain monomial coefficients, so every p_l can be evaluated and
differentiated anywhere on the real line.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P

from src.common.errors import BadBasisSize, IndexOutOfRange, LengthMismatch
from src.core.fc.grid_core import MAX_BASIS_SIZE

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GramBasis:
    """d orthonormal Gram polynomials.

    coeffs[l, m] is the coefficient of y**m in p_l (lower triangular).
    node_values[l, j] = p_l(y_j).
    right_derivs[l, m] = p_l^(m)(+1), left_derivs[l, m] = p_l^(m)(-1).
    """
    d: int
    nodes: np.ndarray
    coeffs: np.ndarray
    node_values: np.ndarray
    right_derivs: np.ndarray
    left_derivs: np.ndarray

    def orthonormality_residual(self) -> float:
        gram = self.node_values @ self.node_values.T
        return float(np.max(np.abs(gram - np.eye(self.d))))


def _check_index(basis: GramBasis, ell: int) -> None:
    if not 0 <= ell < basis.d:
        raise IndexOutOfRange(f"Gram index {ell} outside 0..{basis.d - 1}")


def _orthonormalize(vandermonde: np.ndarray) -> tuple:
    """Modified Gram-Schmidt with reorthogonalization; returns (Q, R) with V = Q R."""
    d = vandermonde.shape[1]
    q = np.zeros_like(vandermonde)
    r = np.zeros((d, d), dtype=vandermonde.dtype)
    for ell in range(d):
        v = vandermonde[:, ell].copy()
        for _ in range(2):
            for k in range(ell):
                proj = q[:, k] @ v
                r[k, ell] += proj
                v -= proj * q[:, k]
        norm = np.sqrt(v @ v)
        r[ell, ell] = norm
        q[:, ell] = v / norm
    return q, r


def _upper_triangular_inverse(r: np.ndarray) -> np.ndarray:
    """Column-by-column back-substitution, kept in the input precision."""
    d = r.shape[0]
    inv = np.zeros_like(r)
    for col in range(d):
        inv[col, col] = 1 / r[col, col]
        for row in range(col - 1, -1, -1):
            inv[row, col] = -(r[row, row + 1:col + 1] @ inv[row + 1:col + 1, col]) / r[row, row]
    return inv


@lru_cache(maxsize=None)
def build_gram_basis(d: int) -> GramBasis:
    """Construct the d-point Gram basis (positive leading coefficients)."""
    if not isinstance(d, (int, np.integer)) or not 2 <= d <= MAX_BASIS_SIZE:
        raise BadBasisSize(f"d must be an integer in [2, {MAX_BASIS_SIZE}], got {d}")
    d = int(d)

    wide = np.longdouble
    nodes = -1 + 2 * np.arange(d, dtype=wide) / (d - 1)
    vandermonde = nodes[:, None] ** np.arange(d)[None, :]
    _, r = _orthonormalize(vandermonde)

    # V = Q R  =>  Q = V R^{-1}; column l of R^{-1} holds the monomial coefficients of p_l
    coeffs_wide = _upper_triangular_inverse(r).T
    coeffs = np.tril(coeffs_wide.astype(np.float64))
    node_values = (vandermonde @ coeffs_wide.T).T.astype(np.float64)

    right_derivs = np.zeros((d, d))
    left_derivs = np.zeros((d, d))
    for ell in range(d):
        for m in range(ell + 1):
            derivative = P.polyder(coeffs[ell, :ell + 1], m)
            right_derivs[ell, m] = P.polyval(1.0, derivative)
            left_derivs[ell, m] = P.polyval(-1.0, derivative)

    basis = GramBasis(
        d=d,
        nodes=nodes.astype(np.float64),
        coeffs=coeffs,
        node_values=node_values,
        right_derivs=right_derivs,
        left_derivs=left_derivs,
    )
    for array in (basis.nodes, basis.coeffs, basis.node_values, basis.right_derivs, basis.left_derivs):
        array.setflags(write=False)
    logger.debug(f"Built Gram basis d={d}, orthonormality residual {basis.orthonormality_residual():.2e}")
    return basis


def eval_gram(basis: GramBasis, ell: int, y):
    """p_l(y) by Horner's rule; valid for any real y, scalar or array."""
    _check_index(basis, ell)
    return P.polyval(y, basis.coeffs[ell, :ell + 1])


def eval_gram_deriv(basis: GramBasis, ell: int, m: int, y):
    """m-th derivative of p_l at y; identically zero when m > l."""
    _check_index(basis, ell)
    if m < 0:
        raise IndexOutOfRange(f"Derivative order must be >= 0, got {m}")
    if m > ell:
        return np.zeros_like(np.asarray(y, dtype=np.float64))[()]
    return P.polyval(y, P.polyder(basis.coeffs[ell, :ell + 1], m))


def discrete_inner(basis: GramBasis, samples, ell: int) -> float:
    """<samples, p_l> = sum_j samples[j] * p_l(y_j)."""
    _check_index(basis, ell)
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != (basis.d,):
        raise LengthMismatch(f"Expected {basis.d} samples, got shape {samples.shape}")
    return float(samples @ basis.node_values[ell])


def project(basis: GramBasis, samples) -> np.ndarray:
    """All d coefficients <samples, p_l> at once."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape != (basis.d,):
        raise LengthMismatch(f"Expected {basis.d} samples, got shape {samples.shape}")
    return basis.node_values @ samples
