"""Fourier-continuation solver for linear two-point boundary value problems

    u'' + P(x) u' + Q(x) u + R(x) = 0 on [0, 1],
    a0 u(0) - b0 u'(0) = c0,   a1 u(1) + b1 u'(1) = c1.

P, Q and R are continued to period 2 and represented by their Fourier
coefficients. The periodic part v_n(x) = sum_{l=-n}^{n-1} v_l exp(pi i l x)
solves the mode-space system in least squares; two homogeneous solutions
then restore the boundary conditions.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import linalg

from src.common.errors import BadPeriod, IndexOutOfRange, LengthMismatch, RankDeficient, SingularBoundaryMatrix
from src.core.fc.continuation import SampledFunction, build_extension
from src.core.fc.gram_basis import GramBasis, build_gram_basis
from src.core.fc.grid_core import FcConfig
from src.core.fc.shape_functions import BlendTable, ShapeFamily, build_blend_table
from src.core.fc.trig_interp import TrigInterpolant, dft_coeffs, eval_interpolant, reference_grid, relative_sup_error

logger = logging.getLogger(__name__)

SOLVER_PERIOD = 2


@dataclass(frozen=True, eq=False)
class BvpProblem:
    P: Callable
    Q: Callable
    R: Callable
    a0: float
    b0: float
    c0: float
    a1: float
    b1: float
    c1: float
    h1: Callable
    dh1: Callable
    h2: Callable
    dh2: Callable
    exact_solution: Optional[Callable] = None

    def boundary_matrix(self) -> np.ndarray:
        return np.array([
            [self.a0 * self.h1(0.0) - self.b0 * self.dh1(0.0), self.a0 * self.h2(0.0) - self.b0 * self.dh2(0.0)],
            [self.a1 * self.h1(1.0) + self.b1 * self.dh1(1.0), self.a1 * self.h2(1.0) + self.b1 * self.dh2(1.0)],
        ], dtype=np.float64)

    def boundary_residual(self, u0: float, du0: float, u1: float, du1: float) -> float:
        """|a0 u(0) - b0 u'(0) - c0| + |a1 u(1) + b1 u'(1) - c1|"""
        left = self.a0 * u0 - self.b0 * du0 - self.c0
        right = self.a1 * u1 + self.b1 * du1 - self.c1
        return abs(left) + abs(right)


class CoefficientLookup:
    """Fourier coefficients of a continued function, zero outside |m| <= n-1.

    Supports indices |m| <= 3n, enough for every k - l in the assembled system.
    """

    def __init__(self, interpolant: TrigInterpolant, n: int):
        if interpolant.num_modes != 2 * n:
            raise LengthMismatch(f"Expected {2 * n} modes for n={n}, got {interpolant.num_modes}")
        self.n = n
        self.reach = 3 * n
        # table[m + 3n] = c_m for |m| <= n-1; the unpaired mode -n is dropped
        table = np.zeros(2 * self.reach + 1, dtype=np.complex128)
        table[self.reach - n + 1:self.reach + n] = interpolant.coeffs[1:]
        table.setflags(write=False)
        self._table = table

    def take(self, m) -> np.ndarray:
        m = np.asarray(m)
        if np.any(np.abs(m) > self.reach):
            raise IndexOutOfRange(f"Coefficient index outside |m| <= {self.reach}")
        return self._table[m + self.reach]

    def __getitem__(self, m: int) -> complex:
        return complex(self.take(m))


@dataclass(frozen=True, eq=False)
class BvpSolution:
    v_coeffs: np.ndarray
    xi1: float
    xi2: float
    residual_norm: float
    cfg: FcConfig
    problem: BvpProblem
    condition_number: float = float("nan")
    error: Optional[float] = None

    @cached_property
    def _v(self) -> TrigInterpolant:
        return TrigInterpolant(Fraction(SOLVER_PERIOD), 2 * self.cfg.n, self.v_coeffs)

    def periodic_part(self, x) -> np.ndarray:
        return eval_interpolant(self._v, x)

    def evaluate(self, x) -> np.ndarray:
        """u_n(x) = v_n(x) + xi1 h1(x) + xi2 h2(x) for x in [0, 1]."""
        x = np.asarray(x, dtype=np.float64)
        return self.periodic_part(x) + self.xi1 * self.problem.h1(x) + self.xi2 * self.problem.h2(x)

    def derivative(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return (eval_interpolant(self._v.derivative(), x)
                + self.xi1 * self.problem.dh1(x) + self.xi2 * self.problem.dh2(x))

    def boundary_residual(self) -> float:
        ends = np.array([0.0, 1.0])
        u, du = self.evaluate(ends), self.derivative(ends)
        return self.problem.boundary_residual(u[0], du[0], u[1], du[1])


def _require_solver_period(cfg: FcConfig) -> None:
    if cfg.b != SOLVER_PERIOD:
        raise BadPeriod(f"The BVP solver works with b = {SOLVER_PERIOD}, got b = {cfg.b}")


def continue_coefficient(g: Callable, cfg: FcConfig, basis: GramBasis, blend: BlendTable) -> CoefficientLookup:
    _require_solver_period(cfg)
    data = build_extension(SampledFunction.from_callable(g, cfg), blend, basis, cfg)
    return CoefficientLookup(dft_coeffs(data), cfg.n)


def assemble_system(p_coeffs: CoefficientLookup, q_coeffs: CoefficientLookup,
                    cfg: FcConfig) -> Tuple[np.ndarray, Callable[[CoefficientLookup], np.ndarray]]:
    """Rectangular (4n x 2n) mode-space system and a builder for its right-hand side.

    Row k runs over -2n..2n-1 and column l over -n..n-1:
        A[k, l] = pi i l P_{k-l} + Q_{k-l} - (pi k)^2 [k == l, |k| <= n].
    """
    n = cfg.n
    rows = np.arange(-2 * n, 2 * n)
    cols = np.arange(-n, n)
    offsets = rows[:, None] - cols[None, :]

    matrix = 1j * np.pi * cols[None, :] * p_coeffs.take(offsets) + q_coeffs.take(offsets)
    middle = np.arange(n, 3 * n)
    matrix[middle, middle - n] -= (np.pi * rows[middle]) ** 2

    def rhs(r_coeffs: CoefficientLookup) -> np.ndarray:
        vector = np.zeros(4 * n, dtype=np.complex128)
        vector[middle] = -r_coeffs.take(rows[middle])
        return vector

    logger.debug(f"Assembled {matrix.shape[0]}x{matrix.shape[1]} mode-space system for n={n}")
    return matrix, rhs


def solve_least_squares(matrix: np.ndarray, rhs: np.ndarray) -> Tuple[np.ndarray, float]:
    """min ||A v - rhs||_2 by column-pivoted Householder QR."""
    matrix = np.asarray(matrix)
    rhs = np.asarray(rhs)
    if matrix.ndim != 2 or rhs.shape != (matrix.shape[0],):
        raise LengthMismatch(f"Matrix {matrix.shape} and right-hand side {rhs.shape} do not conform")
    rows, columns = matrix.shape

    q, r, pivots = linalg.qr(matrix, mode="economic", pivoting=True)
    diagonal = np.abs(np.diag(r))
    tolerance = max(rows, columns) * np.finfo(np.float64).eps * (diagonal[0] if diagonal.size else 0.0)
    rank = int(np.count_nonzero(diagonal > tolerance))
    if rows < columns or rank < columns:
        smallest = float(diagonal[rank - 1]) if rank else 0.0
        raise RankDeficient(rank, columns, smallest)

    solution = np.empty(columns, dtype=np.result_type(matrix, rhs, np.float64))
    solution[pivots] = linalg.solve_triangular(r, q.conj().T @ rhs)
    residual = float(np.linalg.norm(matrix @ solution - rhs))
    return solution, residual


def _periodic_boundary_values(v_coeffs: np.ndarray, n: int) -> Tuple[float, float, float, float]:
    """v(0), v'(0), v(1), v'(1) straight from the coefficients."""
    modes = np.arange(-n, n)
    signs = np.where(modes % 2 == 0, 1.0, -1.0)
    derivative = 1j * np.pi * modes * v_coeffs
    return (
        float(np.sum(v_coeffs).real),
        float(np.sum(derivative).real),
        float(np.sum(signs * v_coeffs).real),
        float(np.sum(signs * derivative).real),
    )


def boundary_correction(v_coeffs: np.ndarray, prob: BvpProblem) -> Tuple[float, float, float]:
    """(xi1, xi2, condition number) making u_n meet both Robin conditions."""
    n = v_coeffs.size // 2
    v0, dv0, v1, dv1 = _periodic_boundary_values(v_coeffs, n)
    matrix = prob.boundary_matrix()
    with np.errstate(divide="ignore"):
        condition = float(np.linalg.cond(matrix))
    singular = np.linalg.matrix_rank(matrix) < 2
    if singular or not np.isfinite(condition) or condition * np.finfo(np.float64).eps >= 1.0:
        raise SingularBoundaryMatrix(condition)

    rhs = np.array([
        prob.c0 - (prob.a0 * v0 - prob.b0 * dv0),
        prob.c1 - (prob.a1 * v1 + prob.b1 * dv1),
    ])
    xi1, xi2 = np.linalg.solve(matrix, rhs)
    return float(xi1), float(xi2), condition


def solve_bvp(prob: BvpProblem, cfg: FcConfig, family: ShapeFamily,
              ref_grid: Optional[int] = 2 ** 17) -> BvpSolution:
    """Continue P, Q, R, solve for v_n, correct the boundary conditions.

    When the problem carries an exact solution and ``ref_grid`` is set, the
    relative sup error on z_j = j/N is stored in ``error``.
    """
    _require_solver_period(cfg)
    basis = build_gram_basis(cfg.d)
    blend = build_blend_table(family, basis, cfg)

    p_coeffs = continue_coefficient(prob.P, cfg, basis, blend)
    q_coeffs = continue_coefficient(prob.Q, cfg, basis, blend)
    r_coeffs = continue_coefficient(prob.R, cfg, basis, blend)

    matrix, rhs = assemble_system(p_coeffs, q_coeffs, cfg)
    v_coeffs, residual = solve_least_squares(matrix, rhs(r_coeffs))
    v_coeffs.setflags(write=False)
    xi1, xi2, condition = boundary_correction(v_coeffs, prob)
    logger.info(
        f"BVP n={cfg.n} family={family.tag.value}: least-squares residual {residual:.3e}, "
        f"boundary matrix condition {condition:.3e}"
    )

    solution = BvpSolution(v_coeffs=v_coeffs, xi1=xi1, xi2=xi2, residual_norm=residual,
                           cfg=cfg, problem=prob, condition_number=condition)
    if prob.exact_solution is None or ref_grid is None:
        return solution

    z = reference_grid(ref_grid)
    error = relative_sup_error(solution.evaluate(z), prob.exact_solution(z))
    logger.info(f"BVP n={cfg.n} family={family.tag.value}: e_n = {error:.3e}")
    return BvpSolution(v_coeffs=v_coeffs, xi1=xi1, xi2=xi2, residual_norm=residual, cfg=cfg,
                       problem=prob, condition_number=condition, error=error)
