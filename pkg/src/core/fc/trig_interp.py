"""Trigonometric interpolation of b-periodic extended data.

Coefficients are c_l = (1/nb) sum_j g_j exp(-2 pi i l x_j / b) for
l = -nb/2 .. nb/2 - 1, stored in ascending order of l. The Nyquist mode
l = -nb/2 is kept unpaired; evaluation takes the real part of the synthesis.
"""

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Union

import numpy as np

from src.common.errors import DomainError, IndexOutOfRange, LengthMismatch, NonDyadicSequence, ZeroFunction
from src.core.fc.continuation import ExtendedData
from src.core.fc.grid_core import FcConfig

logger = logging.getLogger(__name__)

DIRECT_CHUNK = 2048


@dataclass(frozen=True, eq=False)
class TrigInterpolant:
    period: Fraction
    num_modes: int
    coeffs: np.ndarray

    @property
    def modes(self) -> np.ndarray:
        half = self.num_modes // 2
        return np.arange(-half, self.num_modes - half)

    def coeff(self, ell: int) -> complex:
        half = self.num_modes // 2
        if not -half <= ell < self.num_modes - half:
            raise IndexOutOfRange(f"Mode {ell} outside [{-half}, {self.num_modes - half - 1}]")
        return complex(self.coeffs[ell + half])

    def derivative(self) -> "TrigInterpolant":
        """Interpolant of the derivative: c_l -> (2 pi i l / b) c_l."""
        factor = 2j * np.pi * self.modes / float(self.period)
        return replace(self, coeffs=self.coeffs * factor)


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    e_n: float
    noc_n: Optional[float] = None


def dft_from_samples(samples, period: Union[Fraction, int]) -> TrigInterpolant:
    samples = np.asarray(samples)
    if samples.ndim != 1 or samples.size < 1:
        raise LengthMismatch(f"Expected a non-empty one-dimensional sample vector, got shape {samples.shape}")
    num_modes = samples.size
    coeffs = np.fft.fftshift(np.fft.fft(samples)) / num_modes
    coeffs.setflags(write=False)
    return TrigInterpolant(period=Fraction(period), num_modes=num_modes, coeffs=coeffs)


def dft_coeffs(data: ExtendedData) -> TrigInterpolant:
    if data.samples.shape != (data.cfg.total_points,):
        raise LengthMismatch(
            f"Extended data has {data.samples.shape[0]} samples, expected nb={data.cfg.total_points}"
        )
    return dft_from_samples(data.samples, data.cfg.b)


def _refinement_size(t: TrigInterpolant, points: np.ndarray) -> Optional[int]:
    """Size K of the uniform grid j*b/K that ``points`` starts, if K is a multiple of nb."""
    if points.ndim != 1 or points.size < 2 or points[0] != 0.0 or points[1] <= 0.0:
        return None
    b = t.period
    total = int(round(float(b) / points[1]))
    if total < t.num_modes or total % t.num_modes or points.size > total:
        return None
    expected = np.arange(points.size, dtype=np.int64) * b.numerator / (b.denominator * total)
    if not np.allclose(points, expected, rtol=0.0, atol=4 * np.finfo(np.float64).eps * float(b)):
        return None
    return total


def _eval_padded(t: TrigInterpolant, total: int, count: int) -> np.ndarray:
    half = t.num_modes // 2
    spectrum = np.zeros(total, dtype=np.complex128)
    spectrum[:t.num_modes - half] = t.coeffs[half:]
    spectrum[total - half:] = t.coeffs[:half]
    return (np.fft.ifft(spectrum) * total).real[:count]


def _eval_direct(t: TrigInterpolant, points: np.ndarray) -> np.ndarray:
    scale = 2j * np.pi / float(t.period)
    modes = t.modes
    result = np.empty(points.shape, dtype=np.float64)
    flat_points = points.ravel()
    flat_result = result.reshape(-1)
    for start in range(0, flat_points.size, DIRECT_CHUNK):
        chunk = flat_points[start:start + DIRECT_CHUNK]
        phases = np.exp(scale * np.outer(chunk, modes))
        flat_result[start:start + DIRECT_CHUNK] = (phases @ t.coeffs).real
    return result


def eval_interpolant(t: TrigInterpolant, points) -> np.ndarray:
    """Re sum_l c_l exp(2 pi i l x / b) at each point in [0, b).

    Uniform refinements j*b/K with nb | K go through a zero-padded inverse
    FFT; anything else is summed directly.
    """
    points = np.asarray(points, dtype=np.float64)
    b = float(t.period)
    if np.any(np.isnan(points)) or np.any((points < 0.0) | (points >= b)):
        raise DomainError(f"Evaluation points must lie in [0, {t.period})")

    total = _refinement_size(t, points)
    if total is not None:
        logger.debug(f"Evaluating {points.size} points by padded transform of size {total}")
        return _eval_padded(t, total, points.size)
    logger.debug(f"Evaluating {points.size} points by direct summation over {t.num_modes} modes")
    return _eval_direct(t, points)


def cardinal_kernel(s, num_points: int):
    """Cardinal function of the num_points-point periodic grid at offset s (in grid steps).

    Even num_points: sin(pi s) cot(pi s / N) / N, which includes the unpaired
    Nyquist mode. Odd num_points: sin(pi s) / (N sin(pi s / N)).
    """
    s = np.asarray(s, dtype=np.float64)
    wrapped = s - num_points * np.round(s / num_points)
    at_node = np.abs(wrapped) < 1e-12
    safe = np.where(at_node, 0.5, wrapped)
    with np.errstate(divide="ignore", invalid="ignore"):
        if num_points % 2 == 0:
            value = np.sin(np.pi * safe) / np.tan(np.pi * safe / num_points)
        else:
            value = np.sin(np.pi * safe) / np.sin(np.pi * safe / num_points)
    return np.where(at_node, 1.0, value / num_points)[()]


def lagrange_kernel(j: int, x, cfg: FcConfig):
    """L_j(x): the trigonometric interpolant of the j-th unit vector on the nb-point grid."""
    if not 0 <= j < cfg.total_points:
        raise IndexOutOfRange(f"Grid index {j} outside 0..{cfg.total_points - 1}")
    # x_j = j b / nb, so the offset in grid steps is n x - j
    return cardinal_kernel(cfg.n * np.asarray(x, dtype=np.float64) - j, cfg.total_points)


def reference_grid(ref_grid: int) -> np.ndarray:
    if ref_grid < 2:
        raise DomainError(f"Reference grid needs N >= 2, got {ref_grid}")
    return np.arange(ref_grid + 1) / ref_grid


def relative_sup_error(approx, exact) -> float:
    exact = np.asarray(exact, dtype=np.float64)
    scale = np.max(np.abs(exact))
    if scale == 0.0:
        raise ZeroFunction("Reference function vanishes on the whole evaluation grid")
    return float(np.max(np.abs(np.asarray(approx) - exact)) / scale)


def approx_error(f: Callable, t: TrigInterpolant, ref_grid: int) -> float:
    """e_n = max_j |t(z_j) - f(z_j)| / max_j |f(z_j)| with z_j = j/N, j = 0..N."""
    z = reference_grid(ref_grid)
    exact = np.broadcast_to(np.asarray(f(z), dtype=np.float64), z.shape)
    return relative_sup_error(eval_interpolant(t, z), exact)


def noc(rows: Sequence[ConvergenceRow]) -> List[ConvergenceRow]:
    """Fill noc_n = log2(e_{n/2} / e_n) for every row after the first.

    A zero error yields +inf (or nan for 0/0).
    """
    rows = list(rows)
    for previous, current in zip(rows, rows[1:]):
        if current.n != 2 * previous.n:
            raise NonDyadicSequence(f"n={current.n} does not follow n={previous.n} by doubling")

    if not rows:
        return []
    result = [replace(rows[0], noc_n=None)]
    for previous, current in zip(rows, rows[1:]):
        with np.errstate(divide="ignore", invalid="ignore"):
            order = float(np.log2(np.float64(previous.e_n) / np.float64(current.e_n)))
        result.append(replace(current, noc_n=order))
    return result
