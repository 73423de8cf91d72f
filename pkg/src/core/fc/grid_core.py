"""Discretization parameters and the extended equispaced grid on [0, b)."""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from src.common.errors import BadBasisSize, BadPeriod, NotInAdmissibleSet

logger = logging.getLogger(__name__)

MAX_BASIS_SIZE = 12

RationalLike = Union[Fraction, int, str]


def parse_period(value: RationalLike) -> Fraction:
    """Parse b from '2', '3/2', '1.25', an int or a Fraction.

    Decimal strings are read exactly ('1.25' -> 5/4), never through a float.
    """
    try:
        b = Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError) as e:
        raise BadPeriod(f"Cannot read period b from {value!r}") from e
    if b <= 1:
        raise BadPeriod(f"Period b must be > 1, got {b}")
    return b


@dataclass(frozen=True)
class FcConfig:
    """Validated (n, b, d) together with every quantity derived from it"""
    n: int
    b: Fraction
    d: int
    c: int
    total_points: int

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def delta(self) -> float:
        return (self.d - 1) / self.n

    @property
    def b_float(self) -> float:
        return float(self.b)

    def describe(self) -> dict:
        return {
            "n": self.n,
            "b": str(self.b),
            "d": self.d,
            "c": self.c,
            "total_points": self.total_points,
        }


def validate_config(n: int, b: RationalLike, d: int) -> FcConfig:
    """Build an FcConfig, checking n against the admissible set N_b.

    All admissibility arithmetic is integer arithmetic on the reduced
    fraction b = p/q.
    """
    b = parse_period(b)
    if not isinstance(d, (int, np.integer)) or d < 2 or d > MAX_BASIS_SIZE:
        raise BadBasisSize(f"d must be an integer in [2, {MAX_BASIS_SIZE}], got {d}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise NotInAdmissibleSet(f"n must be a positive integer, got {n}")
    n, d = int(n), int(d)

    if n < d - 1:
        raise NotInAdmissibleSet(f"n={n} is smaller than d-1={d - 1}")
    nb = n * b
    if nb.denominator != 1:
        raise NotInAdmissibleSet(f"n*b = {nb} is not an integer (n={n}, b={b})")
    total_points = nb.numerator
    if total_points % 2:
        raise NotInAdmissibleSet(f"n*b = {total_points} is odd (n={n}, b={b})")

    c = total_points - n - 1
    if c < 1:
        raise NotInAdmissibleSet(f"Extension has no interior points (c={c}) for n={n}, b={b}")

    cfg = FcConfig(n=n, b=b, d=d, c=c, total_points=total_points)
    logger.debug(f"Validated grid configuration {cfg.describe()}")
    return cfg


def grid_points(cfg: FcConfig, indices: np.ndarray) -> np.ndarray:
    """x_j = j*b/(n+c+1) for the given indices, rounded once from the exact ratio."""
    indices = np.asarray(indices, dtype=np.int64)
    numerator = indices * cfg.b.numerator
    denominator = cfg.b.denominator * cfg.total_points
    return numerator / denominator


def main_grid(cfg: FcConfig) -> np.ndarray:
    """The full extended grid x_0..x_{n+c} on [0, b)."""
    return grid_points(cfg, np.arange(cfg.total_points))


def interior_grid(cfg: FcConfig) -> np.ndarray:
    """Grid points x_0..x_n covering [0, 1]."""
    return grid_points(cfg, np.arange(cfg.n + 1))


def extension_grid(cfg: FcConfig) -> np.ndarray:
    """Grid points x_{n+1}..x_{n+c} strictly inside (1, b)."""
    return grid_points(cfg, np.arange(cfg.n + 1, cfg.total_points))
