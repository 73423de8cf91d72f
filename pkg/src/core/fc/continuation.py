import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from src.common.errors import ConfigMismatch, DomainError, LengthMismatch
from src.core.fc.gram_basis import GramBasis, build_gram_basis
from src.core.fc.grid_core import FcConfig, interior_grid
from src.core.fc.shape_functions import BlendTable, ShapeFamily, Side, blend_values, build_blend_table

logger = logging.getLogger(__name__)

MIN_SUP_SAMPLES = 1000


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """f at x_j = j/n, j = 0..n, optionally with the callable it came from."""
    values: np.ndarray
    func: Optional[Callable] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1:
            raise LengthMismatch(f"Samples must be one-dimensional, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DomainError("Samples contain non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, func: Callable, cfg: FcConfig) -> "SampledFunction":
        x = interior_grid(cfg)
        values = np.broadcast_to(np.asarray(func(x), dtype=np.float64), x.shape)
        return cls(values=values, func=func)


@dataclass(frozen=True, eq=False)
class ExtendedData:
    """Periodic extension e[p]f on the nb-point grid of [0, b)."""
    cfg: FcConfig
    samples: np.ndarray
    coeff_left: np.ndarray
    coeff_right: np.ndarray

    @property
    def continuation(self) -> np.ndarray:
        return self.samples[self.cfg.n + 1:]


def boundary_coeffs(f: SampledFunction, basis: GramBasis, cfg: FcConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Gram projections of the d samples nearest each end of [0, 1].

    a_L[l] = sum_j f(x_j) p_l(y_j) for j = 0..d-1, and a_R[l] uses
    x_{n-d+1}..x_n; the strip [0, delta] maps onto the Gram nodes exactly.
    """
    if f.values.shape != (cfg.n + 1,):
        raise LengthMismatch(f"Expected {cfg.n + 1} samples for n={cfg.n}, got {f.values.shape[0]}")
    if basis.d != cfg.d:
        raise ConfigMismatch(f"Basis has d={basis.d} but configuration has d={cfg.d}")
    d = cfg.d
    a_left = basis.node_values @ f.values[:d]
    a_right = basis.node_values @ f.values[cfg.n - d + 1:]
    return a_left, a_right


def build_extension(f: SampledFunction, blend: BlendTable, basis: GramBasis, cfg: FcConfig) -> ExtendedData:
    if blend.cfg != cfg:
        raise ConfigMismatch(f"Blend table was built for {blend.cfg.describe()}, not {cfg.describe()}")
    if blend.basis.d != basis.d:
        raise ConfigMismatch(f"Blend table uses d={blend.basis.d}, basis has d={basis.d}")

    a_left, a_right = boundary_coeffs(f, basis, cfg)
    continuation = a_right @ blend.right_values + a_left @ blend.left_values

    samples = np.concatenate([f.values, continuation])
    for array in (samples, a_left, a_right):
        array.setflags(write=False)
    return ExtendedData(cfg=cfg, samples=samples, coeff_left=a_left, coeff_right=a_right)


def continuation_sup_norm(blend: BlendTable, ell: int, side: Side, samples: int = 1001) -> float:
    """max |p_l^{R,e}| (or p_l^{L,e}) over an equispaced grid of [1, b].

    Always recomputed from the shape family; the c tabulated points are not used.
    """
    x = np.linspace(1.0, blend.cfg.b_float, max(samples, MIN_SUP_SAMPLES))
    values = blend_values(blend.family, blend.basis, blend.cfg, ell, x, side)
    return float(np.max(np.abs(values)))


def extension_bound(data: ExtendedData, blend: BlendTable) -> float:
    """Triangle-inequality bound on the continuation from |a| and the tabulated blends."""
    right = np.abs(data.coeff_right) @ np.max(np.abs(blend.right_values), axis=1)
    left = np.abs(data.coeff_left) @ np.max(np.abs(blend.left_values), axis=1)
    return float(right + left)


def extend_function(func: Callable, cfg: FcConfig, family: ShapeFamily,
                    blend: Optional[BlendTable] = None) -> ExtendedData:
    """Sample func on [0, 1] and build its periodic extension in one call."""
    basis = build_gram_basis(cfg.d)
    if blend is None:
        blend = build_blend_table(family, basis, cfg)
    return build_extension(SampledFunction.from_callable(func, cfg), blend, basis, cfg)
