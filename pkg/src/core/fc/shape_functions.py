"""Shape functions and blending-to-zero continuations on the extension interval [1, b].

Four families are provided:

- ``hermite``   -- two-point Hermite blends (the ModFC special case, no parameters)
- ``bump``      -- phi(1-t) / (phi(t) + phi(1-t)) with phi(t) = exp(-a / t**r)
- ``doubleexp`` -- flat 1 on [0, r1], double-exponential drop on (r1, r2), flat 0 after
- ``beta``      -- two-stage regularized incomplete Beta profile, per-l (mu, sigma)

Right profiles equal 1 at x = 1 and vanish at x = b; left profiles are
their reflections x -> b + 1 - x. All evaluators accept scalars or arrays.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import expit

from src.common.errors import ConfigMismatch, DegenerateNodes, DomainError, IndexOutOfRange
from src.core.fc.gram_basis import GramBasis, eval_gram
from src.core.fc.grid_core import FcConfig, extension_grid

logger = logging.getLogger(__name__)

# Regularized-Beta parameters (sigma_tilde, mu) for l = 0..4; later l reuse the last column
DEFAULT_SIGMA_TILDE = (0.5, 0.6, 0.4, 0.2, 0.1)
DEFAULT_MU = (1e-10, 1e-10, 1e-8, 1e-10, 1e-5)

DEFAULT_BUMP_A = 1.0
DEFAULT_BUMP_R = 2.0
DEFAULT_DOUBLE_EXP_R1 = 0.2
DEFAULT_DOUBLE_EXP_R2 = 0.8


class FamilyTag(str, Enum):
    HERMITE = "hermite"
    BUMP = "bump"
    DOUBLE_EXP = "doubleexp"
    REG_BETA = "beta"


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class ShapeFamily:
    """Tagged choice of blending profile with its parameters.

    ``beta_params`` holds one (mu, sigma_tilde) pair per Gram index and is
    only meaningful for the ``beta`` family.
    """
    tag: FamilyTag
    a: float = DEFAULT_BUMP_A
    r: float = DEFAULT_BUMP_R
    r1: float = DEFAULT_DOUBLE_EXP_R1
    r2: float = DEFAULT_DOUBLE_EXP_R2
    beta_params: Tuple[Tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "tag", FamilyTag(self.tag))
        if self.tag is FamilyTag.BUMP and not (self.a > 0 and self.r > 0):
            raise DomainError(f"Bump parameters must be positive, got a={self.a}, r={self.r}")
        if self.tag is FamilyTag.DOUBLE_EXP and not (0 <= self.r1 < self.r2 <= 1):
            raise DomainError(f"Double-exponential needs 0 <= r1 < r2 <= 1, got r1={self.r1}, r2={self.r2}")
        if self.tag is FamilyTag.REG_BETA:
            if not self.beta_params:
                raise DomainError("Regularized-Beta family needs at least one (mu, sigma_tilde) pair")
            for ell, (mu, sigma_tilde) in enumerate(self.beta_params):
                if not 0 < mu < 1:
                    raise DomainError(f"mu_{ell} must lie in (0, 1), got {mu}")
                if not 0 < sigma_tilde < 1:
                    raise DomainError(f"sigma_tilde_{ell} must lie in (0, 1), got {sigma_tilde}")

    @classmethod
    def hermite(cls) -> "ShapeFamily":
        return cls(FamilyTag.HERMITE)

    @classmethod
    def bump(cls, a: float = DEFAULT_BUMP_A, r: float = DEFAULT_BUMP_R) -> "ShapeFamily":
        return cls(FamilyTag.BUMP, a=a, r=r)

    @classmethod
    def double_exp(cls, r1: float = DEFAULT_DOUBLE_EXP_R1, r2: float = DEFAULT_DOUBLE_EXP_R2) -> "ShapeFamily":
        return cls(FamilyTag.DOUBLE_EXP, r1=r1, r2=r2)

    @classmethod
    def reg_beta(cls, d: int, overrides: Optional[Dict[int, Tuple[float, float]]] = None) -> "ShapeFamily":
        """Beta family for d Gram polynomials; ``overrides`` maps l -> (mu, sigma_tilde)."""
        overrides = overrides or {}
        params = []
        for ell in range(d):
            default_index = min(ell, len(DEFAULT_MU) - 1)
            default = (DEFAULT_MU[default_index], DEFAULT_SIGMA_TILDE[default_index])
            params.append(tuple(overrides.get(ell, default)))
        return cls(FamilyTag.REG_BETA, beta_params=tuple(params))

    def check_compatible(self, d: int) -> None:
        if self.tag is FamilyTag.REG_BETA and len(self.beta_params) < d:
            raise ConfigMismatch(
                f"Regularized-Beta family has {len(self.beta_params)} parameter pairs, d={d} needs {d}"
            )

    def sigma(self, ell: int, b: float) -> float:
        """Join point sigma_l = 1 + sigma_tilde_l (b - 1) of the Beta profile."""
        return 1.0 + self.beta_params[ell][1] * (b - 1.0)

    def describe(self, d: Optional[int] = None) -> Dict[str, str]:
        """Flat key/value view used in CSV headers and tool responses."""
        info = {"family": self.tag.value}
        if self.tag is FamilyTag.BUMP:
            info.update(a=repr(self.a), r=repr(self.r))
        elif self.tag is FamilyTag.DOUBLE_EXP:
            info.update(r1=repr(self.r1), r2=repr(self.r2))
        elif self.tag is FamilyTag.REG_BETA:
            params = self.beta_params if d is None else self.beta_params[:d]
            info["mu"] = ";".join(repr(mu) for mu, _ in params)
            info["sigma_tilde"] = ";".join(repr(st) for _, st in params)
        return info


def family_from_name(name: str, d: int, **params) -> ShapeFamily:
    """Resolve a CLI/tool family name ('hermite', 'bump', 'doubleexp', 'beta')."""
    tag = FamilyTag(name.lower())
    if tag is FamilyTag.HERMITE:
        return ShapeFamily.hermite()
    if tag is FamilyTag.BUMP:
        return ShapeFamily.bump(**params)
    if tag is FamilyTag.DOUBLE_EXP:
        return ShapeFamily.double_exp(**params)
    return ShapeFamily.reg_beta(d, params.get("overrides"))


def load_shape_config(path: Union[str, Path], d: int) -> ShapeFamily:
    """Read Beta parameters from a text file of 'ell mu sigma_tilde' lines.

    Blank lines and '#' comments are ignored; indices not listed keep
    their defaults.
    """
    overrides = {}
    for line_number, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise DomainError(f"{path}:{line_number}: expected 'ell mu sigma_tilde', got {line!r}")
        ell, mu, sigma_tilde = int(parts[0]), float(parts[1]), float(parts[2])
        if not 0 <= ell < d:
            raise IndexOutOfRange(f"{path}:{line_number}: ell={ell} outside 0..{d - 1}")
        overrides[ell] = (mu, sigma_tilde)
    logger.info(f"Loaded {len(overrides)} shape parameter overrides from {path}")
    return ShapeFamily.reg_beta(d, overrides)


# --------------------------------------------------------------------------------
# Profiles on the unit interval

def double_exp_psi(s):
    """psi(s) = exp(2 exp(-1/s) / (s - 1)) on (0, 1), with psi(0) = 1 and psi(1) = 0."""
    s = np.asarray(s, dtype=np.float64)
    inside = (s > 0) & (s < 1)
    safe = np.where(inside, s, 0.5)
    with np.errstate(over="ignore", under="ignore"):
        value = np.exp(2.0 * np.exp(-1.0 / safe) / (safe - 1.0))
    return np.where(inside, value, np.where(s <= 0, 1.0, 0.0))[()]


@lru_cache(maxsize=None)
def _reg_beta_coefficients(d: int) -> np.ndarray:
    """Monomial coefficients of B_d, expanded and normalized in exact rationals."""
    # integral_0^s t^(d+1) (1-t)^(d+1) dt = sum_k C(d+1,k) (-1)^k s^(d+2+k) / (d+2+k)
    normalization = Fraction(factorial(2 * d + 3), factorial(d + 1) ** 2)
    coeffs = [Fraction(0)] * (2 * d + 4)
    for k in range(d + 2):
        coeffs[d + 2 + k] = normalization * comb(d + 1, k) * (-1) ** k / (d + 2 + k)
    result = np.array([float(c) for c in coeffs])
    result.setflags(write=False)
    return result


def reg_beta(d: int, s):
    """Regularized incomplete Beta function B_d(s) = I_s(d+2, d+2) on [0, 1].

    Values above 1/2 use B_d(s) = 1 - B_d(1 - s), which makes B_d(1) = 1 exact.
    """
    s = np.asarray(s, dtype=np.float64)
    if np.any((s < 0) | (s > 1)) or np.any(np.isnan(s)):
        raise DomainError("reg_beta argument must lie in [0, 1]")
    coeffs = _reg_beta_coefficients(int(d))
    upper = s > 0.5
    mirrored = np.where(upper, 1.0 - s, s)
    value = P.polyval(mirrored, coeffs)
    return np.where(upper, 1.0 - value, value)[()]


# --------------------------------------------------------------------------------
# Two-point Hermite basis

@lru_cache(maxsize=None)
def hermite_unit_coeffs(d: int, m: int) -> Tuple[Fraction, ...]:
    """Exact coefficients, in u = (x - x1)/(x2 - x1), of

        u^m / m! * (1 - u)^d * sum_{k=0}^{d-m-1} C(d+k-1, d-1) u^k

    so that p_m^{x1,x2}(x) = (x2 - x1)^m times this polynomial.
    """
    if not 0 <= m <= d - 1:
        raise IndexOutOfRange(f"Hermite index m={m} outside 0..{d - 1}")
    head = [Fraction(0)] * m + [Fraction(1, factorial(m))]
    decay = [Fraction(comb(d, j) * (-1) ** j) for j in range(d + 1)]
    tail = [Fraction(comb(d + k - 1, d - 1)) for k in range(d - m)]

    def multiply(p, q):
        out = [Fraction(0)] * (len(p) + len(q) - 1)
        for i, pi in enumerate(p):
            for j, qj in enumerate(q):
                out[i + j] += pi * qj
        return out

    return tuple(multiply(multiply(head, decay), tail))


@lru_cache(maxsize=None)
def _hermite_unit_array(d: int, m: int) -> np.ndarray:
    result = np.array([float(c) for c in hermite_unit_coeffs(d, m)])
    result.setflags(write=False)
    return result


def hermite_two_point(d: int, m: int, x1: float, x2: float, x):
    """Two-point Hermite basis polynomial p_m^{x1,x2}(x).

    (p_m)^(k)(x1) = delta_{mk} and (p_m)^(k)(x2) = 0 for 0 <= k <= d-1.
    """
    if x1 == x2:
        raise DegenerateNodes(f"Hermite nodes coincide: x1 = x2 = {x1}")
    width = x2 - x1
    u = (np.asarray(x, dtype=np.float64) - x1) / width
    return (width ** m * P.polyval(u, _hermite_unit_array(d, m)))[()]


def hermite_blend_coeffs(basis: GramBasis, cfg: FcConfig, ell: int, side: Side) -> np.ndarray:
    """Coefficients, in the unit variable of ``side``, of the Hermite blend of p_l.

    Right: blend(x) = sum_m (p_l^R)^(m)(1) p_m^{1,b}(x), u = (x - 1)/(b - 1).
    Left:  blend(x) = sum_m (p_l^L)^(m)(b) p_m^{b,1}(x), u = (b - x)/(b - 1).
    """
    d = basis.d
    b = cfg.b_float
    scale = 2.0 / cfg.delta
    if side is Side.RIGHT:
        endpoint_derivs, width = basis.right_derivs[ell], b - 1.0
    else:
        endpoint_derivs, width = basis.left_derivs[ell], 1.0 - b

    total = np.zeros(2 * d)
    for m in range(ell + 1):
        weight = scale ** m * endpoint_derivs[m] * width ** m
        total = P.polyadd(total, weight * _hermite_unit_array(d, m))
    return np.pad(total, (0, 2 * d - len(total)))


# --------------------------------------------------------------------------------
# Shape functions and blended continuations

def _unit_variable(cfg: FcConfig, x) -> np.ndarray:
    b = cfg.b_float
    x = np.asarray(x, dtype=np.float64)
    tolerance = 4 * np.finfo(np.float64).eps * b
    if np.any(np.isnan(x)) or np.any((x < 1 - tolerance) | (x > b + tolerance)):
        raise DomainError(f"Shape functions are defined on [1, {cfg.b}] only")
    return np.clip((x - 1.0) / (b - 1.0), 0.0, 1.0)


def gram_right(basis: GramBasis, cfg: FcConfig, ell: int, x):
    """p_l^R(x) = p_l(2(x - 1)/delta + 1)."""
    return eval_gram(basis, ell, 2.0 * (np.asarray(x, dtype=np.float64) - 1.0) / cfg.delta + 1.0)


def gram_left(basis: GramBasis, cfg: FcConfig, ell: int, x):
    """p_l^L(x) = p_l(2(x - b)/delta - 1)."""
    return eval_gram(basis, ell, 2.0 * (np.asarray(x, dtype=np.float64) - cfg.b_float) / cfg.delta - 1.0)


def _check_ell(basis: GramBasis, ell: int) -> None:
    if not 0 <= ell < basis.d:
        raise IndexOutOfRange(f"Gram index {ell} outside 0..{basis.d - 1}")


def _profile(family: ShapeFamily, cfg: FcConfig, ell: int, t: np.ndarray) -> np.ndarray:
    """Right profile of a parametric family in the unit variable t = (x-1)/(b-1)."""
    if family.tag is FamilyTag.BUMP:
        # phi(1-t) / (phi(t) + phi(1-t)) with phi(t) = exp(-a / t^r), written as a logistic so it never forms 0/0
        with np.errstate(divide="ignore"):
            logit = family.a * (t ** -family.r - (1.0 - t) ** -family.r)
        return np.asarray(expit(logit))

    if family.tag is FamilyTag.DOUBLE_EXP:
        width = family.r2 - family.r1
        moving = double_exp_psi(np.clip((t - family.r1) / width, 0.0, 1.0))
        return np.where(t <= family.r1, 1.0, np.where(t >= family.r2, 0.0, moving))

    # Two-stage Beta: 1 -> mu on [1, sigma], mu -> 0 on [sigma, b]
    mu, sigma_tilde = family.beta_params[ell]
    first = np.clip(t / sigma_tilde, 0.0, 1.0)
    second = np.clip((t - sigma_tilde) / (1.0 - sigma_tilde), 0.0, 1.0)
    descent = np.where(
        t <= sigma_tilde,
        (1.0 - mu) * (1.0 - reg_beta(cfg.d, first)) + mu,
        mu * (1.0 - reg_beta(cfg.d, second)),
    )
    return np.where(t <= 0.0, 1.0, np.where(t >= 1.0, 0.0, descent))


def eta_right(family: ShapeFamily, basis: GramBasis, cfg: FcConfig, ell: int, x):
    """Right shape function eta_l^R on [1, b]: 1 at x = 1, 0 at x = b."""
    _check_ell(basis, ell)
    t = _unit_variable(cfg, x)
    if family.tag is not FamilyTag.HERMITE:
        return _profile(family, cfg, ell, t)[()]

    blend = P.polyval(t, hermite_blend_coeffs(basis, cfg, ell, Side.RIGHT))
    with np.errstate(divide="ignore", invalid="ignore"):
        eta = blend / gram_right(basis, cfg, ell, 1.0 + t * (cfg.b_float - 1.0))
    return np.where(t <= 0.0, 1.0, np.where(t >= 1.0, 0.0, eta))[()]


def eta_left(family: ShapeFamily, basis: GramBasis, cfg: FcConfig, ell: int, x):
    """Left shape function eta_l^L(x) = eta_l^R(b + 1 - x); own formula for Hermite."""
    _check_ell(basis, ell)
    if family.tag is not FamilyTag.HERMITE:
        x = np.asarray(x, dtype=np.float64)
        _unit_variable(cfg, x)
        return eta_right(family, basis, cfg, ell, cfg.b_float + 1.0 - x)

    t = _unit_variable(cfg, x)
    u = 1.0 - t
    blend = P.polyval(u, hermite_blend_coeffs(basis, cfg, ell, Side.LEFT))
    with np.errstate(divide="ignore", invalid="ignore"):
        eta = blend / gram_left(basis, cfg, ell, np.asarray(x, dtype=np.float64))
    return np.where(t >= 1.0, 1.0, np.where(t <= 0.0, 0.0, eta))[()]


def blend_values(family: ShapeFamily, basis: GramBasis, cfg: FcConfig, ell: int, x, side: Side):
    """Blending-to-zero continuation p_l^{R,e} or p_l^{L,e} at x in [1, b].

    The Hermite family is evaluated directly from its polynomial form, so
    the product eta * p never divides by p.
    """
    _check_ell(basis, ell)
    side = Side(side)
    t = _unit_variable(cfg, x)
    if family.tag is FamilyTag.HERMITE:
        u = t if side is Side.RIGHT else 1.0 - t
        return P.polyval(u, hermite_blend_coeffs(basis, cfg, ell, side))[()]
    if side is Side.RIGHT:
        return (gram_right(basis, cfg, ell, x) * eta_right(family, basis, cfg, ell, x))[()]
    return (gram_left(basis, cfg, ell, x) * eta_left(family, basis, cfg, ell, x))[()]


@dataclass(frozen=True, eq=False)
class BlendTable:
    """Tabulated continuations at the extension points x_{n+1}..x_{n+c}.

    right_values[l, j] = p_l^{R,e}(x_{n+1+j}); left_values likewise.
    """
    cfg: FcConfig
    family: ShapeFamily
    basis: GramBasis
    right_values: np.ndarray
    left_values: np.ndarray


def build_blend_table(family: ShapeFamily, basis: GramBasis, cfg: FcConfig) -> BlendTable:
    if basis.d != cfg.d:
        raise ConfigMismatch(f"Basis has d={basis.d} but configuration has d={cfg.d}")
    family.check_compatible(cfg.d)

    points = extension_grid(cfg)
    right = np.empty((cfg.d, cfg.c))
    left = np.empty((cfg.d, cfg.c))
    for ell in range(cfg.d):
        right[ell] = blend_values(family, basis, cfg, ell, points, Side.RIGHT)
        left[ell] = blend_values(family, basis, cfg, ell, points, Side.LEFT)
    if not (np.all(np.isfinite(right)) and np.all(np.isfinite(left))):
        raise DomainError(f"Non-finite continuation values for family {family.tag.value}, n={cfg.n}")

    right.setflags(write=False)
    left.setflags(write=False)
    logger.debug(f"Built {family.tag.value} blend table for n={cfg.n}, b={cfg.b}, d={cfg.d} ({cfg.c} points)")
    return BlendTable(cfg=cfg, family=family, basis=basis, right_values=right, left_values=left)


def sample_profiles(family: ShapeFamily, basis: GramBasis, cfg: FcConfig, ell: int,
                    samples: int) -> Dict[str, np.ndarray]:
    """eta and blend values for both sides on an equispaced grid of [1, b] (for dumps)."""
    x = np.linspace(1.0, cfg.b_float, samples)
    return {
        "x": x,
        "eta_right": np.asarray(eta_right(family, basis, cfg, ell, x)),
        "eta_left": np.asarray(eta_left(family, basis, cfg, ell, x)),
        "blend_right": np.asarray(blend_values(family, basis, cfg, ell, x, Side.RIGHT)),
        "blend_left": np.asarray(blend_values(family, basis, cfg, ell, x, Side.LEFT)),
    }


def default_family(name: str, d: int, params: Optional[Sequence[Tuple[int, float, float]]] = None) -> ShapeFamily:
    """Family by name with Beta overrides given as (ell, mu, sigma_tilde) triples."""
    if params and FamilyTag(name.lower()) is FamilyTag.REG_BETA:
        return ShapeFamily.reg_beta(d, {ell: (mu, st) for ell, mu, st in params})
    return family_from_name(name, d)
