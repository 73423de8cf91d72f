"""
Tests for boundary projections and the periodic extension
"""

import numpy as np
import pytest

from src.common.errors import ConfigMismatch, DomainError, LengthMismatch
from src.core.fc.continuation import (
    SampledFunction,
    boundary_coeffs,
    build_extension,
    continuation_sup_norm,
    extend_function,
    extension_bound,
)
from src.core.fc.gram_basis import build_gram_basis, eval_gram
from src.core.fc.grid_core import extension_grid, interior_grid, validate_config
from src.core.fc.shape_functions import ShapeFamily, Side, build_blend_table, eta_left, eta_right, hermite_two_point
from src.core.study.registry import function_registry

EPS = np.finfo(np.float64).eps


def rounding_allowance(blend, d):
    """Rounding in the projections is amplified by the continuation sup-norms."""
    total = sum(continuation_sup_norm(blend, ell, side) for ell in range(d) for side in (Side.LEFT, Side.RIGHT))
    return 1e-14 + 64 * EPS * np.sqrt(d) * total


def direct_hermite_continuation(values, basis, cfg):
    """Continuation assembled term by term from the two-point Hermite basis."""
    a_left, a_right = boundary_coeffs(SampledFunction(values), basis, cfg)
    x = extension_grid(cfg)
    scale = 2.0 / cfg.delta
    b = cfg.b_float
    total = np.zeros_like(x)
    for ell in range(cfg.d):
        for m in range(cfg.d):
            total += a_right[ell] * scale ** m * basis.right_derivs[ell, m] * hermite_two_point(cfg.d, m, 1.0, b, x)
            total += a_left[ell] * scale ** m * basis.left_derivs[ell, m] * hermite_two_point(cfg.d, m, b, 1.0, x)
    return total


def test_constant_projects_onto_first_polynomial():
    cfg = validate_config(64, "2", 5)
    a_left, a_right = boundary_coeffs(SampledFunction(np.ones(65)), build_gram_basis(5), cfg)
    expected = np.array([np.sqrt(5), 0, 0, 0, 0])
    np.testing.assert_allclose(a_left, expected, atol=1e-13)
    np.testing.assert_allclose(a_right, expected, atol=1e-13)


def test_left_edge_gram_polynomial_projects_to_unit_vector():
    cfg = validate_config(64, "2", 5)
    basis = build_gram_basis(5)
    x = interior_grid(cfg)
    values = eval_gram(basis, 1, 2.0 * x / cfg.delta - 1.0)
    a_left, _ = boundary_coeffs(SampledFunction(values), basis, cfg)
    np.testing.assert_allclose(a_left, np.eye(5)[1], atol=1e-12)


def test_linear_function_right_coefficient():
    cfg = validate_config(64, "2", 3)
    basis = build_gram_basis(3)
    _, a_right = boundary_coeffs(SampledFunction(interior_grid(cfg)), basis, cfg)
    expected = sum(1.0 - (2 - j) / 64 for j in range(3)) / np.sqrt(3)
    assert a_right[0] == pytest.approx(expected, rel=1e-13)


def test_low_degree_polynomials_are_reproduced_at_the_edge():
    cfg = validate_config(64, "2", 5)
    basis = build_gram_basis(5)
    x = interior_grid(cfg)
    values = 1.0 + 2.0 * x - 3.0 * x ** 2 + 0.5 * x ** 4
    _, a_right = boundary_coeffs(SampledFunction(values), basis, cfg)
    edge = x[cfg.n - 4:]
    y = 2.0 * (edge - 1.0) / cfg.delta + 1.0
    rebuilt = sum(a_right[ell] * eval_gram(basis, ell, y) for ell in range(5))
    np.testing.assert_allclose(rebuilt, values[cfg.n - 4:], atol=1e-10)


def test_sample_count_must_match_grid():
    cfg = validate_config(64, "2", 5)
    with pytest.raises(LengthMismatch):
        boundary_coeffs(SampledFunction(np.ones(64)), build_gram_basis(5), cfg)
    with pytest.raises(ConfigMismatch):
        boundary_coeffs(SampledFunction(np.ones(65)), build_gram_basis(4), cfg)


def test_samples_must_be_finite():
    with pytest.raises(DomainError):
        SampledFunction(np.array([1.0, np.nan, 2.0]))


@pytest.mark.parametrize("family", [ShapeFamily.bump(), ShapeFamily.hermite()])
def test_constant_is_continued_exactly(family):
    """Test families whose left and right profiles sum to one reproduce 1"""
    cfg = validate_config(16, "2", 5)
    basis = build_gram_basis(5)
    blend = build_blend_table(family, basis, cfg)
    data = build_extension(SampledFunction(np.ones(17)), blend, basis, cfg)
    np.testing.assert_allclose(data.samples, 1.0, rtol=0, atol=rounding_allowance(blend, 5))


def test_constant_under_reg_beta_follows_first_profiles():
    cfg = validate_config(16, "2", 5)
    basis = build_gram_basis(5)
    family = ShapeFamily.reg_beta(5)
    blend = build_blend_table(family, basis, cfg)
    data = build_extension(SampledFunction(np.ones(17)), blend, basis, cfg)
    x = extension_grid(cfg)
    expected = eta_right(family, basis, cfg, 0, x) + eta_left(family, basis, cfg, 0, x)
    np.testing.assert_allclose(data.continuation, expected, rtol=0, atol=rounding_allowance(blend, 5))


@pytest.mark.parametrize("n", [64, 256])
@pytest.mark.parametrize("d", [3, 5])
def test_hermite_table_matches_direct_construction(n, d):
    """Test tabulated Hermite blends against a term-by-term assembly"""
    rng = np.random.default_rng(n + d)
    cfg = validate_config(n, "2", d)
    basis = build_gram_basis(d)
    blend = build_blend_table(ShapeFamily.hermite(), basis, cfg)
    x = interior_grid(cfg)
    for _ in range(10):
        omega, phase, curvature = rng.uniform(1.0, 10.0), rng.uniform(0.0, 2 * np.pi), rng.uniform(-1.0, 1.0)
        values = np.sin(omega * x + phase) + curvature * x ** 2
        tabulated = build_extension(SampledFunction(values), blend, basis, cfg).continuation
        direct = direct_hermite_continuation(values, basis, cfg)
        assert np.max(np.abs(tabulated - direct)) <= 1e-10 * np.max(np.abs(direct))


def test_extension_is_linear():
    cfg = validate_config(32, "2", 5)
    basis = build_gram_basis(5)
    blend = build_blend_table(ShapeFamily.reg_beta(5), basis, cfg)
    x = interior_grid(cfg)
    f, g = np.cos(3 * x), np.exp(x)
    combined = build_extension(SampledFunction(2.0 * f - 0.5 * g), blend, basis, cfg).samples
    separate = (2.0 * build_extension(SampledFunction(f), blend, basis, cfg).samples
                - 0.5 * build_extension(SampledFunction(g), blend, basis, cfg).samples)
    assert np.max(np.abs(combined - separate)) <= 1e-12 * np.max(np.abs(combined))


def test_extension_keeps_samples_and_respects_bound():
    cfg = validate_config(256, "2", 5)
    entry = function_registry("smooth-osc")
    data = extend_function(entry.func, cfg, ShapeFamily.reg_beta(5))
    blend = build_blend_table(ShapeFamily.reg_beta(5), build_gram_basis(5), cfg)

    assert data.samples.shape == (cfg.total_points,)
    assert np.array_equal(data.samples[:cfg.n + 1], entry.func(interior_grid(cfg)))
    assert np.all(np.isfinite(data.samples))
    assert np.max(np.abs(data.continuation)) <= extension_bound(data, blend) * (1 + 1e-12)


def test_extension_rejects_mismatched_table():
    basis = build_gram_basis(5)
    blend = build_blend_table(ShapeFamily.bump(), basis, validate_config(32, "2", 5))
    with pytest.raises(ConfigMismatch):
        build_extension(SampledFunction(np.ones(65)), blend, basis, validate_config(64, "2", 5))


def test_sup_norm_uses_at_least_a_thousand_samples():
    cfg = validate_config(32, "2", 5)
    blend = build_blend_table(ShapeFamily.hermite(), build_gram_basis(5), cfg)
    coarse = continuation_sup_norm(blend, 4, Side.RIGHT, samples=10)
    assert coarse == continuation_sup_norm(blend, 4, Side.RIGHT, samples=1000)
