"""
Tests for grid configuration and the extended grid
"""

from fractions import Fraction

import numpy as np
import pytest

from src.common.errors import BadBasisSize, BadPeriod, NotInAdmissibleSet
from src.core.fc.grid_core import (
    extension_grid,
    interior_grid,
    main_grid,
    parse_period,
    validate_config,
)


def test_parse_period_reads_exact_rationals():
    """Test that decimal and fraction strings are read exactly"""
    assert parse_period("1.25") == Fraction(5, 4)
    assert parse_period("3/2") == Fraction(3, 2)
    assert parse_period(2) == Fraction(2)


@pytest.mark.parametrize("value", ["1", "0.5", "abc", "1/0"])
def test_parse_period_rejects_bad_values(value):
    with pytest.raises(BadPeriod):
        parse_period(value)


@pytest.mark.parametrize("n, b, d, c", [(64, "2", 5, 63), (64, "3/2", 5, 31), (64, "5/4", 4, 15), (4, "2", 5, 3)])
def test_validate_config_derived_sizes(n, b, d, c):
    """Test c = nb - n - 1 and total = n + c + 1 = nb"""
    cfg = validate_config(n, b, d)
    assert cfg.c == c
    assert cfg.total_points == n + c + 1
    assert cfg.delta == pytest.approx((d - 1) / n)


@pytest.mark.parametrize("n, b, d", [
    (3, "3/2", 2),    # nb = 4.5
    (6, "3/2", 2),    # nb = 9 odd
    (3, "2", 5),      # n < d - 1
    (1, "2", 2),      # no extension point
    (0, "2", 2),
])
def test_validate_config_rejects_inadmissible_n(n, b, d):
    with pytest.raises(NotInAdmissibleSet):
        validate_config(n, b, d)


@pytest.mark.parametrize("d", [1, 13])
def test_validate_config_rejects_basis_size(d):
    with pytest.raises(BadBasisSize):
        validate_config(64, "2", d)


def test_grid_points_reduce_to_j_over_n():
    """Test that x_j = j b / nb equals j / n bit for bit"""
    for b in ("2", "3/2", "5/4"):
        cfg = validate_config(64, b, 5)
        x = main_grid(cfg)
        assert np.array_equal(x, np.arange(cfg.total_points) / 64)


def test_smallest_grid():
    cfg = validate_config(4, "2", 3)
    assert main_grid(cfg).tolist() == [0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75]


def test_interior_and_extension_split():
    cfg = validate_config(32, "2", 5)
    interior = interior_grid(cfg)
    extension = extension_grid(cfg)
    assert interior.size == cfg.n + 1
    assert extension.size == cfg.c
    assert interior[0] == 0.0 and interior[-1] == 1.0
    assert np.all(extension > 1.0) and np.all(extension < cfg.b_float)


def test_describe_round_trips_parameters():
    cfg = validate_config(64, "3/2", 5)
    assert cfg.describe() == {"n": 64, "b": "3/2", "d": 5, "c": 31, "total_points": 96}
