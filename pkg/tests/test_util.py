"""Test numeric helpers."""

import math

import pytest

from radiosim.util import (
    ceil_log2,
    clamp_probability,
    is_power_of_two,
    lower_median,
    nearest_rank,
)


@pytest.mark.parametrize(
    "value,expected", [(1, 0), (2, 1), (3, 2), (1024, 10), (1025, 11)]
)
def test_ceil_log2(value: int, expected: int) -> None:
    """Smallest k with 2^k >= value."""
    assert ceil_log2(value) == expected


@pytest.mark.parametrize(
    "value,expected", [(0, False), (1, True), (6, False), (64, True)]
)
def test_is_power_of_two(value: int, expected: bool) -> None:
    """Powers of two."""
    assert is_power_of_two(value) is expected


def test_order_statistics() -> None:
    """Lower median and nearest-rank percentile."""
    values = [float(value) for value in range(100, 0, -1)]
    assert lower_median(values) == 50
    assert lower_median([3.0]) == 3
    assert nearest_rank(values, 0.95) == 95
    assert nearest_rank([7.0], 0.95) == 7
    assert lower_median([4.0, 1.0, 3.0, 2.0]) == 2
    assert nearest_rank([float(value) for value in range(1, 21)], 0.95) == 19
    assert nearest_rank([float(value) for value in range(1, 21)], 0.5) == 10
    with pytest.raises(ValueError):
        lower_median([])


@pytest.mark.parametrize(
    "value,expected,clamped",
    [(0.25, 0.25, False), (1.0, 1.0, False), (4.0, 1.0, True), (0.0, 5e-324, True)],
)
def test_clamp_probability(value: float, expected: float, clamped: bool) -> None:
    """Values are clamped into (0, 1]."""
    assert clamp_probability(value) == (expected, clamped)
    assert 0 < clamp_probability(value)[0] <= 1
    assert math.isfinite(clamp_probability(value)[0])
