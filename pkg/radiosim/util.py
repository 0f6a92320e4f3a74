"""Utility functions."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np


def ceil_log2(value: float) -> int:
    """Return smallest integer k with 2^k >= value."""
    return math.ceil(math.log2(value) - 1e-12)


def is_power_of_two(value: int) -> bool:
    """Check if value is 2^i for some i >= 0."""
    return value > 0 and value & (value - 1) == 0


def lower_median(values: Sequence[float]) -> float:
    """Return lower median, always one of the values."""
    if not values:
        raise ValueError("median of empty sequence")
    return float(np.quantile(values, 0.5, method="lower"))


def nearest_rank(values: Sequence[float], fraction: float) -> float:
    """Return nearest-rank percentile, e.g. fraction=0.95 for p95."""
    if not values:
        raise ValueError("percentile of empty sequence")
    return float(np.quantile(values, fraction, method="inverted_cdf"))


def clamp_probability(value: float) -> tuple[float, bool]:
    """Clamp value into (0, 1] and report whether clamping happened."""
    if value > 1.0:
        return 1.0, True
    if value <= 0.0:
        return math.ulp(0.0), True
    return value, False
