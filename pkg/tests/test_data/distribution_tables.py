"""Distributions shared by the oracle tests."""

from __future__ import annotations

from radiosim.protocols.distributions import (
    alpha_distribution,
    alpha_prime_distribution,
    point_mass_distribution,
)

TABLES = [
    point_mass_distribution(0, 16),
    point_mass_distribution(1, 16),
    point_mass_distribution(3, 16),
    alpha_distribution(2**16, 2**6),
    alpha_prime_distribution(2**16, 2**6),
]
