"""Test batch runs and lower-bound experiments."""

from __future__ import annotations

import dataclasses
import math
from types import SimpleNamespace

import numpy as np
import pytest

from radiosim import experiments
from radiosim.experiments import (
    best_point_mass_sweep,
    default_lambdas,
    dumbbell_suite,
    estimate_inform_frequency,
    layered_suite,
    run_batch,
)
from radiosim.model import ProbabilityTable, ProtocolKind, SimConfig
from radiosim.protocols.distributions import (
    alpha_distribution,
    exact_inform_probability,
    point_mass_distribution,
)

from .test_data.distribution_tables import TABLES

STAR_ROUNDS = 10**5


@pytest.mark.parametrize("dist", TABLES)
def test_star_frequency_matches_oracle(dist: ProbabilityTable) -> None:
    """Simulated star agrees with the exact inform probability within 4 sigma."""
    for m in range(1, 13):
        exact = exact_inform_probability(m, dist)
        frequency = estimate_inform_frequency(m, dist, STAR_ROUNDS, seed=m)
        sigma = math.sqrt(exact * (1 - exact) / STAR_ROUNDS)
        assert abs(frequency - exact) <= 4 * sigma + 1e-12


@pytest.mark.parametrize("k", [1, 2, 3])
def test_dumbbell_destination_rate(k: int) -> None:
    """One destination with two intermediates is informed at rate 2q(1-q)."""
    dist = point_mass_distribution(k, 16)
    report = dumbbell_suite(1, dist, trials=2000, seed=k)
    q = 2.0**-k
    assert report.exact_rate == pytest.approx(2 * q * (1 - q))
    assert report.destination_rate == pytest.approx(report.exact_rate, rel=0.1)
    assert report.bound == 0.0


def test_best_point_mass_spends_enough() -> None:
    """Best exponent on the dumbbell still needs n log2(n) / 2 transmissions."""
    frame, best = best_point_mass_sweep(16, range(1, 6), trials=500, seed=8)
    assert list(frame["k"]) == [1, 2, 3, 4, 5]
    assert best is not None
    row = frame.set_index("k").loc[best]
    assert row["success_rate"] >= 1 - 1 / 16
    assert row["bound"] == 32
    assert row["mean_intermediate_tx_successful"] >= row["bound"]
    eligible = frame[frame["success_rate"] >= 1 - 1 / 16]
    assert row["mean_intermediate_tx_successful"] == min(
        eligible["mean_intermediate_tx_successful"]
    )


def test_best_point_mass_uses_successful_trials(
    monkeypatch: pytest.MonkeyPatch,
) -> None:
    """Exponents are ranked by transmissions of their successful trials."""
    # k -> (success rate, mean over all trials, mean over successful trials)
    outcomes = {1: (1.0, 50.0, 50.0), 2: (0.95, 30.0, 60.0), 3: (0.5, 10.0, 12.0)}

    def fake_suite(n: int, dist: ProbabilityTable, *args: object) -> SimpleNamespace:
        success_rate, total, successful = outcomes[dist.masses.index(1.0)]
        return SimpleNamespace(
            success_rate=success_rate,
            mean_intermediate_tx=total,
            mean_intermediate_tx_successful=successful,
            bound=n * math.log2(n) / 2,
        )

    monkeypatch.setattr(experiments, "dumbbell_suite", fake_suite)
    frame, best = best_point_mass_sweep(4, [1, 2, 3], trials=1, seed=1)
    assert best == 1
    assert list(frame["mean_intermediate_tx"]) == [50.0, 30.0, 10.0]


def test_layered_suite_report() -> None:
    """Report lists every star with its exact rate."""
    dist = alpha_distribution(64, 25)
    report = layered_suite(64, 25, dist, trials=20, seed=3)
    assert report.summary.trials == 20
    assert list(report.stars["star"]) == [1, 2, 3, 4, 5, 6]
    assert list(report.stars["leaves"]) == [2, 4, 8, 16, 32, 64]
    assert list(report.stars["exact_rate"]) == [
        exact_inform_probability(2**i, dist) for i in range(1, 7)
    ]
    assert report.min_exact_rate == min(report.stars["exact_rate"])
    assert report.reference_rate == pytest.approx(1 / math.log(64))


def test_default_lambdas() -> None:
    """Sweep covers log2(n/D) up to log2(n)."""
    assert default_lambdas(1024, 64) == [4.0, 7.0, 10.0]


def test_run_batch_seeds_and_workers() -> None:
    """Trial i uses seed + i, and a process pool gives the same traces."""
    cfg = SimConfig(ProtocolKind.BROADCAST_RANDOM, seed=20, trials=4, n=64, p=0.5)
    serial = run_batch(cfg)
    parallel = run_batch(dataclasses.replace(cfg, workers=2))
    assert [trace.seed for trace in serial] == [20, 21, 22, 23]
    for first, second in zip(serial, parallel):
        assert first.seed == second.seed
        assert np.array_equal(first.t_u, second.t_u)
        assert np.array_equal(first.tx_count, second.tx_count)
