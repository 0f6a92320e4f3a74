"""Monte Carlo batches and the experiments built on them."""

from __future__ import annotations

import logging
import math
import multiprocessing
from pathlib import Path
from typing import Any, Callable, Sequence, TypeVar

import numpy as np
import pandas as pd

from .channel import step
from .const import DEFAULT_BETA
from .model import (
    DirectedGraph,
    DumbbellReport,
    LayeredReport,
    ProbabilityTable,
    ProtocolKind,
    Reception,
    SimConfig,
    StopRule,
    Trace,
)
from .metrics import summarize
from .netgraph import gen_lowerbound_network, gen_star_dumbbell, read_graph
from .protocols import run_trial
from .protocols.distributions import (
    alpha_distribution,
    alpha_prime_distribution,
    exact_inform_probability,
    point_mass_distribution,
    sample_sequence,
)
from .protocols.general_broadcast import broadcast_general

LOGGER = logging.getLogger(__name__)

# Star rounds resolved by one channel step
STAR_BATCH = 10_000

JobT = TypeVar("JobT")


def _map_trials(
    worker: Callable[[JobT], Trace], jobs: Sequence[JobT], workers: int
) -> list[Trace]:
    """Run jobs in order, on a process pool when workers > 1."""
    if workers > 1 and len(jobs) > 1:
        with multiprocessing.Pool(min(workers, len(jobs))) as pool:
            return pool.map(worker, jobs)
    traces = []
    for index, job in enumerate(jobs):
        traces.append(worker(job))
        LOGGER.debug("Finished trial %d/%d", index + 1, len(jobs))
    return traces


def _run_configured(job: tuple[SimConfig, DirectedGraph | None]) -> Trace:
    cfg, graph = job
    return run_trial(cfg, graph)


def _run_general(job: tuple[SimConfig, DirectedGraph, ProbabilityTable]) -> Trace:
    cfg, graph, dist = job
    return broadcast_general(graph, cfg.source, dist, cfg.beta, cfg)


def run_batch(cfg: SimConfig, graph: DirectedGraph | None = None) -> list[Trace]:
    """Run cfg.trials trials with seeds seed, seed + 1, ...

    G(n, p) is generated anew for every trial from the trial's seed unless a graph
    is given. Traces are ordered by trial index.
    """
    if graph is None:
        cfg.validate()
        if cfg.graph_path is not None:
            graph = read_graph(Path(cfg.graph_path))
    jobs = [(cfg.with_seed(cfg.seed + i), graph) for i in range(cfg.trials)]
    return _map_trials(_run_configured, jobs, cfg.workers)


def run_general_batch(
    graph: DirectedGraph, dist: ProbabilityTable, cfg: SimConfig
) -> list[Trace]:
    """Run broadcast with given distribution cfg.trials times on one graph."""
    jobs = [(cfg.with_seed(cfg.seed + i), graph, dist) for i in range(cfg.trials)]
    return _map_trials(_run_general, jobs, cfg.workers)


def _star_copies(m: int, copies: int) -> DirectedGraph:
    """Disjoint copies of an m-leaf in-star, copy c's center is c * (m + 1) + m."""
    n = copies * (m + 1)
    degrees = np.tile(np.append(np.ones(m, dtype=np.int64), 0), copies)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degrees, out=indptr[1:])
    centers = np.arange(copies, dtype=np.int64) * (m + 1) + m
    return DirectedGraph(n, indptr, np.repeat(centers, m), {})


def estimate_inform_frequency(
    m: int, dist: ProbabilityTable, rounds: int, seed: int
) -> float:
    """Fraction of rounds in which the center of an m-leaf star gets informed.

    All leaves are active. Rounds are resolved side by side on disjoint copies of
    the star, each copy with its own exponent.
    """
    rng = np.random.default_rng(seed)
    copies = min(rounds, STAR_BATCH)
    graph = _star_copies(m, copies)
    leaves = np.ones(graph.n, dtype=np.bool_)
    leaves[m :: m + 1] = False
    centers = np.arange(m, graph.n, m + 1)
    send_probabilities = dist.send_probabilities()
    informed = 0
    done = 0
    while done < rounds:
        size = min(copies, rounds - done)
        exponents = sample_sequence(dist, copies, rng)
        send = np.repeat(send_probabilities[exponents], m + 1)
        transmit = leaves & (rng.random(graph.n) < send)
        transmit[size * (m + 1) :] = False
        outcome = step(graph, transmit)
        informed += int(
            np.count_nonzero(outcome.reception[centers[:size]] == Reception.RECEIVED)
        )
        done += size
    return informed / rounds


def _general_config(
    seed: int,
    trials: int,
    n: int,
    D: int,
    beta: float,
    stop_rule: StopRule,
    workers: int,
) -> SimConfig:
    return SimConfig(
        protocol=ProtocolKind.BROADCAST_GENERAL,
        seed=seed,
        trials=trials,
        n=n,
        D=D,
        beta=beta,
        stop_rule=stop_rule,
        record_transmissions=False,
        workers=workers,
    )


def _waiting_rate(
    traces: Sequence[Trace], exposed: Sequence[int], target: int
) -> tuple[int, int]:
    """Return (successes, rounds waited) for target once exposed nodes are informed.

    Rounds after the start of a run's last exposure count even when target stays
    uninformed, so the ratio estimates the per-round success probability.
    """
    successes = 0
    waited = 0
    for trace in traces:
        start = int(trace.t_u[exposed].max())
        if start < 0 or int(trace.t_u[exposed].min()) < 0:
            continue
        finish = int(trace.t_u[target])
        if finish >= 0:
            successes += 1
            waited += finish - start
        else:
            waited += trace.rounds_run - start
    return successes, waited


def layered_suite(
    n: int,
    D: int,
    dist: ProbabilityTable,
    trials: int,
    seed: int,
    beta: float = DEFAULT_BETA,
    stop_rule: StopRule = StopRule.COMPLETION,
    workers: int = 1,
) -> LayeredReport:
    """Broadcast from c_1 on the layered network and measure every star."""
    graph = gen_lowerbound_network(n, D)
    cfg = _general_config(seed, trials, n, D, beta, stop_rule, workers)
    traces = run_general_batch(graph, dist, cfg)
    roles = _roles(graph)
    log_n = n.bit_length() - 1
    rows = []
    for i in range(1, log_n + 1):
        target_role = f"center_{i + 1}" if i < log_n else "path_0"
        successes, waited = _waiting_rate(
            traces, roles[f"leaf_{i}"], roles[target_role][0]
        )
        rows.append(
            {
                "star": i,
                "leaves": 2**i,
                "informed": successes,
                "mean_wait": waited / successes if successes else math.nan,
                "empirical_rate": successes / waited if waited else math.nan,
                "exact_rate": exact_inform_probability(2**i, dist),
            }
        )
    stars = pd.DataFrame(rows)
    empirical = stars["empirical_rate"].dropna()
    return LayeredReport(
        n=n,
        D=D,
        distribution=dist.kind.value,
        summary=summarize(traces),
        stars=stars,
        min_empirical_rate=float(empirical.min()) if len(empirical) else None,
        min_exact_rate=float(stars["exact_rate"].min()),
        reference_rate=1.0 / math.log(n),
    )


def dumbbell_suite(
    n: int,
    dist: ProbabilityTable,
    trials: int,
    seed: int,
    beta: float = DEFAULT_BETA,
    workers: int = 1,
) -> DumbbellReport:
    """Count intermediate transmissions until every destination is informed."""
    graph = gen_star_dumbbell(n)
    cfg = _general_config(seed, trials, n, 3, beta, StopRule.COMPLETION, workers)
    traces = run_general_batch(graph, dist, cfg)
    intermediates = graph.nodes_with_role("intermediate_")
    totals = np.asarray(
        [trace.tx_count[intermediates].sum() for trace in traces], dtype=np.float64
    )
    completed = np.asarray([trace.completed for trace in traces], dtype=np.bool_)
    successes = 0
    waited = 0
    for i, destination in enumerate(graph.nodes_with_role("destination_"), start=1):
        pair = [2 * i - 1, 2 * i]
        informed, rounds = _waiting_rate(traces, pair, destination)
        successes += informed
        waited += rounds
    return DumbbellReport(
        n=n,
        distribution=dist.kind.value,
        summary=summarize(traces),
        success_rate=float(completed.mean()),
        mean_intermediate_tx=float(totals.mean()),
        mean_intermediate_tx_successful=(
            float(totals[completed].mean()) if completed.any() else None
        ),
        bound=n * math.log2(n) / 2 if n > 1 else 0.0,
        destination_rate=successes / waited if waited else None,
        exact_rate=exact_inform_probability(2, dist),
    )


def best_point_mass_sweep(
    n: int,
    ks: Sequence[int],
    trials: int,
    seed: int,
    beta: float = DEFAULT_BETA,
    workers: int = 1,
) -> tuple[pd.DataFrame, int | None]:
    """Run the dumbbell with every point mass in ks.

    Among exponents informing all destinations in at least 1 - 1/n of the trials,
    the best one spends fewest intermediate transmissions in its successful trials.
    """
    rows = []
    for k in ks:
        report = dumbbell_suite(
            n, point_mass_distribution(k, n), trials, seed, beta, workers
        )
        rows.append(
            {
                "k": k,
                "success_rate": report.success_rate,
                "mean_intermediate_tx": report.mean_intermediate_tx,
                "mean_intermediate_tx_successful": (
                    report.mean_intermediate_tx_successful
                ),
                "bound": report.bound,
            }
        )
    frame = pd.DataFrame(rows)
    eligible = frame[
        (frame["success_rate"] >= 1 - 1 / n)
        & frame["mean_intermediate_tx_successful"].notna()
    ]
    if eligible.empty:
        LOGGER.warning("No exponent informed all destinations often enough")
        return frame, None
    best = eligible.loc[eligible["mean_intermediate_tx_successful"].idxmin()]
    return frame, int(best["k"])


def _distribution_row(
    dist: ProbabilityTable, traces: Sequence[Trace]
) -> dict[str, Any]:
    summary = summarize(traces)
    return {
        "distribution": dist.kind.value,
        "lambda": dist.lam,
        "completion_rate": summary.completion_rate,
        "rounds_mean": summary.rounds_mean,
        "tx_mean": summary.tx_mean,
        "total_tx_mean": summary.total_tx_mean,
        "mean_send_probability": dist.mean_send_probability(),
    }


def compare_distributions(
    n: int,
    D: int,
    trials: int,
    seed: int,
    beta: float = DEFAULT_BETA,
    idle_residual: bool = True,
    stop_rule: StopRule = StopRule.QUIESCENCE,
    workers: int = 1,
) -> pd.DataFrame:
    """Run alpha and alpha' on the layered network with equal beta and caps."""
    graph = gen_lowerbound_network(n, D)
    cfg = _general_config(seed, trials, n, D, beta, stop_rule, workers)
    rows = []
    for dist in (
        alpha_distribution(n, D, idle_residual=idle_residual),
        alpha_prime_distribution(n, D, idle_residual=idle_residual),
    ):
        rows.append(_distribution_row(dist, run_general_batch(graph, dist, cfg)))
    return pd.DataFrame(rows)


def default_lambdas(n: int, D: int) -> list[float]:
    """log2(n/D), their midpoint with log2(n), and log2(n)."""
    low, high = math.log2(n / D), math.log2(n)
    return [low, (low + high) / 2, high]


def lambda_sweep(
    n: int,
    D: int,
    trials: int,
    seed: int,
    lambdas: Sequence[float] | None = None,
    beta: float = DEFAULT_BETA,
    idle_residual: bool = True,
    stop_rule: StopRule = StopRule.QUIESCENCE,
    workers: int = 1,
) -> pd.DataFrame:
    """Run alpha with every lambda on the layered network."""
    graph = gen_lowerbound_network(n, D)
    cfg = _general_config(seed, trials, n, D, beta, stop_rule, workers)
    rows = []
    for lam in lambdas or default_lambdas(n, D):
        dist = alpha_distribution(n, D, lam, idle_residual)
        rows.append(_distribution_row(dist, run_general_batch(graph, dist, cfg)))
    return pd.DataFrame(rows)


def _roles(graph: DirectedGraph) -> dict[str, list[int]]:
    roles: dict[str, list[int]] = {}
    for node in sorted(graph.labels):
        roles.setdefault(graph.labels[node], []).append(node)
    return roles
