"""Protocols and the dispatch of a config to one of them."""

from __future__ import annotations

import logging
from pathlib import Path

from radiosim.channel import graph_seed
from radiosim.exceptions import ConfigError
from radiosim.model import (
    DirectedGraph,
    DistributionKind,
    ProbabilityTable,
    ProtocolKind,
    SimConfig,
    Trace,
)
from radiosim.netgraph import gen_gnp_directed, read_graph

from .distributions import (
    alpha_distribution,
    alpha_prime_distribution,
    point_mass_distribution,
)
from .general_broadcast import broadcast_general
from .gossip import gossip_random
from .random_broadcast import broadcast_random, derive_phase_params

LOGGER = logging.getLogger(__name__)


def load_graph(cfg: SimConfig) -> DirectedGraph:
    """Read graph file or generate G(n, p) from the run seed."""
    if cfg.graph_path is not None:
        return read_graph(Path(cfg.graph_path))
    if cfg.n is None or cfg.p is None:
        raise ConfigError("n and p are required to generate G(n, p)")
    return gen_gnp_directed(cfg.n, cfg.p, graph_seed(cfg.seed))


def edge_probability(cfg: SimConfig, graph: DirectedGraph) -> float:
    """Return configured p, or estimate it from the graph's density."""
    if cfg.p is not None:
        return cfg.p
    if graph.n < 2:
        raise ConfigError("graph must have at least 2 nodes")
    p = graph.edge_count / (graph.n * (graph.n - 1))
    LOGGER.info("Estimated p=%g from %d edges", p, graph.edge_count)
    return p


def build_distribution(cfg: SimConfig, graph: DirectedGraph) -> ProbabilityTable:
    """Build the probability table requested by cfg."""
    n = cfg.n if cfg.n is not None else graph.n
    if cfg.dist_kind is DistributionKind.POINT:
        if cfg.point_k is None:
            raise ConfigError("point distribution needs exponent k")
        return point_mass_distribution(cfg.point_k, n)
    if cfg.D is None:
        raise ConfigError("D is required for the distribution")
    if cfg.dist_kind is DistributionKind.ALPHA:
        return alpha_distribution(n, cfg.D, cfg.lambda_override, cfg.idle_residual)
    if cfg.dist_kind is DistributionKind.ALPHA_PRIME:
        return alpha_prime_distribution(
            n, cfg.D, cfg.lambda_override, cfg.idle_residual
        )
    raise ConfigError(f"distribution {cfg.dist_kind.value} can't be built from flags")


def run_trial(cfg: SimConfig, graph: DirectedGraph | None = None) -> Trace:
    """Run one trial of cfg.protocol with cfg.seed."""
    if graph is None:
        graph = load_graph(cfg)
    if cfg.protocol is ProtocolKind.BROADCAST_RANDOM:
        params = derive_phase_params(
            graph.n, edge_probability(cfg, graph), cfg.beta, cfg.delta_warning
        )
        return broadcast_random(graph, cfg.source, params, cfg)
    if cfg.protocol is ProtocolKind.GOSSIP_RANDOM:
        return gossip_random(graph, graph.n * edge_probability(cfg, graph), cfg)
    return broadcast_general(
        graph, cfg.source, build_distribution(cfg, graph), cfg.beta, cfg
    )


__all__ = [
    "broadcast_general",
    "broadcast_random",
    "build_distribution",
    "derive_phase_params",
    "gossip_random",
    "load_graph",
    "run_trial",
]
