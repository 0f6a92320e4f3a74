"""Broadcast on general graphs driven by a shared exponent sequence.

All nodes share one sequence I_1, I_2, ... sampled once per run. An active node
u transmits in round r with probability 2^-I_r while r <= t_u + beta * log2(n)^2
and goes passive afterwards.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from radiosim.channel import ProtocolHooks, RandomStreams, run
from radiosim.const import DEFAULT_BETA, DEFAULT_GENERAL_CAP_MULTIPLIER
from radiosim.exceptions import InvalidParameterError
from radiosim.model import (
    BoolArray,
    DirectedGraph,
    FloatArray,
    IntArray,
    NodeStates,
    NodeStatus,
    ProbabilityTable,
    ProtocolKind,
    SimConfig,
    StopRule,
    Trace,
)
from radiosim.protocols.distributions import sample_sequence

LOGGER = logging.getLogger(__name__)


def activity_window(n: int, beta: float) -> int:
    """Rounds a node stays active after being informed."""
    return max(1, math.ceil(beta * math.log2(n) ** 2 - 1e-9)) if n > 1 else 1


def general_round_cap(
    dist: ProbabilityTable, D: int, multiplier: float = DEFAULT_GENERAL_CAP_MULTIPLIER
) -> int:
    """Default cap multiplier * (D * lambda + log2(n)^2)."""
    log_n = math.log2(dist.n) if dist.n > 1 else 0.0
    lam = dist.lam if dist.lam is not None else max(1.0, math.log2(max(dist.n / D, 1)))
    return max(1, math.ceil(multiplier * (D * lam + log_n**2)))


class GeneralBroadcastHooks(ProtocolHooks):
    """Oblivious broadcast with a shared exponent per round."""

    kind = ProtocolKind.BROADCAST_GENERAL

    def __init__(
        self,
        graph: DirectedGraph,
        source: int,
        dist: ProbabilityTable,
        beta: float = DEFAULT_BETA,
    ):
        """Bind distribution to the run."""
        super().__init__(graph, source)
        if beta <= 0:
            raise InvalidParameterError(f"beta={beta} must be positive")
        self.dist = dist
        self.window = activity_window(dist.n, beta)
        self._send_probabilities = dist.send_probabilities()
        self.sequence: IntArray = np.zeros(0, dtype=np.int64)

    def round_cap(self, cfg: SimConfig) -> int:
        """Cap defaults to 4 * (D * lambda + log2(n)^2).

        Running to quiescence adds one activity window, so that the last informed
        node can use all of it.
        """
        if cfg.round_cap is not None:
            return cfg.round_cap
        D = self.dist.D if self.dist.D is not None else cfg.D
        cap = general_round_cap(
            self.dist,
            D if D is not None else self.graph.n,
            cfg.cap_multiplier or DEFAULT_GENERAL_CAP_MULTIPLIER,
        )
        if cfg.stop_rule is StopRule.QUIESCENCE:
            cap += self.window
        return cap

    def prepare(self, streams: RandomStreams, round_cap: int) -> None:
        """Sample the shared exponent sequence."""
        self.sequence = sample_sequence(self.dist, round_cap, streams.sequence)

    def decide(
        self, states: NodeStates, round_index: int, draws: FloatArray
    ) -> BoolArray:
        """Active nodes transmit with probability 2^-I_r."""
        send_probability = self._send_probabilities[self.sequence[round_index - 1]]
        return states.active_mask() & (draws < send_probability)

    def on_round_end(
        self, states: NodeStates, round_index: int, transmitted: BoolArray
    ) -> None:
        """Retire nodes whose activity window is over."""
        expired = states.active_mask() & (states.t_u + self.window <= round_index)
        states.status[expired] = NodeStatus.PASSIVE


def broadcast_general(
    g: DirectedGraph,
    source: int,
    dist: ProbabilityTable,
    beta: float,
    cfg: SimConfig,
) -> Trace:
    """Broadcast from source using exponents drawn from dist."""
    return run(g, GeneralBroadcastHooks(g, source, dist, beta), cfg)
