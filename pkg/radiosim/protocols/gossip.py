"""Gossiping on G(n, p): every node transmits all it knows with probability 1/d."""

from __future__ import annotations

import logging
import math

import numpy as np

from radiosim.channel import ProtocolHooks, run
from radiosim.const import DEFAULT_GOSSIP_MULTIPLIER
from radiosim.exceptions import InvalidParameterError
from radiosim.model import (
    BoolArray,
    DirectedGraph,
    FloatArray,
    IntArray,
    NodeStates,
    NodeStatus,
    ProtocolKind,
    RoundOutcome,
    SimConfig,
    Trace,
)

LOGGER = logging.getLogger(__name__)


def gossip_round_cap(n: int, d: float, multiplier: float) -> int:
    """Rounds granted to gossiping: multiplier * d * log2(n)."""
    return max(1, math.ceil(multiplier * d * math.log2(n) - 1e-9)) if n > 1 else 1


class GossipHooks(ProtocolHooks):
    """Every node starts with its own message and never goes passive.

    known[u, v] is set once u holds the message originated at v. A node counts as
    uninformed in the trace while it misses any message.
    """

    kind = ProtocolKind.GOSSIP_RANDOM

    def __init__(self, graph: DirectedGraph, d: float):
        """Bind expected degree to the run."""
        super().__init__(graph, None)
        if d <= 1.0:
            raise InvalidParameterError(f"expected degree d={d:g} must exceed 1")
        self.d = d
        self._complete = np.zeros(graph.n, dtype=np.bool_)

    def initial_state(self) -> NodeStates:
        """Every node is active and knows only its own message."""
        states = NodeStates.uninformed(self.graph.n)
        states.status[:] = NodeStatus.ACTIVE
        states.t_u[:] = 0
        states.known = np.eye(self.graph.n, dtype=np.bool_)
        self._complete = states.known.all(axis=1)
        return states

    def round_cap(self, cfg: SimConfig) -> int:
        """Cap defaults to 128 * d * log2(n) rounds."""
        if cfg.round_cap is not None:
            return cfg.round_cap
        multiplier = cfg.cap_multiplier or DEFAULT_GOSSIP_MULTIPLIER
        return gossip_round_cap(self.graph.n, self.d, multiplier)

    def decide(
        self, states: NodeStates, round_index: int, draws: FloatArray
    ) -> BoolArray:
        """Transmit with probability 1/d."""
        return states.active_mask() & (draws < 1.0 / self.d)

    def on_receive(
        self, states: NodeStates, outcome: RoundOutcome, round_index: int
    ) -> IntArray:
        """Join the received message set, return nodes that just became complete."""
        assert states.known is not None
        receivers = outcome.received_nodes()
        if receivers.size:
            # Senders don't receive in the same round, their rows are unchanged
            states.known[receivers] |= states.known[outcome.senders[receivers]]
        complete = states.known.all(axis=1)
        fresh = np.flatnonzero(complete & ~self._complete)
        self._complete = complete
        return fresh

    def is_complete(self, states: NodeStates) -> bool:
        """Every ordered pair is delivered."""
        return bool(self._complete.all())

    def is_quiescent(self, states: NodeStates, round_index: int) -> bool:
        """Gossiping never runs out of transmitters."""
        return False

    def pending_pairs(self, states: NodeStates) -> int | None:
        """Ordered pairs (u, v) where u still misses the message of v."""
        assert states.known is not None
        return int(states.known.size - np.count_nonzero(states.known))

    def uninformed(self, states: NodeStates) -> int:
        """Nodes still missing some message."""
        return int(np.count_nonzero(~self._complete))


def gossip_random(g: DirectedGraph, d: float, cfg: SimConfig) -> Trace:
    """Gossip on a G(n, p) graph with expected degree d."""
    return run(g, GossipHooks(g, d), cfg)
