"""Synchronous round engine with radio collision semantics.

A node receives in a round iff exactly one of its in-neighbors transmits.
Nodes are half-duplex: a transmitting node hears nothing in that round.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
import logging
from typing import Iterable, Union

import numpy as np

from .exceptions import InvalidParameterError, ProtocolInvariantError
from .model import (
    BoolArray,
    DirectedGraph,
    FloatArray,
    IntArray,
    NodeStates,
    NodeStatus,
    ProtocolKind,
    Reception,
    RoundOutcome,
    RoundRecord,
    RunStatus,
    SimConfig,
    StopRule,
    Trace,
)
from .netgraph import neighbors_of

LOGGER = logging.getLogger(__name__)

TransmitSet = Union[BoolArray, Iterable[int]]


@dataclass
class RandomStreams:
    """Independent streams split from one master seed.

    decisions yields one uniform per node per round, node v always consumes
    element v, so nodes draw from private streams. sequence is the shared
    randomness of a run (the exponent sequence of the general broadcast).
    """

    decisions: np.random.Generator
    sequence: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> RandomStreams:
        """Split master seed into fixed indexed children."""
        decisions, sequence = np.random.SeedSequence(seed).spawn(2)
        return cls(np.random.default_rng(decisions), np.random.default_rng(sequence))


def graph_seed(seed: int) -> np.random.SeedSequence:
    """Seed of the random graph belonging to a run seed."""
    return np.random.SeedSequence(seed, spawn_key=(2,))


def _as_mask(graph: DirectedGraph, transmit_set: TransmitSet) -> BoolArray:
    if isinstance(transmit_set, np.ndarray) and transmit_set.dtype == np.bool_:
        if transmit_set.shape != (graph.n,):
            raise InvalidParameterError("transmit mask doesn't match node count")
        return transmit_set
    mask = np.zeros(graph.n, dtype=np.bool_)
    ids = np.fromiter(transmit_set, dtype=np.int64)
    if ids.size and (ids.min() < 0 or ids.max() >= graph.n):
        raise InvalidParameterError("transmit set contains unknown nodes")
    mask[ids] = True
    return mask


def step(graph: DirectedGraph, transmit_set: TransmitSet) -> RoundOutcome:
    """Resolve one round of transmissions."""
    mask = _as_mask(graph, transmit_set)
    transmitters = np.flatnonzero(mask)
    receivers, senders = neighbors_of(graph, transmitters)
    hits = np.bincount(receivers, minlength=graph.n)
    # Where exactly one in-neighbor transmits the sum of sender ids is the sender
    sender_sum = np.bincount(
        receivers, weights=senders.astype(np.float64), minlength=graph.n
    )
    reception = np.full(graph.n, Reception.SILENCE, dtype=np.int8)
    listening = ~mask
    received = listening & (hits == 1)
    reception[received] = Reception.RECEIVED
    reception[listening & (hits >= 2)] = Reception.COLLISION
    sender_ids = np.full(graph.n, -1, dtype=np.int64)
    sender_ids[received] = sender_sum[received].astype(np.int64)
    return RoundOutcome(reception, sender_ids, transmitters)


class ProtocolHooks(ABC):
    """Behaviour of an oblivious protocol, evaluated for all nodes at once.

    decide() must only use each node's own state, the round index, the shared
    sequence value and the node's element of the uniform draw vector.
    """

    kind: ProtocolKind

    def __init__(self, graph: DirectedGraph, source: int | None):
        """Bind hooks to a graph."""
        if source is not None and not 0 <= source < graph.n:
            raise InvalidParameterError(f"source {source} is not a node of the graph")
        self.graph = graph
        self.source = source
        self.warnings: list[str] = []

    def initial_state(self) -> NodeStates:
        """Return states before round 1: only the source is active."""
        states = NodeStates.uninformed(self.graph.n)
        if self.source is not None:
            states.status[self.source] = NodeStatus.ACTIVE
            states.t_u[self.source] = 0
        return states

    def prepare(self, streams: RandomStreams, round_cap: int) -> None:
        """Draw shared randomness before the first round."""

    @abstractmethod
    def round_cap(self, cfg: SimConfig) -> int:
        """Maximal number of rounds to simulate."""

    @abstractmethod
    def decide(
        self, states: NodeStates, round_index: int, draws: FloatArray
    ) -> BoolArray:
        """Return mask of nodes transmitting this round."""

    def on_receive(
        self, states: NodeStates, outcome: RoundOutcome, round_index: int
    ) -> IntArray:
        """Activate first-time receivers, return newly informed nodes."""
        return states.activate(outcome.received_nodes(), round_index)

    def on_round_end(
        self, states: NodeStates, round_index: int, transmitted: BoolArray
    ) -> None:
        """Update statuses after the round."""

    def is_complete(self, states: NodeStates) -> bool:
        """Check if every node holds the message."""
        return states.count(NodeStatus.UNINFORMED) == 0

    def is_quiescent(self, states: NodeStates, round_index: int) -> bool:
        """Check if no node can transmit after round_index."""
        return states.count(NodeStatus.ACTIVE) == 0

    def pending_pairs(self, states: NodeStates) -> int | None:
        """Undelivered ordered pairs, only for gossiping."""
        return None

    def uninformed(self, states: NodeStates) -> int:
        """N_t as recorded in the trace."""
        return states.count(NodeStatus.UNINFORMED)

    def active(self, states: NodeStates) -> int:
        """|U_t| as recorded in the trace."""
        return states.count(NodeStatus.ACTIVE)

    def check_invariants(self, states: NodeStates, round_index: int) -> None:
        """Raise ProtocolInvariantError if a hard invariant is broken."""

    def trace_extras(self) -> dict[str, int | None]:
        """Protocol specific trace fields."""
        return {}


def run(graph: DirectedGraph, hooks: ProtocolHooks, cfg: SimConfig) -> Trace:
    """Drive hooks on graph until completion, quiescence or the round cap."""
    round_cap = hooks.round_cap(cfg)
    if round_cap < 1:
        raise InvalidParameterError("round cap must be at least 1")
    streams = RandomStreams.from_seed(cfg.seed)
    hooks.prepare(streams, round_cap)
    states = hooks.initial_state()
    records: list[RoundRecord] = []
    completion_round = 0 if hooks.is_complete(states) else None
    stalled = False

    for round_index in range(1, round_cap + 1):
        if completion_round is not None and (
            cfg.stop_rule is StopRule.COMPLETION
            or hooks.is_quiescent(states, round_index - 1)
        ):
            break
        if completion_round is None and hooks.is_quiescent(states, round_index - 1):
            stalled = True
            break
        active = hooks.active(states)
        uninformed = hooks.uninformed(states)
        # Draw the full vector every round to keep node streams aligned
        draws = streams.decisions.random(graph.n)
        transmit = hooks.decide(states, round_index, draws)
        if np.any(transmit & ~states.active_mask()):
            raise ProtocolInvariantError(
                hooks.kind.value, round_index, "a node transmitted while not active"
            )
        outcome = step(graph, transmit)
        states.tx_count[transmit] += 1
        newly_informed = hooks.on_receive(states, outcome, round_index)
        hooks.on_round_end(states, round_index, transmit)
        hooks.check_invariants(states, round_index)
        records.append(
            RoundRecord(
                round=round_index,
                active=active,
                transmitters=int(outcome.transmitters.size),
                uninformed=uninformed,
                newly_informed=int(newly_informed.size),
                collisions=outcome.collision_count,
                pending_pairs=hooks.pending_pairs(states),
                transmit_ids=(
                    tuple(int(node) for node in outcome.transmitters)
                    if cfg.record_transmissions
                    else None
                ),
            )
        )
        if completion_round is None and hooks.is_complete(states):
            completion_round = round_index

    if completion_round is not None:
        status = RunStatus.COMPLETED
    elif stalled:
        status = RunStatus.STALLED
    else:
        status = RunStatus.CAP_EXHAUSTED
    if status is not RunStatus.COMPLETED:
        LOGGER.info(
            "%s seed %d ended %s after %d rounds",
            hooks.kind.value,
            cfg.seed,
            status.value,
            len(records),
        )
    extras = hooks.trace_extras()
    return Trace(
        protocol=hooks.kind,
        n=graph.n,
        seed=cfg.seed,
        source=hooks.source,
        records=records,
        tx_count=states.tx_count,
        t_u=states.t_u,
        status=status,
        completion_round=completion_round,
        warnings=list(hooks.warnings),
        phase1_rounds=extras.get("phase1_rounds"),
        phase2_round=extras.get("phase2_round"),
    )
