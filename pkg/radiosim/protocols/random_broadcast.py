"""Energy-efficient broadcast on G(n, p) where every node transmits at most once.

Phase 1 floods for T rounds, Phase 2 thins the active set in a single round and
Phase 3 lets each remaining active node try once more with a small probability.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from radiosim.channel import ProtocolHooks, run
from radiosim.const import DEFAULT_BETA, DEFAULT_DELTA_WARNING
from radiosim.exceptions import InvalidParameterError, ProtocolInvariantError
from radiosim.model import (
    BoolArray,
    DirectedGraph,
    FloatArray,
    NodeStates,
    NodeStatus,
    PhaseParams,
    ProtocolKind,
    SimConfig,
    Trace,
)
from radiosim.util import clamp_probability

LOGGER = logging.getLogger(__name__)


def derive_phase_params(
    n: int,
    p: float,
    beta: float = DEFAULT_BETA,
    delta_warning: float = DEFAULT_DELTA_WARNING,
) -> PhaseParams:
    """Compute schedule and send probabilities for G(n, p)."""
    if n < 2:
        raise InvalidParameterError(f"n={n} must be at least 2")
    if not 0.0 < p <= 1.0:
        raise InvalidParameterError(f"p={p} must lie in (0, 1]")
    if beta <= 0:
        raise InvalidParameterError(f"beta={beta} must be positive")
    d = n * p
    if d <= 1.0:
        raise InvalidParameterError(
            f"expected degree d={d:g} must exceed 1, G(n, p) is disconnected w.h.p."
        )
    warnings: list[str] = []
    if p * n / math.log(n) < delta_warning:
        warnings.append(
            f"p*n/ln(n)={p * n / math.log(n):.3g} is below {delta_warning:g}, "
            "graph may be disconnected"
        )
    T = max(1, math.floor(math.log2(n) / math.log2(d) + 1e-12))
    phase2_enabled = p <= n ** (-2.0 / 5.0)
    p2_prob, clamped = clamp_probability(1.0 / (d**T * p))
    if clamped and phase2_enabled:
        warnings.append(f"Phase 2 probability 1/(d^T p) clamped to {p2_prob:g}")
    p3_raw = 1.0 / d if phase2_enabled else 1.0 / (d * p)
    p3_prob, clamped = clamp_probability(p3_raw)
    if clamped:
        warnings.append(f"Phase 3 probability {p3_raw:g} clamped to {p3_prob:g}")
    for warning in warnings:
        LOGGER.warning(warning)
    return PhaseParams(
        n=n,
        p=p,
        d=d,
        T=T,
        phase2_enabled=phase2_enabled,
        p2_prob=p2_prob,
        p3_prob=p3_prob,
        p3_rounds=math.ceil(beta * math.log2(n) - 1e-9),
        beta=beta,
        warnings=tuple(warnings),
    )


class RandomBroadcastHooks(ProtocolHooks):
    """Three-phase broadcast, a node retires after its only transmission."""

    kind = ProtocolKind.BROADCAST_RANDOM

    def __init__(self, graph: DirectedGraph, source: int, params: PhaseParams):
        """Bind params to the run."""
        super().__init__(graph, source)
        self.params = params
        self.warnings.extend(params.warnings)
        self._round_active = np.zeros(graph.n, dtype=np.bool_)

    def phase_of(self, round_index: int) -> int | None:
        """Phase the round belongs to, None once the schedule is over."""
        params = self.params
        if round_index <= params.T:
            return 1
        if params.phase2_enabled and round_index == params.T + 1:
            return 2
        if round_index <= params.schedule_length:
            return 3
        return None

    def round_cap(self, cfg: SimConfig) -> int:
        """Cap defaults to the schedule length."""
        return self.params.schedule_length if cfg.round_cap is None else cfg.round_cap

    def decide(
        self, states: NodeStates, round_index: int, draws: FloatArray
    ) -> BoolArray:
        """Phase 1 floods, Phases 2 and 3 transmit with their probability."""
        active = states.active_mask()
        self._round_active = active.copy()
        phase = self.phase_of(round_index)
        if phase == 1:
            return active
        if phase == 2:
            return active & (draws < self.params.p2_prob)
        if phase == 3:
            return active & (draws < self.params.p3_prob)
        return np.zeros(self.graph.n, dtype=np.bool_)

    def on_round_end(
        self, states: NodeStates, round_index: int, transmitted: BoolArray
    ) -> None:
        """Retire transmitters, in Phase 2 every node active at its start."""
        if self.phase_of(round_index) == 2:
            states.status[self._round_active] = NodeStatus.PASSIVE
        else:
            states.status[transmitted] = NodeStatus.PASSIVE

    def is_quiescent(self, states: NodeStates, round_index: int) -> bool:
        """No transmission is possible after the schedule."""
        return (
            round_index >= self.params.schedule_length
            or states.count(NodeStatus.ACTIVE) == 0
        )

    def check_invariants(self, states: NodeStates, round_index: int) -> None:
        """Every node transmits at most once."""
        if np.any(states.tx_count > 1):
            node = int(np.argmax(states.tx_count > 1))
            raise ProtocolInvariantError(
                self.kind.value, round_index, f"node {node} transmitted twice"
            )

    def trace_extras(self) -> dict[str, int | None]:
        """Phase boundaries used by trace verification."""
        params = self.params
        return {
            "phase1_rounds": params.T,
            "phase2_round": params.T + 1 if params.phase2_enabled else None,
        }


def broadcast_random(
    g: DirectedGraph, source: int, params: PhaseParams, cfg: SimConfig
) -> Trace:
    """Broadcast from source on a G(n, p) graph."""
    return run(g, RandomBroadcastHooks(g, source, params), cfg)
