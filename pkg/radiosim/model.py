"""Model classes."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum, IntEnum
from typing import Iterator, Mapping, Tuple

import numpy as np
import numpy.typing as npt
import pandas as pd

from .const import (
    DEFAULT_BETA,
    DEFAULT_DELTA_WARNING,
    DEFAULT_SEED,
    DEFAULT_THRESHOLD,
    DEFAULT_TRIALS,
)
from .exceptions import ConfigError

IntArray = npt.NDArray[np.int64]
BoolArray = npt.NDArray[np.bool_]
FloatArray = npt.NDArray[np.float64]
StatusArray = npt.NDArray[np.int8]

# Node id -> construction role, e.g. "center_3" or "path_0"
RoleLabels = Mapping[int, str]
TransmitIds = Tuple[int, ...]


class Reception(IntEnum):
    """What a node observed in one round."""

    SILENCE = 0
    RECEIVED = 1
    COLLISION = 2


class NodeStatus(IntEnum):
    """Protocol status of a node."""

    UNINFORMED = 0
    ACTIVE = 1
    PASSIVE = 2


class ProtocolKind(Enum):
    """Protocol selection."""

    BROADCAST_RANDOM = "broadcast-random"
    GOSSIP_RANDOM = "gossip-random"
    BROADCAST_GENERAL = "broadcast-general"


class RunStatus(Enum):
    """How a run ended."""

    COMPLETED = "completed"
    CAP_EXHAUSTED = "cap-exhausted"
    # Nothing can change any more but some nodes are still uninformed
    STALLED = "stalled"


class StopRule(Enum):
    """When the engine stops simulating."""

    COMPLETION = "completion"
    QUIESCENCE = "quiescence"


class DistributionKind(Enum):
    """Origin of a probability table."""

    ALPHA = "alpha"
    ALPHA_PRIME = "alpha-prime"
    POINT = "point"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """Radio network in CSR form.

    Edge u->v means v can hear the transmissions of u. Out-neighbors of u are
    indices[indptr[u]:indptr[u + 1]], sorted and without duplicates.
    """

    n: int
    indptr: IntArray
    indices: IntArray
    labels: RoleLabels = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Freeze adjacency arrays."""
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    @property
    def edge_count(self) -> int:
        """Number of directed edges."""
        return int(self.indices.shape[0])

    def out_neighbors(self, node: int) -> IntArray:
        """Receivers of node's transmissions."""
        return self.indices[self.indptr[node] : self.indptr[node + 1]]

    def in_degrees(self) -> IntArray:
        """In-degree of every node."""
        return np.bincount(self.indices, minlength=self.n).astype(np.int64)

    def edges(self) -> Iterator[tuple[int, int]]:
        """Iterate over edges in (transmitter, receiver) order."""
        for node in range(self.n):
            for receiver in self.out_neighbors(node):
                yield node, int(receiver)

    def nodes_with_role(self, prefix: str) -> list[int]:
        """Return nodes whose label starts with prefix, in id order."""
        return sorted(
            node for node, role in self.labels.items() if role.startswith(prefix)
        )


@dataclass(frozen=True)
class GraphSummary:
    """Basic graph figures."""

    n: int
    edge_count: int
    average_degree: float
    source: int
    source_eccentricity: int | None
    diameter_estimate: int | None

    def __str__(self) -> str:
        """Return string representation."""

        def rounds(value: int | None) -> str:
            return "unreachable" if value is None else str(value)

        return (
            f"Nodes: {self.n}\n"
            f"Edges: {self.edge_count}\n"
            f"Average out-degree: {self.average_degree:.4f}\n"
            f"Eccentricity of node {self.source}: "
            f"{rounds(self.source_eccentricity)}\n"
            f"Diameter estimate: {rounds(self.diameter_estimate)}\n"
        )


@dataclass(frozen=True, eq=False)
class RoundOutcome:
    """Result of one channel round.

    The message a node received is referenced by its sender id.
    """

    reception: StatusArray
    senders: IntArray
    transmitters: IntArray

    def received_nodes(self) -> IntArray:
        """Nodes that received a message this round."""
        return np.flatnonzero(self.reception == Reception.RECEIVED)

    @property
    def collision_count(self) -> int:
        """Number of nodes that heard a collision."""
        return int(np.count_nonzero(self.reception == Reception.COLLISION))

    def status_of(self, node: int) -> Reception:
        """Reception result of a single node."""
        return Reception(int(self.reception[node]))

    def sender_of(self, node: int) -> int | None:
        """Sender of the message node received, if any."""
        sender = int(self.senders[node])
        return sender if sender >= 0 else None


@dataclass(eq=False)
class NodeStates:
    """Per-node protocol state of a run.

    t_u is -1 while a node is uninformed. known[u, v] tells whether u holds the
    message originated at v, only used by gossiping.
    """

    status: StatusArray
    t_u: IntArray
    tx_count: IntArray
    known: BoolArray | None = None

    @classmethod
    def uninformed(cls, n: int) -> NodeStates:
        """Create states where every node is uninformed."""
        return cls(
            status=np.full(n, NodeStatus.UNINFORMED, dtype=np.int8),
            t_u=np.full(n, -1, dtype=np.int64),
            tx_count=np.zeros(n, dtype=np.int64),
        )

    def activate(self, nodes: IntArray, round_index: int) -> IntArray:
        """Activate those of nodes which are uninformed, return them."""
        fresh = nodes[self.status[nodes] == NodeStatus.UNINFORMED]
        self.status[fresh] = NodeStatus.ACTIVE
        self.t_u[fresh] = round_index
        return fresh

    def active_mask(self) -> BoolArray:
        """Mask of active nodes."""
        return self.status == NodeStatus.ACTIVE

    def count(self, status: NodeStatus) -> int:
        """Number of nodes in given status."""
        return int(np.count_nonzero(self.status == status))


@dataclass(frozen=True)
class RoundRecord:
    """Figures of a single round, counted at the start of the round."""

    round: int
    active: int
    transmitters: int
    uninformed: int
    newly_informed: int
    collisions: int
    pending_pairs: int | None = None
    transmit_ids: TransmitIds | None = None


@dataclass(eq=False)
class Trace:
    """Everything recorded about one run."""

    protocol: ProtocolKind
    n: int
    seed: int
    source: int | None
    records: list[RoundRecord]
    tx_count: IntArray
    t_u: IntArray
    status: RunStatus
    completion_round: int | None
    warnings: list[str] = field(default_factory=list)
    # broadcast-random schedule, None for the other protocols
    phase1_rounds: int | None = None
    phase2_round: int | None = None

    @property
    def completed(self) -> bool:
        """Check if run informed every node."""
        return self.status is RunStatus.COMPLETED

    @property
    def rounds_run(self) -> int:
        """Number of simulated rounds."""
        return len(self.records)

    def total_transmissions(self) -> int:
        """Transmissions performed by all nodes."""
        return int(self.tx_count.sum())

    def max_tx(self) -> int:
        """Largest per-node transmission count."""
        return int(self.tx_count.max()) if self.n else 0

    def mean_tx(self) -> float:
        """Mean per-node transmission count."""
        return float(self.tx_count.mean()) if self.n else 0.0

    def active_counts(self) -> list[int]:
        """|U_t| for every recorded round."""
        return [record.active for record in self.records]


@dataclass(frozen=True)
class TraceViolation:
    """Broken trace identity."""

    identity: int
    round_index: int | None
    message: str

    def __str__(self) -> str:
        """Return string representation."""
        where = "" if self.round_index is None else f" at round {self.round_index}"
        return f"identity ({self.identity}){where}: {self.message}"


@dataclass(frozen=True)
class ProbabilityTable:
    """Distribution of send-probability exponents k in {0..K}.

    An active node uses send probability 2^-k when the round's exponent is k.
    With idle_residual the k = 0 entry is a residual outcome on which nobody
    transmits.
    """

    kind: DistributionKind
    masses: Tuple[float, ...]
    n: int
    D: int | None = None
    lam: float | None = None
    idle_residual: bool = False

    @property
    def max_exponent(self) -> int:
        """Largest exponent of the table."""
        return len(self.masses) - 1

    def send_probabilities(self) -> FloatArray:
        """Send probability for every exponent."""
        probabilities = np.exp2(-np.arange(len(self.masses), dtype=np.float64))
        if self.idle_residual:
            probabilities[0] = 0.0
        return probabilities

    def mean_send_probability(self) -> float:
        """Expected per-round send probability of an active node."""
        return float(np.dot(np.asarray(self.masses), self.send_probabilities()))

    def __str__(self) -> str:
        """Return string representation."""
        lam = "-" if self.lam is None else f"{self.lam:g}"
        out = f"{self.kind.value} distribution, n={self.n}, D={self.D}, lambda={lam}\n"
        for k, mass in enumerate(self.masses):
            out += f"  k={k}: {mass:.12g}\n"
        return out


@dataclass(frozen=True)
class PhaseParams:
    """Parameters of the energy-efficient broadcast on G(n, p)."""

    n: int
    p: float
    d: float
    T: int
    phase2_enabled: bool
    p2_prob: float
    p3_prob: float
    p3_rounds: int
    beta: float
    warnings: Tuple[str, ...] = ()

    @property
    def schedule_length(self) -> int:
        """Rounds of all three phases."""
        return self.T + (1 if self.phase2_enabled else 0) + self.p3_rounds


@dataclass
class SimConfig:
    """Settings of a batch of runs."""

    protocol: ProtocolKind
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_TRIALS
    n: int | None = None
    p: float | None = None
    D: int | None = None
    graph_path: str | None = None
    source: int = 0
    beta: float = DEFAULT_BETA
    delta_warning: float = DEFAULT_DELTA_WARNING
    lambda_override: float | None = None
    round_cap: int | None = None
    cap_multiplier: float | None = None
    dist_kind: DistributionKind = DistributionKind.ALPHA
    point_k: int | None = None
    idle_residual: bool = False
    stop_rule: StopRule = StopRule.COMPLETION
    record_transmissions: bool = True
    threshold: float = DEFAULT_THRESHOLD
    out_path: str | None = None
    summary_path: str | None = None
    reproducible: bool = False
    workers: int = 1

    def validate(self) -> None:
        """Check config invariants."""
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.round_cap is not None and self.round_cap < 1:
            raise ConfigError("round cap must be at least 1")
        if self.beta <= 0:
            raise ConfigError("beta must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError("threshold must lie in [0, 1]")
        if self.p is not None and not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"p={self.p} is not a probability")
        has_p = self.p is not None
        has_graph = self.graph_path is not None
        if self.protocol is not ProtocolKind.BROADCAST_GENERAL and has_p == has_graph:
            raise ConfigError("exactly one of p and a graph file must be given")
        if self.protocol is ProtocolKind.BROADCAST_GENERAL:
            if not (has_p or has_graph):
                raise ConfigError("either p or a graph file must be given")
            if self.dist_kind is DistributionKind.POINT:
                if self.point_k is None or self.point_k < 0:
                    raise ConfigError("point distribution needs exponent k >= 0")
            elif self.D is None:
                raise ConfigError("D is required for the distribution")
        if has_p and self.n is None:
            raise ConfigError("n is required to generate G(n, p)")

    def with_seed(self, seed: int) -> SimConfig:
        """Return copy using given seed."""
        return replace(self, seed=seed)


@dataclass(frozen=True)
class TrialSummary:
    """Statistics over a batch of traces."""

    trials: int
    completed: int
    completion_rate: float
    rounds_mean: float | None
    rounds_median: float | None
    rounds_p95: float | None
    rounds_max: float | None
    tx_mean: float
    tx_max: int
    total_tx_mean: float
    total_tx_p95: float
    total_tx_max: int

    def __str__(self) -> str:
        """Return string representation."""

        def show(value: float | None) -> str:
            return "-" if value is None else f"{value:g}"

        return (
            f"Trials: {self.trials}, completed: {self.completed} "
            f"({self.completion_rate:.2%})\n"
            f"Completion round: mean {show(self.rounds_mean)}, "
            f"median {show(self.rounds_median)}, p95 {show(self.rounds_p95)}, "
            f"max {show(self.rounds_max)}\n"
            f"Transmissions per node: mean {self.tx_mean:.4f}, max {self.tx_max}\n"
            f"Total transmissions: mean {self.total_tx_mean:g}, "
            f"p95 {self.total_tx_p95:g}, max {self.total_tx_max}\n"
        )


@dataclass
class PhaseRatioReport:
    """Growth of the active set during Phase 1."""

    d: float
    T: int
    per_trial: list[list[float]] = field(default_factory=list)
    final_ratios: list[float] = field(default_factory=list)
    skipped: int = 0

    @property
    def round_ratios(self) -> list[float]:
        """All per-round ratios pooled over trials."""
        return [ratio for ratios in self.per_trial for ratio in ratios]


@dataclass
class LayeredReport:
    """Broadcast on the layered lower-bound network, star by star.

    stars has one row per star S_i: leaves, informed, mean_wait,
    empirical_rate and exact_rate.
    """

    n: int
    D: int
    distribution: str
    summary: TrialSummary
    stars: pd.DataFrame
    min_empirical_rate: float | None
    min_exact_rate: float
    reference_rate: float


@dataclass
class DumbbellReport:
    """Transmissions the dumbbell's intermediate nodes spend."""

    n: int
    distribution: str
    summary: TrialSummary
    success_rate: float
    mean_intermediate_tx: float
    # None when no trial informed every destination
    mean_intermediate_tx_successful: float | None
    bound: float
    destination_rate: float | None
    exact_rate: float
