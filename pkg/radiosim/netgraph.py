"""Graph construction, queries and graph files.

Edges always point from transmitter to receiver: u->v means v hears u.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, Union

import networkx as nx
import numpy as np

from .const import DIAMETER_SAMPLE_SOURCES, GRAPH_FORMAT_MAGIC, GRAPH_FORMAT_VERSION
from .exceptions import (
    GraphConstructionError,
    InvalidParameterError,
    ParsingError,
    UnexpectedLineError,
    VersionMismatchError,
)
from .model import DirectedGraph, GraphSummary, IntArray, RoleLabels
from .util import is_power_of_two

LOGGER = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence]


def build_graph(
    n: int,
    edges: Iterable[tuple[int, int]],
    labels: RoleLabels | None = None,
    kind: str = "custom",
) -> DirectedGraph:
    """Create graph from an edge list, rejecting self-loops and duplicates."""
    edge_list = list(edges)
    if not edge_list:
        return DirectedGraph(
            n,
            np.zeros(n + 1, dtype=np.int64),
            np.zeros(0, dtype=np.int64),
            dict(labels or {}),
        )
    pairs = np.asarray(edge_list, dtype=np.int64)
    sources, targets = pairs[:, 0], pairs[:, 1]
    if pairs.min() < 0 or pairs.max() >= n:
        raise GraphConstructionError(kind, f"edge endpoint outside 0..{n - 1}")
    if np.any(sources == targets):
        raise GraphConstructionError(kind, "self-loops are not allowed")
    order = np.lexsort((targets, sources))
    sources, targets = sources[order], targets[order]
    if np.any((sources[1:] == sources[:-1]) & (targets[1:] == targets[:-1])):
        raise GraphConstructionError(kind, "duplicate edges are not allowed")
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(sources, minlength=n), out=indptr[1:])
    return DirectedGraph(n, indptr, targets, dict(labels or {}))


def gen_gnp_directed(n: int, p: float, seed: SeedLike) -> DirectedGraph:
    """Generate directed G(n, p): every ordered pair gets an edge w.p. p."""
    if n < 1:
        raise GraphConstructionError("G(n,p)", "n must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise GraphConstructionError("G(n,p)", f"p={p} is not a probability")
    rng = np.random.default_rng(seed)
    # Out-degree is Binomial(n - 1, p), receivers are a uniform subset of the
    # other nodes. Draws are O(n + m) instead of O(n^2).
    degrees = rng.binomial(n - 1, p, size=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degrees, out=indptr[1:])
    indices = np.empty(int(indptr[-1]), dtype=np.int64)
    for node in range(n):
        picked = rng.choice(n - 1, size=int(degrees[node]), replace=False)
        # Skip the node itself
        picked = picked + (picked >= node)
        picked.sort()
        indices[indptr[node] : indptr[node + 1]] = picked
    return DirectedGraph(n, indptr, indices, {})


def gen_lowerbound_network(n: int, D: int) -> DirectedGraph:
    """Build the layered network of stars followed by a path.

    Star S_i has center c_i and 2^i leaves, 1 <= i <= log2(n). The center sends to
    its leaves, every leaf of S_i sends to c_{i+1}. The leaves of the last star send
    to v_0 = c_{log n + 1}, the head of the path v_0..v_L with L = D - 2 log2(n).
    c_1 is node 0.
    """
    if n < 2 or not is_power_of_two(n):
        raise GraphConstructionError("lower-bound", f"n={n} is not a power of two")
    log_n = n.bit_length() - 1
    if D <= 4 * log_n:
        raise GraphConstructionError(
            "lower-bound", f"D={D} must exceed 4*log2(n)={4 * log_n}"
        )
    path_length = D - 2 * log_n
    labels: dict[int, str] = {}
    edges: list[tuple[int, int]] = []
    next_id = 0
    previous_leaves: list[int] = []
    for i in range(1, log_n + 1):
        center = next_id
        labels[center] = f"center_{i}"
        leaves = list(range(center + 1, center + 1 + 2**i))
        for leaf in leaves:
            labels[leaf] = f"leaf_{i}"
            edges.append((center, leaf))
        edges.extend((leaf, center) for leaf in previous_leaves)
        previous_leaves = leaves
        next_id = center + 1 + 2**i
    path = list(range(next_id, next_id + path_length + 1))
    for j, node in enumerate(path):
        labels[node] = f"path_{j}"
    edges.extend((leaf, path[0]) for leaf in previous_leaves)
    edges.extend(zip(path, path[1:]))
    total = next_id + len(path)
    LOGGER.debug("Lower-bound network n=%d D=%d has %d nodes", n, D, total)
    return build_graph(total, edges, labels, kind="lower-bound")


def gen_star_dumbbell(n: int) -> DirectedGraph:
    """Build the 3n+1 node network: s -> u_1..u_2n, u_{2i-1}, u_{2i} -> d_i."""
    if n < 1:
        raise GraphConstructionError("dumbbell", "n must be at least 1")
    labels: dict[int, str] = {0: "source"}
    edges: list[tuple[int, int]] = []
    for j in range(1, 2 * n + 1):
        labels[j] = f"intermediate_{j}"
        edges.append((0, j))
    for i in range(1, n + 1):
        destination = 2 * n + i
        labels[destination] = f"destination_{i}"
        edges.append((2 * i - 1, destination))
        edges.append((2 * i, destination))
    return build_graph(3 * n + 1, edges, labels, kind="dumbbell")


def gen_in_star(m: int) -> DirectedGraph:
    """Build m leaves all sending to one center, the center is node m."""
    if m < 1:
        raise GraphConstructionError("star", "m must be at least 1")
    labels = {leaf: "leaf" for leaf in range(m)}
    labels[m] = "center"
    return build_graph(m + 1, ((leaf, m) for leaf in range(m)), labels, kind="star")


def to_networkx(graph: DirectedGraph) -> nx.DiGraph:
    """Convert to networkx."""
    digraph = nx.DiGraph()
    digraph.add_nodes_from(range(graph.n))
    digraph.add_edges_from(graph.edges())
    return digraph


def _check_source(graph: DirectedGraph, source: int) -> None:
    if not 0 <= source < graph.n:
        raise InvalidParameterError(f"source {source} is not a node of the graph")


def bfs_eccentricity(graph: DirectedGraph, source: int) -> int | None:
    """Return longest shortest path from source, None if some node is unreachable."""
    _check_source(graph, source)
    return _eccentricity(to_networkx(graph), source, graph.n)


def _eccentricity(digraph: nx.DiGraph, source: int, n: int) -> int | None:
    distances = nx.single_source_shortest_path_length(digraph, source)
    if len(distances) < n:
        return None
    return int(max(distances.values()))


def summarize_graph(graph: DirectedGraph, source: int = 0) -> GraphSummary:
    """Compute GraphSummary."""
    _check_source(graph, source)
    digraph = to_networkx(graph)
    eccentricity = _eccentricity(digraph, source, graph.n)
    step = max(1, graph.n // DIAMETER_SAMPLE_SOURCES)
    others = [node for node in range(0, graph.n, step) if node != source]
    diameter: int | None = eccentricity
    for node in others[:DIAMETER_SAMPLE_SOURCES]:
        if diameter is None:
            break
        other = _eccentricity(digraph, node, graph.n)
        diameter = None if other is None else max(diameter, other)
    return GraphSummary(
        n=graph.n,
        edge_count=graph.edge_count,
        average_degree=graph.edge_count / graph.n,
        source=source,
        source_eccentricity=eccentricity,
        diameter_estimate=diameter,
    )


def write_graph(graph: DirectedGraph, path: Path) -> None:
    """Write graph file: header, one edge per line, then role labels."""
    with path.open("w", encoding="utf8") as fout:
        fout.write(
            f"{GRAPH_FORMAT_MAGIC} {GRAPH_FORMAT_VERSION} "
            f"{graph.n} {graph.edge_count}\n"
        )
        for source, target in graph.edges():
            fout.write(f"{source} {target}\n")
        for node in sorted(graph.labels):
            fout.write(f"# label {node} {graph.labels[node]}\n")


def read_graph(path: Path) -> DirectedGraph:
    """Read graph file written by write_graph."""
    file = str(path)
    with path.open(encoding="utf8") as fin:
        lines = fin.read().splitlines()
    if not lines:
        raise ParsingError(file, "file is empty")
    header = lines[0].split()
    if len(header) != 4 or header[0] != GRAPH_FORMAT_MAGIC:
        raise UnexpectedLineError(file, 1, lines[0])
    if header[1] != GRAPH_FORMAT_VERSION:
        raise VersionMismatchError(file, header[1], GRAPH_FORMAT_VERSION)
    try:
        n, edge_count = int(header[2]), int(header[3])
    except ValueError as exc:
        raise UnexpectedLineError(file, 1, lines[0]) from exc
    edges: list[tuple[int, int]] = []
    labels: dict[int, str] = {}
    for line_number, line in enumerate(lines[1:], start=2):
        fields = line.split()
        if not fields:
            continue
        if fields[0] == "#":
            if len(fields) != 4 or fields[1] != "label" or not fields[2].isdigit():
                raise UnexpectedLineError(file, line_number, line)
            if int(fields[2]) >= n:
                raise UnexpectedLineError(file, line_number, line)
            labels[int(fields[2])] = fields[3]
            continue
        if len(fields) != 2 or not all(item.isdigit() for item in fields):
            raise UnexpectedLineError(file, line_number, line)
        edges.append((int(fields[0]), int(fields[1])))
    if len(edges) != edge_count:
        raise ParsingError(
            file, f"header announces {edge_count} edges but {len(edges)} were found"
        )
    try:
        return build_graph(n, edges, labels, kind="file")
    except GraphConstructionError as exc:
        raise ParsingError(file, exc.message) from exc


def neighbors_of(graph: DirectedGraph, nodes: IntArray) -> tuple[IntArray, IntArray]:
    """Return (receivers, transmitters) for every edge leaving nodes."""
    starts = graph.indptr[nodes]
    lengths = graph.indptr[nodes + 1] - starts
    total = int(lengths.sum())
    if total == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    offsets = np.repeat(starts - (np.cumsum(lengths) - lengths), lengths)
    receivers = graph.indices[np.arange(total, dtype=np.int64) + offsets]
    return receivers, np.repeat(nodes, lengths)
