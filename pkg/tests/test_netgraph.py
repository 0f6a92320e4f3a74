"""Test graph construction and graph files."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from radiosim.exceptions import (
    GraphConstructionError,
    InvalidParameterError,
    ParsingError,
    UnexpectedLineError,
    VersionMismatchError,
)
from radiosim.netgraph import (
    bfs_eccentricity,
    build_graph,
    gen_gnp_directed,
    gen_in_star,
    gen_lowerbound_network,
    gen_star_dumbbell,
    neighbors_of,
    read_graph,
    summarize_graph,
    write_graph,
)

TEST_DATA = Path("tests") / "test_data"


@pytest.mark.parametrize(
    "edges",
    [
        [(0, 0)],
        [(0, 1), (0, 1)],
        [(0, 3)],
        [(-1, 0)],
    ],
)
def test_build_graph_rejects_bad_edges(edges: list[tuple[int, int]]) -> None:
    """Self-loops, duplicates and unknown endpoints are rejected."""
    with pytest.raises(GraphConstructionError):
        build_graph(3, edges)


def test_build_graph_sorts_neighbors() -> None:
    """Out-neighbors come out sorted."""
    graph = build_graph(4, [(0, 3), (2, 1), (0, 1)])
    assert list(graph.out_neighbors(0)) == [1, 3]
    assert list(graph.out_neighbors(1)) == []
    assert list(graph.edges()) == [(0, 1), (0, 3), (2, 1)]
    assert list(graph.in_degrees()) == [0, 2, 0, 1]


def test_gnp_complete_graph() -> None:
    """p = 1 gives the complete digraph."""
    graph = gen_gnp_directed(8, 1.0, seed=3)
    assert graph.edge_count == 56
    assert all(source != target for source, target in graph.edges())


def test_gnp_empty_graph() -> None:
    """p = 0 gives no edges."""
    assert gen_gnp_directed(10, 0.0, seed=3).edge_count == 0


def test_gnp_reproducible() -> None:
    """Same seed gives the same graph."""
    first = gen_gnp_directed(100, 0.05, seed=42)
    second = gen_gnp_directed(100, 0.05, seed=42)
    assert np.array_equal(first.indptr, second.indptr)
    assert np.array_equal(first.indices, second.indices)


def test_gnp_edge_count() -> None:
    """Edge count concentrates around n(n-1)p."""
    n, p = 200, 0.1
    graph = gen_gnp_directed(n, p, seed=7)
    mean = n * (n - 1) * p
    sigma = (n * (n - 1) * p * (1 - p)) ** 0.5
    assert abs(graph.edge_count - mean) < 5 * sigma


@pytest.mark.parametrize("p", [-0.1, 1.5])
def test_gnp_rejects_bad_probability(p: float) -> None:
    """p must be a probability."""
    with pytest.raises(GraphConstructionError):
        gen_gnp_directed(5, p, seed=1)


def test_lowerbound_network() -> None:
    """n=16, D=20 has 47 nodes and eccentricity 20 from c_1."""
    graph = gen_lowerbound_network(16, 20)
    assert graph.n == 47
    assert bfs_eccentricity(graph, 0) == 20
    assert graph.labels[0] == "center_1"
    assert graph.labels[3] == "center_2"
    assert graph.labels[17] == "center_4"
    assert graph.nodes_with_role("leaf_4") == list(range(18, 34))
    assert graph.nodes_with_role("path_") == list(range(34, 47))
    path_head = graph.nodes_with_role("path_0")[0]
    # Only the leaves of the last star feed the path
    assert sorted(
        source for source, target in graph.edges() if target == path_head
    ) == graph.nodes_with_role("leaf_4")


@pytest.mark.parametrize("n,D", [(12, 30), (1, 30), (16, 16)])
def test_lowerbound_network_rejects(n: int, D: int) -> None:
    """n must be a power of two and D must exceed 4 log n."""
    with pytest.raises(GraphConstructionError):
        gen_lowerbound_network(n, D)


def test_star_dumbbell() -> None:
    """Dumbbell has 3n + 1 nodes and two in-neighbors per destination."""
    graph = gen_star_dumbbell(4)
    assert graph.n == 13
    assert graph.edge_count == 16
    assert bfs_eccentricity(graph, 0) == 2
    in_degrees = graph.in_degrees()
    for destination in graph.nodes_with_role("destination_"):
        assert in_degrees[destination] == 2
    assert graph.nodes_with_role("intermediate_") == list(range(1, 9))


def test_in_star() -> None:
    """Leaves all send to the center."""
    graph = gen_in_star(5)
    assert graph.n == 6
    assert list(graph.in_degrees()) == [0, 0, 0, 0, 0, 5]


def test_summary_of_disconnected_graph() -> None:
    """Unreachable nodes make eccentricity and diameter unknown."""
    summary = summarize_graph(build_graph(3, [(0, 1)]), 0)
    assert summary.edge_count == 1
    assert summary.source_eccentricity is None
    assert summary.diameter_estimate is None
    assert "unreachable" in str(summary)


def test_summary_of_two_way_path() -> None:
    """Diameter of a bidirectional path of 3 nodes is 2."""
    summary = summarize_graph(read_graph(TEST_DATA / "two_way.radiograph"), 1)
    assert summary.source_eccentricity == 1
    assert summary.diameter_estimate == 2


def test_read_graph_fixture() -> None:
    """Fixture file is parsed with its labels."""
    graph = read_graph(TEST_DATA / "two_way.radiograph")
    assert graph.n == 3
    assert list(graph.edges()) == [(0, 1), (1, 0), (1, 2), (2, 1)]
    assert graph.labels == {0: "left", 1: "middle", 2: "right"}


def test_write_read_graph(tmp_path: Path) -> None:
    """Written lower-bound network reads back with the same edges and roles."""
    graph = gen_lowerbound_network(16, 20)
    path = tmp_path / "graph.txt"
    write_graph(graph, path)
    assert path.read_text().startswith("radiograph v1 47 ")
    loaded = read_graph(path)
    assert np.array_equal(loaded.indptr, graph.indptr)
    assert np.array_equal(loaded.indices, graph.indices)
    assert dict(loaded.labels) == dict(graph.labels)


def test_read_graph_version_mismatch(tmp_path: Path) -> None:
    """Unknown version is rejected."""
    path = tmp_path / "graph.txt"
    path.write_text("radiograph v2 2 1\n0 1\n")
    with pytest.raises(VersionMismatchError):
        read_graph(path)


@pytest.mark.parametrize(
    "content",
    [
        "radiograph v1 2 2\n0 1\n",
        "radiograph v1 2 1\n0 1 2\n",
        "radiograph v1 2 1\n0 0\n",
        "graph v1 2 1\n0 1\n",
        "",
    ],
)
def test_read_graph_malformed(tmp_path: Path, content: str) -> None:
    """Malformed files raise ParsingError."""
    path = tmp_path / "graph.txt"
    path.write_text(content)
    with pytest.raises(ParsingError):
        read_graph(path)


@pytest.mark.parametrize(
    "n,edges,expected",
    [
        (3, [(0, 1), (1, 2)], [2, None, None]),
        (2, [], [None, None]),
        (1, [], [0]),
        (7, [(i, (i + 1) % 7) for i in range(7)], [6] * 7),
        (4, [(0, 1), (0, 2), (0, 3), (1, 0), (2, 0), (3, 0)], [1, 2, 2, 2]),
    ],
)
def test_bfs_eccentricity(
    n: int, edges: list[tuple[int, int]], expected: list[int | None]
) -> None:
    """Eccentricity follows edge direction, None when a node is unreachable."""
    graph = build_graph(n, edges)
    eccentricities = [bfs_eccentricity(graph, source) for source in range(n)]
    assert eccentricities == expected
    for eccentricity in eccentricities:
        assert eccentricity is None or eccentricity <= n - 1


@pytest.mark.parametrize("source", [-1, 3])
def test_bfs_eccentricity_rejects_unknown_source(source: int) -> None:
    """Source must be a node."""
    with pytest.raises(InvalidParameterError):
        bfs_eccentricity(build_graph(3, [(0, 1)]), source)


def test_read_graph_label_of_unknown_node(tmp_path: Path) -> None:
    """Labels must name nodes of the graph."""
    path = tmp_path / "graph.txt"
    path.write_text("radiograph v1 2 1\n0 1\n# label 99 source\n")
    with pytest.raises(UnexpectedLineError):
        read_graph(path)


def test_neighbors_of() -> None:
    """Edges leaving a node set are listed with their transmitter."""
    graph = build_graph(4, [(0, 1), (0, 2), (3, 2)])
    receivers, transmitters = neighbors_of(graph, np.array([0, 3], dtype=np.int64))
    assert list(receivers) == [1, 2, 2]
    assert list(transmitters) == [0, 0, 3]
    receivers, transmitters = neighbors_of(graph, np.array([1], dtype=np.int64))
    assert receivers.size == 0 and transmitters.size == 0
