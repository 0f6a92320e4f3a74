"""Test trace verification, statistics and output files."""

from __future__ import annotations

import json
from pathlib import Path
import random

import numpy as np
import pytest

from radiosim.exceptions import InvalidParameterError, ParsingError
from radiosim.metrics import (
    SUMMARY_COLUMNS,
    append_summary_csv,
    phase_ratio_report,
    read_summary_csv,
    read_traces,
    summarize,
    summary_row,
    verify_trace,
    write_traces,
)
from radiosim.model import (
    PhaseParams,
    ProtocolKind,
    RoundRecord,
    RunStatus,
    SimConfig,
    Trace,
)
from radiosim.netgraph import build_graph


def make_trace(
    records: list[RoundRecord],
    tx_count: list[int],
    protocol: ProtocolKind = ProtocolKind.BROADCAST_RANDOM,
    completion_round: int | None = None,
    seed: int = 0,
    phase1_rounds: int = 0,
    phase2_round: int | None = None,
) -> Trace:
    """Build trace by hand."""
    n = len(tx_count)
    return Trace(
        protocol=protocol,
        n=n,
        seed=seed,
        source=0,
        records=records,
        tx_count=np.asarray(tx_count, dtype=np.int64),
        t_u=np.asarray([0] + [-1] * (n - 1), dtype=np.int64),
        status=(
            RunStatus.COMPLETED
            if completion_round is not None
            else RunStatus.CAP_EXHAUSTED
        ),
        completion_round=completion_round,
        phase1_rounds=phase1_rounds,
        phase2_round=phase2_round,
    )


def record(
    round_index: int,
    transmit_ids: tuple[int, ...],
    uninformed: int = 3,
    active: int | None = None,
) -> RoundRecord:
    """Round in which the given nodes transmit, all active nodes by default."""
    return RoundRecord(
        round=round_index,
        active=len(transmit_ids) if active is None else active,
        transmitters=len(transmit_ids),
        uninformed=uninformed,
        newly_informed=0,
        collisions=0,
        transmit_ids=transmit_ids,
    )


def test_repeated_transmitter_is_reported() -> None:
    """A node transmitting in rounds 2 and 5 breaks disjointness."""
    records = [record(r, (0,) if r in (2, 5) else ()) for r in range(1, 6)]
    trace = make_trace(records, [2, 0, 0, 0])
    violations = verify_trace(trace, build_graph(4, []))
    assert [(v.identity, v.round_index) for v in violations] == [(4, 5)]
    assert "round 2" in str(violations[0])


@pytest.mark.parametrize("uninformed,expected", [(6, []), (7, [(2, 2)])])
def test_phase1_uninformed_accounting(
    uninformed: int, expected: list[tuple[int, int]]
) -> None:
    """During flooding N_t is n minus the nodes that transmitted or are active."""
    records = [record(1, (0,), uninformed=9), record(2, (1, 2, 3), uninformed)]
    trace = make_trace(records, [1, 1, 1, 1] + [0] * 6, phase1_rounds=2)
    violations = verify_trace(trace, build_graph(10, []))
    assert [(v.identity, v.round_index) for v in violations] == expected


@pytest.mark.parametrize("phase2_round,expected", [(None, [(3, 3)]), (2, [])])
def test_active_set_decay(
    phase2_round: int | None, expected: list[tuple[int, int]]
) -> None:
    """Active set shrinks by at most the transmissions, except across Phase 2."""
    records = [
        record(1, (0,), active=5),
        record(2, (1,), active=5),
        record(3, (), active=1),
    ]
    trace = make_trace(records, [1, 1, 0, 0, 0, 0], phase2_round=phase2_round)
    violations = verify_trace(trace, build_graph(6, []))
    assert [(v.identity, v.round_index) for v in violations] == expected


def test_gossip_trace_skips_broadcast_identities() -> None:
    """Nodes transmit repeatedly in gossip without violations."""
    records = [record(r, (0,)) for r in range(1, 6)]
    trace = make_trace(records, [5, 0, 0, 0], ProtocolKind.GOSSIP_RANDOM)
    assert verify_trace(trace, build_graph(4, [])) == []
    forced = verify_trace(trace, build_graph(4, []), ProtocolKind.BROADCAST_RANDOM)
    assert [v.identity for v in forced] == [4, 4, 4, 4]


def test_sanity_violations() -> None:
    """Growing uninformed count, node count and tx totals are checked."""
    records = [record(1, (0,), uninformed=2), record(2, (1,), uninformed=3)]
    trace = make_trace(records, [1, 0, 0, 0])
    violations = verify_trace(trace, build_graph(5, []))
    assert [v.identity for v in violations] == [0, 0, 0]
    assert "increased" in violations[1].message


def test_summarize_single_trace() -> None:
    """One completed run gives equal mean, median, p95 and max."""
    trace = make_trace([record(1, (0,))], [1, 0, 0, 0], completion_round=7)
    summary = summarize([trace])
    assert summary.completion_rate == 1.0
    assert (
        summary.rounds_mean
        == summary.rounds_median
        == summary.rounds_p95
        == summary.rounds_max
        == 7
    )
    assert summary.tx_mean == 0.25
    assert summary.tx_max == 1


def test_summarize_order_statistics() -> None:
    """Rounds 1..100 have median 50 and p95 95, in any order."""
    traces = [
        make_trace([], [1, 0], completion_round=r, seed=r) for r in range(1, 101)
    ]
    summary = summarize(traces)
    assert summary.rounds_mean == 50.5
    assert summary.rounds_median == 50
    assert summary.rounds_p95 == 95
    assert summary.rounds_max == 100
    random.Random(3).shuffle(traces)
    assert summarize(traces) == summary


def test_summarize_without_completions() -> None:
    """Round statistics are undefined when no run completed."""
    summary = summarize([make_trace([], [2, 1])])
    assert summary.completion_rate == 0.0
    assert summary.rounds_mean is None
    assert summary.rounds_p95 is None
    assert summary.total_tx_max == 3


def test_summarize_empty_batch() -> None:
    """Empty batch is rejected."""
    with pytest.raises(InvalidParameterError):
        summarize([])


def test_phase_ratios() -> None:
    """Active set growing 1, 30, 900 gives ratio 30 per round."""
    records = [
        RoundRecord(
            round=r + 1,
            active=30**r,
            transmitters=30**r,
            uninformed=0,
            newly_informed=0,
            collisions=0,
        )
        for r in range(3)
    ]
    trace = make_trace(records, [0] * 1000)
    params = PhaseParams(
        n=1000,
        p=0.032,
        d=32.0,
        T=2,
        phase2_enabled=True,
        p2_prob=0.5,
        p3_prob=0.5,
        p3_rounds=10,
        beta=8.0,
    )
    report = phase_ratio_report([trace, make_trace([], [0, 0])], params)
    assert report.per_trial == [[30.0, 30.0]]
    assert report.final_ratios == [900 / 32**2]
    assert report.skipped == 1
    assert report.round_ratios == [30.0, 30.0]


def test_write_read_traces(tmp_path: Path) -> None:
    """Traces survive the JSON file."""
    records = [record(1, (0,)), record(2, ())]
    trace = make_trace(records, [1, 0, 0], completion_round=2)
    trace.warnings.append("low degree")
    path = tmp_path / "traces.json"
    write_traces([trace], path, reproducible=True)
    document = json.loads(path.read_text())
    assert document["generated"] is None
    assert document["traces"][0]["per_node"]["t_u"] == [0, None, None]
    (loaded,) = read_traces(path)
    assert loaded.records == trace.records
    assert list(loaded.tx_count) == [1, 0, 0]
    assert list(loaded.t_u) == [0, -1, -1]
    assert loaded.status is RunStatus.COMPLETED
    assert loaded.warnings == ["low degree"]


def test_write_traces_timestamp(tmp_path: Path) -> None:
    """Non-reproducible output carries a timestamp."""
    path = tmp_path / "traces.json"
    write_traces([make_trace([], [0])], path, reproducible=False)
    assert json.loads(path.read_text())["generated"] is not None


@pytest.mark.parametrize(
    "content",
    [
        "not json",
        '{"format": "other", "traces": []}',
        '{"format": "radiotrace v1", "traces": [{"n": 1}]}',
    ],
)
def test_read_traces_malformed(tmp_path: Path, content: str) -> None:
    """Broken trace files raise ParsingError."""
    path = tmp_path / "traces.json"
    path.write_text(content)
    with pytest.raises(ParsingError):
        read_traces(path)


def test_summary_csv_appends(tmp_path: Path) -> None:
    """Header is written once, rows accumulate."""
    cfg = SimConfig(ProtocolKind.GOSSIP_RANDOM, n=16, p=0.5)
    summary = summarize([make_trace([], [1, 1], completion_round=4)])
    path = tmp_path / "summary.csv"
    append_summary_csv(path, [summary_row(cfg, summary, 16)])
    append_summary_csv(path, [summary_row(cfg, summary, 16)])
    assert path.read_text().splitlines()[0] == ",".join(SUMMARY_COLUMNS)
    frame = read_summary_csv(path)
    assert len(frame) == 2
    assert list(frame["protocol"]) == ["gossip-random"] * 2
    assert list(frame["p_or_D"]) == [0.5, 0.5]
