"""Trace verification, statistics and trace/summary files."""

from __future__ import annotations

import datetime
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
import pandas as pd

from .const import TRACE_FORMAT
from .exceptions import InvalidParameterError, ParsingError
from .model import (
    DirectedGraph,
    PhaseParams,
    PhaseRatioReport,
    ProtocolKind,
    RoundRecord,
    RunStatus,
    SimConfig,
    Trace,
    TraceViolation,
    TrialSummary,
)
from .util import lower_median, nearest_rank

LOGGER = logging.getLogger(__name__)

# Identity number used for bounds and monotonicity checks
SANITY = 0

SUMMARY_COLUMNS = [
    "n",
    "p_or_D",
    "protocol",
    "trials",
    "completion_rate",
    "rounds_mean",
    "rounds_p95",
    "tx_mean",
    "tx_max",
]


def _check_sanity(trace: Trace) -> list[TraceViolation]:
    violations = []
    previous: RoundRecord | None = None
    for record in trace.records:
        for name in ("active", "transmitters", "uninformed"):
            value = getattr(record, name)
            if not 0 <= value <= trace.n:
                violations.append(
                    TraceViolation(
                        SANITY, record.round, f"{name}={value} outside [0, {trace.n}]"
                    )
                )
        if previous is not None:
            if record.uninformed > previous.uninformed:
                violations.append(
                    TraceViolation(SANITY, record.round, "uninformed count increased")
                )
            if (
                record.pending_pairs is not None
                and previous.pending_pairs is not None
                and record.pending_pairs > previous.pending_pairs
            ):
                violations.append(
                    TraceViolation(SANITY, record.round, "pending pairs increased")
                )
        previous = record
    recorded = sum(record.transmitters for record in trace.records)
    if recorded != trace.total_transmissions():
        violations.append(
            TraceViolation(
                SANITY,
                None,
                f"rounds record {recorded} transmissions, nodes "
                f"{trace.total_transmissions()}",
            )
        )
    return violations


def _check_phase1(trace: Trace) -> list[TraceViolation]:
    """Identities (1) U_t = Q_t and (2) N_t accounting during Phase 1."""
    violations = []
    phase1_rounds = trace.phase1_rounds or 0
    transmitted_before = 0
    for record in trace.records[:phase1_rounds]:
        if record.active != record.transmitters:
            violations.append(
                TraceViolation(
                    1,
                    record.round,
                    f"{record.active} active but {record.transmitters} transmitted",
                )
            )
        expected = trace.n - (transmitted_before + record.active)
        if record.uninformed != expected:
            violations.append(
                TraceViolation(
                    2,
                    record.round,
                    f"{record.uninformed} uninformed, expected {expected}",
                )
            )
        transmitted_before += record.transmitters
    return violations


def _check_active_decay(trace: Trace) -> list[TraceViolation]:
    """Identity (3): |U_t| >= |U_r| - sum_{i=r}^{t-1} |Q_i| for r < t.

    Phase 2 retires active nodes without transmission, spans across it are skipped.
    """
    active = np.asarray([record.active for record in trace.records], dtype=np.int64)
    sent = np.asarray(
        [record.transmitters for record in trace.records], dtype=np.int64
    )
    # prefix[i] is the number of transmissions before the i-th recorded round
    prefix = np.concatenate(([0], np.cumsum(sent)))
    violations = []
    first = 0
    for t in range(1, len(active)):
        if trace.records[t - 1].round == trace.phase2_round:
            first = t
        if first >= t:
            continue
        # |U_r| - (prefix[t] - prefix[r]) must not exceed |U_t|
        bound = active[first:t] + prefix[first:t] - prefix[t]
        worst = int(np.argmax(bound))
        if bound[worst] > active[t]:
            violations.append(
                TraceViolation(
                    3,
                    trace.records[t].round,
                    f"{active[t]} active, at least {bound[worst]} expected from "
                    f"round {trace.records[first + worst].round}",
                )
            )
    return violations


def _check_disjoint(trace: Trace) -> list[TraceViolation]:
    """Identity (4): transmit sets of different rounds are disjoint."""
    violations = []
    first_round: dict[int, int] = {}
    for record in trace.records:
        if record.transmit_ids is None:
            continue
        for node in record.transmit_ids:
            if node in first_round:
                violations.append(
                    TraceViolation(
                        4,
                        record.round,
                        f"node {node} already transmitted in round "
                        f"{first_round[node]}",
                    )
                )
            else:
                first_round[node] = record.round
    if not violations and trace.max_tx() > 1:
        violations.append(
            TraceViolation(4, None, f"a node transmitted {trace.max_tx()} times")
        )
    return violations


def verify_trace(
    trace: Trace, g: DirectedGraph, protocol: ProtocolKind | None = None
) -> list[TraceViolation]:
    """Return broken trace identities, empty list when the trace is consistent."""
    protocol = protocol or trace.protocol
    violations = []
    if trace.n != g.n:
        violations.append(
            TraceViolation(SANITY, None, f"trace has {trace.n} nodes, graph {g.n}")
        )
    violations += _check_sanity(trace)
    if protocol is ProtocolKind.BROADCAST_RANDOM:
        violations += _check_phase1(trace)
        violations += _check_active_decay(trace)
        violations += _check_disjoint(trace)
    for violation in violations:
        LOGGER.debug("seed %d: %s", trace.seed, violation)
    return violations


def summarize(traces: Sequence[Trace]) -> TrialSummary:
    """Compute statistics of a batch, independent of its order."""
    if not traces:
        raise InvalidParameterError("can't summarize an empty batch")
    rounds = [
        float(trace.completion_round)
        for trace in traces
        if trace.completion_round is not None
    ]
    totals = [float(trace.total_transmissions()) for trace in traces]
    return TrialSummary(
        trials=len(traces),
        completed=len(rounds),
        completion_rate=len(rounds) / len(traces),
        rounds_mean=float(np.mean(rounds)) if rounds else None,
        rounds_median=lower_median(rounds) if rounds else None,
        rounds_p95=nearest_rank(rounds, 0.95) if rounds else None,
        rounds_max=max(rounds) if rounds else None,
        tx_mean=float(np.mean([trace.mean_tx() for trace in traces])),
        tx_max=max(trace.max_tx() for trace in traces),
        total_tx_mean=float(np.mean(totals)),
        total_tx_p95=nearest_rank(totals, 0.95),
        total_tx_max=int(max(totals)),
    )


def phase_ratio_report(
    traces: Iterable[Trace], params: PhaseParams
) -> PhaseRatioReport:
    """Growth |U_{t+1}| / |U_t| of the active set for t <= T and |U_{T+1}| / d^T."""
    report = PhaseRatioReport(d=params.d, T=params.T)
    for trace in traces:
        actives = trace.active_counts()
        if len(actives) < params.T + 1 or 0 in actives[: params.T]:
            report.skipped += 1
            continue
        report.per_trial.append(
            [actives[t + 1] / actives[t] for t in range(params.T)]
        )
        report.final_ratios.append(actives[params.T] / params.d**params.T)
    if report.skipped:
        LOGGER.info("Skipped %d trials without Phase 1 growth", report.skipped)
    return report


def trace_to_dict(trace: Trace) -> dict[str, Any]:
    """Convert trace to the JSON schema."""
    records = []
    for record in trace.records:
        item: dict[str, Any] = {
            "round": record.round,
            "active": record.active,
            "transmitters": record.transmitters,
            "uninformed": record.uninformed,
            "newly_informed": record.newly_informed,
            "collisions": record.collisions,
        }
        if record.pending_pairs is not None:
            item["pending_pairs"] = record.pending_pairs
        if record.transmit_ids is not None:
            item["transmit_ids"] = list(record.transmit_ids)
        records.append(item)
    return {
        "protocol": trace.protocol.value,
        "n": trace.n,
        "seed": trace.seed,
        "source": trace.source,
        "status": trace.status.value,
        "completion_round": trace.completion_round,
        "phase1_rounds": trace.phase1_rounds,
        "phase2_round": trace.phase2_round,
        "warnings": list(trace.warnings),
        "rounds": records,
        "per_node": {
            "tx_count": [int(count) for count in trace.tx_count],
            "t_u": [None if t_u < 0 else int(t_u) for t_u in trace.t_u],
        },
    }


def trace_from_dict(data: dict[str, Any]) -> Trace:
    """Convert JSON schema back to a trace."""
    records = [
        RoundRecord(
            round=item["round"],
            active=item["active"],
            transmitters=item["transmitters"],
            uninformed=item["uninformed"],
            newly_informed=item["newly_informed"],
            collisions=item["collisions"],
            pending_pairs=item.get("pending_pairs"),
            transmit_ids=(
                tuple(item["transmit_ids"]) if "transmit_ids" in item else None
            ),
        )
        for item in data["rounds"]
    ]
    per_node = data["per_node"]
    return Trace(
        protocol=ProtocolKind(data["protocol"]),
        n=data["n"],
        seed=data["seed"],
        source=data["source"],
        records=records,
        tx_count=np.asarray(per_node["tx_count"], dtype=np.int64),
        t_u=np.asarray(
            [-1 if t_u is None else t_u for t_u in per_node["t_u"]], dtype=np.int64
        ),
        status=RunStatus(data["status"]),
        completion_round=data["completion_round"],
        warnings=list(data["warnings"]),
        phase1_rounds=data["phase1_rounds"],
        phase2_round=data["phase2_round"],
    )


def write_traces(traces: Sequence[Trace], path: Path, reproducible: bool) -> None:
    """Write batch of traces as JSON, the timestamp is omitted when reproducible."""
    document = {
        "format": TRACE_FORMAT,
        "generated": (
            None
            if reproducible
            else datetime.datetime.now(datetime.timezone.utc).isoformat()
        ),
        "traces": [trace_to_dict(trace) for trace in traces],
    }
    with path.open("w", encoding="utf8") as fout:
        json.dump(document, fout, indent=1)
        fout.write("\n")


def read_traces(path: Path) -> list[Trace]:
    """Read traces written by write_traces."""
    with path.open(encoding="utf8") as fin:
        try:
            document = json.load(fin)
        except json.decoder.JSONDecodeError as exception:
            raise ParsingError(str(path), "file is not valid JSON") from exception
    if document.get("format") != TRACE_FORMAT:
        raise ParsingError(str(path), f"format isn't {TRACE_FORMAT!r}")
    try:
        return [trace_from_dict(item) for item in document["traces"]]
    except (KeyError, ValueError) as exception:
        raise ParsingError(str(path), f"bad trace entry: {exception}") from exception


def summary_row(cfg: SimConfig, summary: TrialSummary, n: int) -> dict[str, Any]:
    """One row of the summary CSV."""
    return {
        "n": n,
        "p_or_D": cfg.p if cfg.p is not None else cfg.D,
        "protocol": cfg.protocol.value,
        "trials": summary.trials,
        "completion_rate": summary.completion_rate,
        "rounds_mean": summary.rounds_mean,
        "rounds_p95": summary.rounds_p95,
        "tx_mean": summary.tx_mean,
        "tx_max": summary.tx_max,
    }


def append_summary_csv(path: Path, rows: Sequence[dict[str, Any]]) -> None:
    """Append rows to summary CSV, writing the header for a new file."""
    frame = pd.DataFrame(list(rows), columns=SUMMARY_COLUMNS)
    frame.to_csv(path, mode="a", header=not path.exists(), index=False)


def read_summary_csv(path: Path) -> pd.DataFrame:
    """Load summary CSV."""
    return pd.read_csv(path)
