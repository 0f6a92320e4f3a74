#!/usr/bin/env python3
"""Radio network simulator main module."""
from __future__ import annotations

import argparse
import datetime
import importlib.metadata
import logging
from pathlib import Path
import sys
from typing import Callable

from . import render_report
from .args_parser import create_parser
from .channel import graph_seed
from .const import EXIT_BELOW_THRESHOLD, EXIT_CONFIG_ERROR, EXIT_OK
from .exceptions import ConfigError, InvalidParameterError, ParsingError
from .experiments import dumbbell_suite, layered_suite, run_batch
from .metrics import (
    append_summary_csv,
    phase_ratio_report,
    summarize,
    summary_row,
    verify_trace,
    write_traces,
)
from .model import (
    DirectedGraph,
    DistributionKind,
    ProbabilityTable,
    ProtocolKind,
    SimConfig,
    StopRule,
)
from .netgraph import (
    gen_gnp_directed,
    gen_lowerbound_network,
    gen_star_dumbbell,
    summarize_graph,
    write_graph,
)
from .protocols import derive_phase_params, load_graph
from .protocols.distributions import (
    alpha_distribution,
    alpha_prime_distribution,
    format_distribution,
    point_mass_distribution,
    write_distribution,
)

LOGGER = logging.getLogger(__name__)

# Diameter of the dumbbell, used by alpha when no D is given
DUMBBELL_DIAMETER = 3


def _timestamp(args: argparse.Namespace) -> str | None:
    if args.reproducible:
        return None
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _distribution(
    args: argparse.Namespace, n: int, D: int | None
) -> ProbabilityTable:
    kind = DistributionKind(args.dist)
    if kind is DistributionKind.POINT:
        if args.k is None:
            raise ConfigError("--k is required for the point distribution")
        return point_mass_distribution(args.k, n)
    if D is None:
        raise ConfigError("--D is required for the distribution")
    if kind is DistributionKind.ALPHA:
        return alpha_distribution(n, D, args.lambda_override, args.idle_residual)
    return alpha_prime_distribution(n, D, args.lambda_override, args.idle_residual)


def config_from_args(args: argparse.Namespace) -> SimConfig:
    """Build SimConfig from `run` arguments."""
    cfg = SimConfig(
        protocol=ProtocolKind(args.protocol),
        seed=args.seed,
        trials=args.trials,
        n=args.n,
        p=args.p,
        D=args.D,
        graph_path=args.graph,
        source=args.source,
        beta=args.beta,
        delta_warning=args.delta_warning,
        lambda_override=args.lambda_override,
        round_cap=args.round_cap,
        cap_multiplier=args.cap_multiplier,
        dist_kind=DistributionKind(args.dist),
        point_k=args.k,
        idle_residual=args.idle_residual,
        stop_rule=StopRule(args.stop_rule),
        record_transmissions=args.record_transmissions,
        threshold=args.threshold,
        out_path=args.out,
        summary_path=args.summary,
        reproducible=args.reproducible,
        workers=args.workers,
    )
    cfg.validate()
    return cfg


def cmd_gen(args: argparse.Namespace) -> int:
    """Generate graph, print its summary and write it to --out."""
    graph: DirectedGraph
    if args.kind == "gnp":
        if args.p is None:
            raise ConfigError("--p is required for gnp")
        graph = gen_gnp_directed(args.n, args.p, graph_seed(args.seed))
    elif args.kind == "lowerbound":
        if args.D is None:
            raise ConfigError("--D is required for lowerbound")
        graph = gen_lowerbound_network(args.n, args.D)
    else:
        graph = gen_star_dumbbell(args.n)
    print(summarize_graph(graph, args.source), end="")
    if args.out:
        write_graph(graph, Path(args.out))
        print(f"Graph written to {args.out}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    """Run a batch and emit trace JSON, summary CSV and the report."""
    cfg = config_from_args(args)
    traces = run_batch(cfg)
    summary = summarize(traces)
    shared_graph = load_graph(cfg) if cfg.graph_path is not None else None
    violations = 0
    for trace in traces:
        graph = shared_graph or load_graph(cfg.with_seed(trace.seed))
        violations += len(verify_trace(trace, graph))
    n = traces[0].n
    phase_ratios = None
    if cfg.protocol is ProtocolKind.BROADCAST_RANDOM:
        p = cfg.p
        if p is None:
            assert shared_graph is not None
            p = shared_graph.edge_count / (n * (n - 1))
        phase_ratios = phase_ratio_report(
            traces, derive_phase_params(n, p, cfg.beta, cfg.delta_warning)
        )
    warnings = [warning for trace in traces for warning in trace.warnings]
    generated = _timestamp(args)
    print(
        render_report.render_run_report(
            cfg, n, summary, warnings, violations, phase_ratios, generated
        ),
        end="",
    )
    if cfg.out_path:
        write_traces(traces, Path(cfg.out_path), cfg.reproducible)
    if cfg.summary_path:
        append_summary_csv(Path(cfg.summary_path), [summary_row(cfg, summary, n)])
    if summary.completion_rate < cfg.threshold:
        return EXIT_BELOW_THRESHOLD
    return EXIT_OK


def cmd_lowerbound_suite(args: argparse.Namespace) -> int:
    """Run layered network or dumbbell experiment and print its report."""
    stop_rule = StopRule(args.stop_rule)
    if args.kind == "layered":
        if args.D is None:
            raise ConfigError("--D is required for the layered network")
        dist = _distribution(args, args.n, args.D)
        report = layered_suite(
            args.n,
            args.D,
            dist,
            args.trials,
            args.seed,
            args.beta,
            stop_rule,
            args.workers,
        )
        if report.summary.completed < report.summary.trials:
            LOGGER.warning(
                "%d trials hit the round cap",
                report.summary.trials - report.summary.completed,
            )
        summary = report.summary
        output = render_report.render_lowerbound_report(report, _timestamp(args))
    else:
        dist = _distribution(args, args.n, args.D or DUMBBELL_DIAMETER)
        dumbbell = dumbbell_suite(
            args.n, dist, args.trials, args.seed, args.beta, args.workers
        )
        summary = dumbbell.summary
        output = render_report.render_lowerbound_report(dumbbell, _timestamp(args))
    print(output, end="")
    if args.out:
        Path(args.out).write_text(output, encoding="utf8")
    if summary.completion_rate < args.threshold:
        return EXIT_BELOW_THRESHOLD
    return EXIT_OK


def cmd_dist(args: argparse.Namespace) -> int:
    """Print distribution in table format."""
    dist = _distribution(args, args.n, args.D)
    print(format_distribution(dist), end="")
    print(f"# mean send probability {dist.mean_send_probability()!r}")
    if args.out:
        write_distribution(dist, Path(args.out))
    return EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "gen": cmd_gen,
    "run": cmd_run,
    "lowerbound": cmd_lowerbound_suite,
    "dist": cmd_dist,
}


def main(argv: list[str] | None = None) -> int:
    """Run main function."""
    parser = create_parser()
    args = parser.parse_args(argv)

    if args.version:
        print(f"radiosim {importlib.metadata.version(__package__)}")
        return EXIT_OK
    if args.command is None:
        parser.print_usage()
        return EXIT_CONFIG_ERROR

    default_logging_level = logging.DEBUG if args.verbose else logging.WARNING
    logging.basicConfig(level=default_logging_level)

    try:
        return COMMANDS[args.command](args)
    except (ConfigError, InvalidParameterError, ParsingError) as err:
        print(f"error: {err.message}")
        return EXIT_CONFIG_ERROR


def init() -> None:
    """Entry point."""
    sys.exit(main())


if __name__ == "__main__":
    init()
