"""Parse command line arguments."""

import argparse

from .const import (
    DEFAULT_BETA,
    DEFAULT_DELTA_WARNING,
    DEFAULT_SEED,
    DEFAULT_THRESHOLD,
    DEFAULT_TRIALS,
)
from .model import ProtocolKind, StopRule

DISTRIBUTIONS = ["alpha", "alpha-prime", "point"]


def _global_flags() -> argparse.ArgumentParser:
    """Flags accepted by every subcommand."""
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument(
        "--seed",
        type=int,
        default=DEFAULT_SEED,
        help="master seed, trial i uses seed + i (default: %(default)d)",
    )
    parser.add_argument(
        "--trials",
        type=int,
        default=DEFAULT_TRIALS,
        help="number of independent runs (default: %(default)d)",
    )
    parser.add_argument(
        "--out",
        type=str,
        default=None,
        help="output file: graph, trace JSON, report or distribution table",
    )
    parser.add_argument(
        "--reproducible",
        action="store_true",
        help="omit timestamps so that outputs are identical for a seed",
    )
    parser.add_argument(
        "--threshold",
        type=float,
        default=DEFAULT_THRESHOLD,
        help="completion rate needed for exit code 0 (default: %(default)s)",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=1,
        help="processes running trials in parallel (default: %(default)d)",
    )
    parser.add_argument(
        "--verbose",
        action="store_true",
        help="enable extra logging",
    )
    return parser


def _distribution_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--dist",
        choices=DISTRIBUTIONS,
        default="alpha",
        help="exponent distribution (default: %(default)s)",
    )
    parser.add_argument(
        "--k",
        type=int,
        default=None,
        help="exponent of the point distribution",
    )
    parser.add_argument(
        "--lambda",
        dest="lambda_override",
        type=float,
        default=None,
        help="lambda between log2(n/D) and log2(n), default log2(n/D)",
    )
    parser.add_argument(
        "--idle-residual",
        action="store_true",
        help="nobody transmits when the residual k = 0 outcome is drawn",
    )


def _run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--beta",
        type=float,
        default=DEFAULT_BETA,
        help="Phase 3 length and activity window constant (default: %(default)s)",
    )
    parser.add_argument(
        "--stop-rule",
        choices=[rule.value for rule in StopRule],
        default=StopRule.COMPLETION.value,
        help="stop at completion or once nobody can transmit (default: %(default)s)",
    )


def create_parser() -> argparse.ArgumentParser:
    """Create ArgumentParser."""
    parser = argparse.ArgumentParser(
        description="Simulate broadcasting and gossiping in radio networks.",
    )
    parser.add_argument(
        "--version",
        action="store_true",
        help="print version",
    )
    subparsers = parser.add_subparsers(dest="command")
    parents = [_global_flags()]

    gen = subparsers.add_parser(
        "gen", parents=parents, help="generate a graph file and print its summary"
    )
    gen.add_argument("kind", choices=["gnp", "lowerbound", "dumbbell"])
    gen.add_argument("--n", type=int, required=True, help="number of nodes")
    gen.add_argument("--p", type=float, default=None, help="edge probability")
    gen.add_argument("--D", type=int, default=None, help="diameter")
    gen.add_argument(
        "--source",
        type=int,
        default=0,
        help="node whose eccentricity is reported (default: %(default)d)",
    )

    run = subparsers.add_parser(
        "run", parents=parents, help="run a protocol over a batch of seeds"
    )
    run.add_argument(
        "--protocol",
        choices=[kind.value for kind in ProtocolKind],
        required=True,
    )
    run.add_argument("--n", type=int, default=None, help="number of nodes")
    run.add_argument("--p", type=float, default=None, help="edge probability")
    run.add_argument("--D", type=int, default=None, help="diameter")
    run.add_argument("--graph", type=str, default=None, help="graph file")
    run.add_argument("--source", type=int, default=0, help="broadcast source")
    run.add_argument(
        "--delta-warning",
        type=float,
        default=DEFAULT_DELTA_WARNING,
        help="warn when p*n/ln(n) is below this value (default: %(default)s)",
    )
    run.add_argument("--round-cap", type=int, default=None, help="rounds per run")
    run.add_argument(
        "--cap-multiplier",
        type=float,
        default=None,
        help="multiplier of the protocol's default round cap formula",
    )
    run.add_argument(
        "--summary",
        type=str,
        default=None,
        help="CSV file the summary row is appended to",
    )
    run.add_argument(
        "--no-transmit-ids",
        dest="record_transmissions",
        action="store_false",
        default=True,
        help="don't record transmitter ids in the trace",
    )
    _run_flags(run)
    _distribution_flags(run)

    lowerbound = subparsers.add_parser(
        "lowerbound", parents=parents, help="run a lower-bound construction"
    )
    lowerbound.add_argument("kind", choices=["layered", "dumbbell"])
    lowerbound.add_argument("--n", type=int, required=True, help="size parameter")
    lowerbound.add_argument(
        "--D", type=int, default=None, help="diameter of the layered network"
    )
    _run_flags(lowerbound)
    _distribution_flags(lowerbound)

    dist = subparsers.add_parser(
        "dist", parents=parents, help="print an exponent distribution"
    )
    dist.add_argument("--n", type=int, required=True, help="number of nodes")
    dist.add_argument("--D", type=int, default=None, help="diameter")
    _distribution_flags(dist)
    return parser
