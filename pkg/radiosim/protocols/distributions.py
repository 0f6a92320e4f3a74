"""Exponent distributions for broadcasting on general graphs."""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Callable, Union

import numpy as np

from radiosim.const import (
    DIST_FORMAT_MAGIC,
    DIST_FORMAT_VERSION,
    IDLE_RESIDUAL_MARKER,
    MASS_TOLERANCE,
)
from radiosim.exceptions import (
    DistributionError,
    InvalidParameterError,
    ParsingError,
    UnexpectedLineError,
    VersionMismatchError,
)
from radiosim.model import DistributionKind, IntArray, ProbabilityTable
from radiosim.util import ceil_log2

LOGGER = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


def derive_lambda(n: int, D: int) -> int:
    """Return floor(log2(n / D))."""
    return math.floor(math.log2(n / D) + 1e-12)


def _resolve_lambda(n: int, D: int, lambda_override: float | None) -> float:
    if n < 2:
        raise DistributionError(f"n={n} must be at least 2")
    if not 2 <= D <= n:
        raise DistributionError(f"D={D} must lie in [2, n={n}]")
    lam = float(derive_lambda(n, D)) if lambda_override is None else lambda_override
    if lam < 1:
        raise DistributionError(f"lambda={lam:g} must be at least 1")
    if lambda_override is not None and not (
        math.log2(n / D) - 1e-9 <= lam <= math.log2(n) + 1e-9
    ):
        LOGGER.warning(
            "lambda=%g is outside [log2(n/D), log2(n)] = [%g, %g]",
            lam,
            math.log2(n / D),
            math.log2(n),
        )
    return lam


def _table(
    kind: DistributionKind,
    n: int,
    D: int,
    lam: float,
    mass_of: Callable[[int], float],
    idle_residual: bool,
) -> ProbabilityTable:
    max_exponent = ceil_log2(n)
    tail = [mass_of(k) for k in range(1, max_exponent + 1)]
    residual = 1.0 - math.fsum(tail)
    if residual < -MASS_TOLERANCE:
        raise DistributionError(
            f"{kind.value} masses for n={n}, D={D}, lambda={lam:g} exceed one "
            f"(k = 0 entry would be {residual:.3g})"
        )
    return ProbabilityTable(
        kind=kind,
        masses=(max(residual, 0.0), *tail),
        n=n,
        D=D,
        lam=lam,
        idle_residual=idle_residual,
    )


def _middle_end(n: int, lam: float) -> int:
    """Last exponent of the geometrically decaying band."""
    log_n = math.log2(n)
    loglog_n = math.log2(log_n) if log_n > 0 else 0.0
    return min(math.ceil(lam + loglog_n - 1e-9), ceil_log2(n))


def alpha_distribution(
    n: int,
    D: int,
    lambda_override: float | None = None,
    idle_residual: bool = False,
) -> ProbabilityTable:
    """Build the energy-efficient distribution alpha.

    alpha_k = 1/(4 lam) for k <= lam, max{1/(2 log n), 2^-(k - lam)/(2 lam)} up to
    lam + log log n, 1/(2 log n) above, and the residual at k = 0.
    """
    lam = _resolve_lambda(n, D, lambda_override)
    log_n = math.log2(n)
    middle_end = _middle_end(n, lam)

    def mass_of(k: int) -> float:
        if k <= lam:
            return 1.0 / (4.0 * lam)
        if k <= middle_end:
            return max(1.0 / (2.0 * log_n), 2.0 ** (-(k - lam)) / (2.0 * lam))
        return 1.0 / (2.0 * log_n)

    return _table(DistributionKind.ALPHA, n, D, lam, mass_of, idle_residual)


def alpha_prime_distribution(
    n: int,
    D: int,
    lambda_override: float | None = None,
    idle_residual: bool = False,
) -> ProbabilityTable:
    """Build the baseline distribution alpha' the alpha table is compared with."""
    lam = _resolve_lambda(n, D, lambda_override)
    log_n = math.log2(n)
    middle_end = _middle_end(n, lam)

    def mass_of(k: int) -> float:
        if k <= lam:
            return 1.0 / (2.0 * lam)
        if k <= middle_end:
            return 2.0 ** (-(k - lam)) / (2.0 * lam)
        return 1.0 / (2.0 * lam * log_n)

    return _table(DistributionKind.ALPHA_PRIME, n, D, lam, mass_of, idle_residual)


def point_mass_distribution(k: int, n: int) -> ProbabilityTable:
    """Build distribution that always picks exponent k."""
    if k < 0:
        raise DistributionError(f"exponent k={k} must be non-negative")
    size = max(k, ceil_log2(n) if n > 1 else 0) + 1
    masses = [0.0] * size
    masses[k] = 1.0
    return ProbabilityTable(DistributionKind.POINT, tuple(masses), n=n)


def custom_distribution(masses: list[float], n: int) -> ProbabilityTable:
    """Build distribution from explicit masses."""
    if not masses or any(mass < 0 for mass in masses):
        raise DistributionError("masses must be a non-empty list of non-negatives")
    if abs(math.fsum(masses) - 1.0) > MASS_TOLERANCE:
        raise DistributionError(f"masses sum to {math.fsum(masses)!r}, not 1")
    return ProbabilityTable(DistributionKind.CUSTOM, tuple(masses), n=n)


def exact_inform_probability(m: int, dist: ProbabilityTable) -> float:
    """Probability that exactly one of m active in-neighbors transmits.

    Every neighbor sends with 2^-k where k is drawn from dist once per round.
    """
    if m < 1:
        raise InvalidParameterError(f"m={m} must be at least 1")
    terms = []
    for mass, q in zip(dist.masses, dist.send_probabilities()):
        if mass == 0.0 or q == 0.0:
            continue
        if q == 1.0:
            terms.append(mass if m == 1 else 0.0)
            continue
        terms.append(mass * m * q * math.exp((m - 1) * math.log1p(-q)))
    return math.fsum(terms)


def sample_sequence(dist: ProbabilityTable, length: int, seed: SeedLike) -> IntArray:
    """Draw length i.i.d. exponents by inverse CDF."""
    if length < 1:
        raise InvalidParameterError(f"length={length} must be at least 1")
    rng = np.random.default_rng(seed)
    cdf = np.cumsum(np.asarray(dist.masses, dtype=np.float64))
    # Scaling by the total keeps zero-mass exponents unreachable
    uniforms = rng.random(length) * cdf[-1]
    return np.searchsorted(cdf, uniforms, side="right").astype(np.int64)


def format_distribution(dist: ProbabilityTable) -> str:
    """Render table format: header then one `k alpha_k` line per exponent."""
    D = "-" if dist.D is None else str(dist.D)
    lam = "-" if dist.lam is None else repr(dist.lam)
    lines = [f"{DIST_FORMAT_MAGIC} {DIST_FORMAT_VERSION} {dist.n} {D} {lam}"]
    lines += [f"{k} {mass!r}" for k, mass in enumerate(dist.masses)]
    lines.append(f"# kind {dist.kind.value}")
    if dist.idle_residual:
        lines.append(IDLE_RESIDUAL_MARKER)
    return "\n".join(lines) + "\n"


def write_distribution(dist: ProbabilityTable, path: Path) -> None:
    """Write table format to file."""
    path.write_text(format_distribution(dist), encoding="utf8")


def read_distribution(path: Path) -> ProbabilityTable:
    """Read table format written by write_distribution."""
    file = str(path)
    lines = path.read_text(encoding="utf8").splitlines()
    if not lines:
        raise ParsingError(file, "file is empty")
    header = lines[0].split()
    if len(header) != 5 or header[0] != DIST_FORMAT_MAGIC:
        raise UnexpectedLineError(file, 1, lines[0])
    if header[1] != DIST_FORMAT_VERSION:
        raise VersionMismatchError(file, header[1], DIST_FORMAT_VERSION)
    try:
        n = int(header[2])
        D = None if header[3] == "-" else int(header[3])
        lam = None if header[4] == "-" else float(header[4])
    except ValueError as exc:
        raise UnexpectedLineError(file, 1, lines[0]) from exc
    kind = DistributionKind.CUSTOM
    idle_residual = False
    masses: list[float] = []
    for line_number, line in enumerate(lines[1:], start=2):
        if line.strip() == IDLE_RESIDUAL_MARKER:
            idle_residual = True
            continue
        fields = line.split()
        if not fields:
            continue
        if fields[0] == "#":
            if len(fields) == 3 and fields[1] == "kind":
                kind = DistributionKind(fields[2])
            continue
        try:
            k, mass = int(fields[0]), float(fields[1])
        except (ValueError, IndexError) as exc:
            raise UnexpectedLineError(file, line_number, line) from exc
        if k != len(masses) or len(fields) != 2:
            raise UnexpectedLineError(file, line_number, line)
        masses.append(mass)
    if not masses or abs(math.fsum(masses) - 1.0) > MASS_TOLERANCE:
        raise ParsingError(file, "masses don't sum to one")
    return ProbabilityTable(kind, tuple(masses), n, D, lam, idle_residual)
