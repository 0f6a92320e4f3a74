"""Constants."""

from __future__ import annotations

from typing import Final

# File format headers
GRAPH_FORMAT_MAGIC: Final = "radiograph"
GRAPH_FORMAT_VERSION: Final = "v1"
DIST_FORMAT_MAGIC: Final = "dist"
DIST_FORMAT_VERSION: Final = "v1"
TRACE_FORMAT: Final = "radiotrace v1"

# Appended to a distribution file when its k = 0 entry is an idle residual
IDLE_RESIDUAL_MARKER: Final = "# residual idle"

# Activity window and Phase 3 length constant
DEFAULT_BETA: Final = 8.0

# Gossip rounds = multiplier * d * log2(n)
DEFAULT_GOSSIP_MULTIPLIER: Final = 128.0

# Broadcast on general graphs stops after multiplier * (D * lambda + log2(n) ** 2)
DEFAULT_GENERAL_CAP_MULTIPLIER: Final = 4.0

# Minimal completion rate for a zero exit code
DEFAULT_THRESHOLD: Final = 0.95

# Warn when p * n / ln(n) is below this value
DEFAULT_DELTA_WARNING: Final = 8.0

DEFAULT_SEED: Final = 1
DEFAULT_TRIALS: Final = 1

# Mass tables must sum to one within this tolerance
MASS_TOLERANCE: Final = 1e-12

# Sources used for the diameter estimate besides the given one
DIAMETER_SAMPLE_SOURCES: Final = 8

# Resources

PACKAGE_NAME = __package__

RUN_REPORT_TEMPLATE: Final = "run_report.txt.j2"
LOWERBOUND_REPORT_TEMPLATE: Final = "lowerbound_report.txt.j2"

# Exit codes
EXIT_OK: Final = 0
EXIT_BELOW_THRESHOLD: Final = 1
EXIT_CONFIG_ERROR: Final = 2
