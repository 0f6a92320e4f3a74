"""Exceptions to different errors."""

from __future__ import annotations


class RadioSimError(Exception):
    """Base error of the simulator."""


class ParsingError(RadioSimError):
    """Parsing error."""

    def __init__(self, file: str, message: str):
        """Initialise."""
        self.message = f"While parsing {file}, {message}"
        super().__init__(self.message)


class VersionMismatchError(ParsingError):
    """File header announces an unsupported format version."""

    def __init__(self, file: str, found: str, expected: str):
        """Initialise."""
        super().__init__(
            file, f"unsupported format version {found!r}, expected {expected!r}"
        )


class UnexpectedLineError(ParsingError):
    """Line that doesn't match the file format."""

    def __init__(self, file: str, line_number: int, line: str):
        """Initialise."""
        super().__init__(file, f"line {line_number} is malformed:\n{line}")


class InvalidParameterError(RadioSimError, ValueError):
    """Operation received parameters outside of its domain."""

    def __init__(self, message: str):
        """Initialise."""
        self.message = message
        super().__init__(self.message)


class GraphConstructionError(InvalidParameterError):
    """Network can't be constructed from given parameters."""

    def __init__(self, kind: str, message: str):
        """Initialise."""
        super().__init__(f"Can't build {kind} network: {message}")


class DistributionError(InvalidParameterError):
    """Probability table can't be built from given parameters."""

    def __init__(self, message: str):
        """Initialise."""
        super().__init__(f"Invalid distribution: {message}")


class ConfigError(RadioSimError):
    """Simulation config is inconsistent."""

    def __init__(self, message: str):
        """Initialise."""
        self.message = f"Invalid configuration: {message}"
        super().__init__(self.message)


class ProtocolInvariantError(RadioSimError):
    """Protocol broke a hard invariant during a run."""

    def __init__(self, protocol: str, round_index: int, message: str):
        """Initialise."""
        self.round_index = round_index
        self.message = f"{protocol} in round {round_index}: {message}"
        super().__init__(self.message)
