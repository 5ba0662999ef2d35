"""Exception hierarchy; each class carries the CLI exit status it maps to."""

from __future__ import annotations


class ReinjectError(Exception):
    exit_code = 1


class ConfigError(ReinjectError):
    """Invalid scenario or parameter set.

    ``key`` and ``line`` locate the offending entry of a configuration
    document when the error comes from parsing.
    """

    exit_code = 2

    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)


class SimulationError(ReinjectError):
    exit_code = 3


class AnalysisError(ReinjectError):
    exit_code = 4
