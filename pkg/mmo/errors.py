"""Exception hierarchy for the optimizer library.

Value-type errors also subclass ValueError so callers that only know the
standard library can still catch them.
"""

from __future__ import annotations

from typing import Optional


class MmoError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(MmoError, ValueError):
    """Invalid configuration: unknown ids, bad roster, bad overrides."""


class ParameterError(ConfigError):
    """A numeric parameter is outside its documented range."""


class DimensionError(MmoError, ValueError):
    """Vector or matrix shapes disagree with the problem dimension."""


class DatasetError(MmoError, ValueError):
    """A dataset file could not be parsed."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EvaluatorError(MmoError, RuntimeError):
    """A user-supplied objective raised or returned a non-finite value."""
