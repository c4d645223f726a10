"""Exception hierarchy shared across the toolkit.

Input problems (malformed files, schema violations) and estimation
precondition failures (positivity, undefined ratios) are kept distinct so the
CLI can map them to different exit codes.
"""

from __future__ import annotations


class CeceError(Exception):
    """Base class for all toolkit errors."""


class InputError(CeceError):
    """Malformed or invalid input data (file, row, or schema level)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EstimationError(CeceError):
    """A precondition of an estimator is violated (e.g. zero denominator)."""


class PositivityError(EstimationError):
    """An arm (or arm-stratum cell) contains no subjects."""
