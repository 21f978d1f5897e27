"""Exception hierarchy shared by the library and the CLI.

Every error carries the process exit code the CLI reports for it.
"""

from __future__ import annotations

from typing import Any


class LevicalcError(Exception):
    """Base class for levicalc errors."""

    exit_code: int = 1


class InputError(LevicalcError, ValueError):
    """Malformed input file, schema violation or bad option value."""

    exit_code = 2


class UnsupportedError(LevicalcError, NotImplementedError):
    """Operation not available for the given representation."""

    exit_code = 2


class PreconditionError(LevicalcError, ValueError):
    """An operation was called outside its precondition."""

    exit_code = 2


class NotInDomainError(LevicalcError):
    """A law lies outside the domain of an integral mapping.

    Attributes:
        report: Domain report with the failed criteria, when available.
        y: Offending argument of the exponent, when the failure was found
            while integrating at a particular grid point.
    """

    exit_code = 3

    def __init__(self, message: str, *, report: Any = None, y: float | None = None) -> None:
        super().__init__(message)
        self.report = report
        self.y = y


class QuadratureError(LevicalcError, ArithmeticError):
    """Quadrature did not reach the requested tolerance.

    Attributes:
        abserr: Achieved absolute error estimate.
    """

    exit_code = 4

    def __init__(self, message: str, *, abserr: float) -> None:
        super().__init__(f"{message} (achieved error estimate {abserr:.3e})")
        self.abserr = abserr


class SmallJumpWarning(UserWarning):
    """Jump truncation level removes atoms of the Lévy measure."""


class TruncationWarning(UserWarning):
    """An improper interval was truncated for simulation or tabulation."""
