"""
Exception hierarchy for the toolkit.

Everything raised on purpose derives from SecrecyError so the sweep runner can
record a failed grid point and carry on.
"""

from __future__ import annotations

from typing import Optional


class SecrecyError(Exception):
    """Base class for toolkit errors."""


class DomainError(SecrecyError, ValueError):
    """Argument or parameter outside the domain of an operation."""


class ConvergenceError(SecrecyError, ArithmeticError):
    """A series or iteration stopped before meeting its tolerance.

    Args:
        message: human readable description.
        partial_value: the last partial result, when one exists.
        iterations: how many terms/iterations were spent.
    """

    def __init__(
        self,
        message: str,
        partial_value: Optional[float] = None,
        iterations: Optional[int] = None,
    ) -> None:
        super().__init__(message)
        self.partial_value = partial_value
        self.iterations = iterations


class TruncationError(ConvergenceError):
    """The RF mixture series tail bound was not met within i_max terms."""


class QuadratureError(ConvergenceError):
    """Adaptive quadrature did not reach the requested tolerance."""


class ConfigError(SecrecyError, ValueError):
    """Scenario file or sweep specification could not be parsed/validated."""

    def __init__(
        self,
        message: str,
        source: Optional[str] = None,
        line: Optional[int] = None,
        section: Optional[str] = None,
        key: Optional[str] = None,
    ) -> None:
        self.source = source
        self.line = line
        self.section = section
        self.key = key
        super().__init__(self._format(message))

    def _format(self, message: str) -> str:
        where = ""
        if self.source is not None:
            where = self.source
            if self.line is not None:
                where += f":{self.line}"
            where += ": "
        if self.section is not None:
            where += f"[{self.section}]"
            if self.key is not None:
                where += f" {self.key}"
            where += ": "
        return where + message
