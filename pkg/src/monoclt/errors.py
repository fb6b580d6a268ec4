"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations


class MonoError(Exception):
    exit_code = 1


class ParseError(MonoError, ValueError):
    """Malformed input text (edge lists, generator or pattern specs)."""

    exit_code = 3

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(MonoError, ValueError):
    exit_code = 4


class CapacityError(MonoError):
    """A configured size cap would be exceeded."""

    exit_code = 5


class UndefinedStatisticError(MonoError, ArithmeticError):
    """The requested statistic does not exist, e.g. Z when Var[T] = 0."""

    exit_code = 6
