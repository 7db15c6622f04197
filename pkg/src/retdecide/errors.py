"""Exception types shared across the toolkit."""

from __future__ import annotations


class RetdecideError(Exception):
    """Base class for all toolkit errors."""


class ParseError(RetdecideError, ValueError):
    """An input file violates its format contract.

    Carries the source name and 1-based line number when known, so CLI
    messages can point at the offending line.
    """

    def __init__(self, message: str, source: str | None = None, line: int | None = None):
        self.source = source
        self.line = line
        prefix = ""
        if source is not None:
            prefix = f"{source}:" if line is None else f"{source}:{line}:"
        elif line is not None:
            prefix = f"line {line}:"
        super().__init__(f"{prefix} {message}" if prefix else message)


class ConfigError(RetdecideError, ValueError):
    """A configuration document is invalid or internally inconsistent."""


class EvaluationError(RetdecideError, ValueError):
    """A computation was requested on inputs that cannot support it."""
