"""Exception types shared across the package."""

from __future__ import annotations


class PairspaceError(Exception):
    """Base class for every error raised by this package."""


class FormatError(PairspaceError):
    """Malformed input file or stream.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownTokenError(PairspaceError, KeyError):
    """Lookup of one or more tokens absent from an embedding table."""

    def __init__(self, tokens):
        if isinstance(tokens, str):
            tokens = (tokens,)
        self.tokens = tuple(tokens)
        super().__init__(", ".join(self.tokens))

    def __str__(self):
        joined = ", ".join(repr(t) for t in self.tokens)
        return f"unknown token(s): {joined}"


class ValidationError(PairspaceError, ValueError):
    """An operation precondition was violated (bad argument, shape mismatch,
    out-of-range parameter, or degenerate input)."""
