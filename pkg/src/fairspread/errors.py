"""Exception types shared across the package."""

from __future__ import annotations


class FairspreadError(Exception):
    """Base class for all errors raised by fairspread."""


class DataError(FairspreadError, ValueError):
    """Input data (graph, groups, seeds) is inconsistent or invalid."""


class ParseError(DataError):
    """A line of an input file could not be parsed."""

    def __init__(self, message: str, lineno: int | None = None, source: str | None = None):
        self.lineno = lineno
        self.source = source
        where = ""
        if source is not None:
            where = f"{source}:"
        if lineno is not None:
            where = f"{where}{lineno}: " if where else f"line {lineno}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


class CapExceededError(FairspreadError):
    """An exact enumeration would exceed its configured size cap."""


class BudgetError(DataError):
    """A seed budget cannot be satisfied by the given inputs."""


class UsageError(FairspreadError):
    """Invalid command-line usage or experiment configuration."""
