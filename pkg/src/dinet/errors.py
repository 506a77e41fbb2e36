"""Shared exception types.

Every refusal the library makes is a typed exception so callers (and the
CLI exit-code mapping) can tell budget refusals apart from bad input or
internal corruption.
"""

from __future__ import annotations


class DinetError(Exception):
    """Base class for all library errors."""


class InvalidPointError(DinetError):
    """A point does not belong to the space (wrong dimension or unknown id)."""


class InvalidTerminalError(DinetError):
    """A terminal id named in a connectivity query is not a vertex of the network."""


class PreconditionError(DinetError):
    """An operation was called on input that violates its stated precondition."""


class CoverageError(PreconditionError):
    """The canonical path pieces fail to cover some edge of the network.

    Carries the first uncovered edge; this signals that the network is not a
    pruned shortest-network candidate.
    """

    def __init__(self, edge: tuple[str, str]):
        self.edge = edge
        super().__init__(f"edge {edge[0]}->{edge[1]} is not covered by any canonical path piece")


class BudgetError(DinetError):
    """A computation was refused because it exceeds a configured search budget.

    The message always includes an explicit size estimate so the caller can
    judge how far over budget the request is.
    """


class CorruptionError(DinetError):
    """An internal consistency check failed (e.g. a rewrite broke connectivity)."""


class ParseError(DinetError):
    """An instance/solution/digraph file failed to parse or validate."""
