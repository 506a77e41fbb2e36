"""Problem instances: a space plus source and sink terminals.

A network solving an instance must contain a directed path from every
source to every sink (``all_pairs``), or only for an explicit list of
required pairs (``point_to_point``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import PreconditionError
from .metric import AMBIENT, EXPLICIT, GRAPH, Point, Space

SOURCE = "source"
SINK = "sink"
SOURCE_AND_SINK = "source_and_sink"
STEINER = "steiner"

_FINITE = (EXPLICIT, GRAPH, AMBIENT)


@dataclass(frozen=True)
class Terminal:
    """One terminal vertex: stable id, role, and its point in the space."""

    id: str
    role: str
    location: Point


@dataclass(frozen=True)
class Instance:
    """An immutable problem statement.

    ``sources`` and ``sinks`` hold points of the space.  In the finite
    modes a point is its id, and an id listed on both sides becomes a
    single terminal with role ``source_and_sink``.  In coordinate modes
    terminals get generated ids (``a0``, ``a1``, ... / ``b0``, ``b1``, ...)
    and are never merged, even at coincident coordinates.

    ``pairs`` restricts connectivity to the listed (source_id, sink_id)
    pairs; ``None`` means every source must reach every sink.
    """

    space: Space
    sources: tuple[Point, ...]
    sinks: tuple[Point, ...]
    pairs: Optional[tuple[tuple[str, str], ...]] = None

    def __post_init__(self):
        if not self.sources or not self.sinks:
            raise ValueError("need at least one source and one sink")
        for p in list(self.sources) + list(self.sinks):
            self.space.check_point(p)
        if self.space.mode in _FINITE:
            if len(set(self.sources)) != len(self.sources):
                raise ValueError("duplicate source id")
            if len(set(self.sinks)) != len(self.sinks):
                raise ValueError("duplicate sink id")
        ids = {t.id for t in self.terminals()}
        if self.pairs is not None:
            for a, b in self.pairs:
                if a not in ids or b not in ids:
                    raise ValueError(f"pair ({a}, {b}) names an unknown terminal")

    @property
    def m(self) -> int:
        return len(self.sources)

    @property
    def n(self) -> int:
        return len(self.sinks)

    def terminals(self) -> tuple[Terminal, ...]:
        """Terminal vertices in deterministic order (sources, then sinks).

        Finite modes key terminals by point id and merge two-sided ones;
        coordinate modes assign fresh ids positionally.
        """
        if self.space.mode in _FINITE:
            sink_set = set(self.sinks)
            out = []
            for p in self.sources:
                role = SOURCE_AND_SINK if p in sink_set else SOURCE
                out.append(Terminal(p, role, p))
            for p in self.sinks:
                if p not in set(self.sources):
                    out.append(Terminal(p, SINK, p))
            return tuple(out)
        out = [Terminal(f"a{i}", SOURCE, p) for i, p in enumerate(self.sources)]
        out += [Terminal(f"b{j}", SINK, p) for j, p in enumerate(self.sinks)]
        return tuple(out)

    def source_ids(self) -> tuple[str, ...]:
        return tuple(t.id for t in self.terminals() if t.role in (SOURCE, SOURCE_AND_SINK))

    def sink_ids(self) -> tuple[str, ...]:
        return tuple(t.id for t in self.terminals()
                     if t.role in (SINK, SOURCE_AND_SINK))

    def required_pairs(self, variant: Optional[str] = None) -> tuple[tuple[str, str], ...]:
        """The (source id, sink id) pairs a solving network must connect.

        ``variant`` is ``"all_pairs"``, ``"point_to_point"``, or ``None`` to
        pick ``point_to_point`` exactly when an explicit pair list is set.
        Self-pairs (a terminal to itself) are dropped: a vertex reaches
        itself by the empty path.
        """
        if variant is None:
            variant = "point_to_point" if self.pairs is not None else "all_pairs"
        if variant == "point_to_point":
            if self.pairs is None:
                raise PreconditionError("point_to_point requires an explicit pair list")
            return tuple((a, b) for a, b in self.pairs if a != b)
        if variant != "all_pairs":
            raise ValueError(f"unknown variant {variant!r}")
        return tuple((a, b) for a in self.source_ids() for b in self.sink_ids()
                     if a != b)

    def to_dict(self) -> dict:
        def enc(p: Point):
            return list(p) if isinstance(p, tuple) else p

        d = {
            "space": self.space.to_dict(),
            "sources": [enc(p) for p in self.sources],
            "sinks": [enc(p) for p in self.sinks],
        }
        if self.pairs is not None:
            d["pairs"] = [[a, b] for a, b in self.pairs]
        return d
