"""Directed networks over a space, plus the structural rewrites.

A network is a finite digraph whose vertices carry a role (source, sink,
source_and_sink, or steiner) and a location in the space.  Its length is
the sum of edge lengths: point-to-point distances in metric modes, arc
weights in ambient mode.

The rewrites in this module (``simplify``, ``prune_redundant_edges``,
``contract_zero_edges``) never break the required connectivity and never
increase length.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import InvalidTerminalError, PreconditionError
from .instance import SINK, SOURCE, SOURCE_AND_SINK, STEINER
from .metric import AMBIENT, EUCLIDEAN, RECTILINEAR, Point, Space


@dataclass(frozen=True)
class Vertex:
    id: str
    role: str
    location: Point


class Network:
    """An immutable directed network.  Build new ones instead of mutating."""

    def __init__(self, space: Space, vertices: Iterable[Vertex],
                 edges: Iterable[tuple[str, str]]):
        vs = sorted(vertices, key=lambda v: v.id)
        ids = [v.id for v in vs]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate vertex id")
        idset = set(ids)
        es = sorted(set((u, v) for u, v in edges))
        for u, v in es:
            if u == v:
                raise ValueError(f"self-loop on {u}")
            if u not in idset or v not in idset:
                raise ValueError(f"edge ({u}, {v}) references a missing vertex")
        for v in vs:
            space.check_point(v.location)
        if space.mode == AMBIENT:
            loc = {v.id: v.location for v in vs}
            for u, v in es:
                if not space.has_arc(loc[u], loc[v]):
                    raise ValueError(f"edge ({u}, {v}) is not an arc of the ambient digraph")
        self.space = space
        self.vertices = tuple(vs)
        self.edges = tuple(es)
        self._by_id = {v.id: v for v in vs}
        self._out: dict[str, list[str]] = {v.id: [] for v in vs}
        self._in: dict[str, list[str]] = {v.id: [] for v in vs}
        for u, v in es:
            self._out[u].append(v)
            self._in[v].append(u)

    # -- basic accessors ----------------------------------------------

    def vertex(self, vid: str) -> Vertex:
        try:
            return self._by_id[vid]
        except KeyError:
            raise InvalidTerminalError(f"no vertex {vid!r} in the network") from None

    def has_vertex(self, vid: str) -> bool:
        return vid in self._by_id

    def has_edge(self, u: str, v: str) -> bool:
        return v in self._out.get(u, ())

    def out_neighbours(self, vid: str) -> tuple[str, ...]:
        return tuple(self._out[vid])

    def in_neighbours(self, vid: str) -> tuple[str, ...]:
        return tuple(self._in[vid])

    def neighbours(self, vid: str) -> frozenset[str]:
        """Direction-blind neighbour set."""
        return frozenset(self._out[vid]) | frozenset(self._in[vid])

    def steiner_ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.vertices if v.role == STEINER)

    def source_ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.vertices if v.role in (SOURCE, SOURCE_AND_SINK))

    def sink_ids(self) -> tuple[str, ...]:
        return tuple(v.id for v in self.vertices if v.role in (SINK, SOURCE_AND_SINK))

    def edge_length(self, u: str, v: str) -> float:
        if self.space.mode == AMBIENT:
            return self.space.arc_weight(self._by_id[u].location, self._by_id[v].location)
        return self.space.distance(self._by_id[u].location, self._by_id[v].location)

    def length(self) -> float:
        # fsum over the sorted edge tuple: the total is identical however
        # the network was assembled.
        return math.fsum(self.edge_length(u, v) for u, v in self.edges)

    def is_simple(self) -> bool:
        """Every steiner vertex has at least 3 distinct neighbours."""
        return all(len(self.neighbours(s)) >= 3 for s in self.steiner_ids())

    # -- connectivity --------------------------------------------------

    def reachable_from(self, vid: str) -> frozenset[str]:
        if vid not in self._by_id:
            raise InvalidTerminalError(f"no vertex {vid!r} in the network")
        seen = {vid}
        q = deque([vid])
        while q:
            u = q.popleft()
            for w in self._out[u]:
                if w not in seen:
                    seen.add(w)
                    q.append(w)
        return frozenset(seen)

    def connects(self, a: str, b: str) -> bool:
        return b in self.reachable_from(a)

    def connects_pairs(self, pairs: Sequence[tuple[str, str]]) -> bool:
        cache: dict[str, frozenset[str]] = {}
        for a, b in pairs:
            if a not in cache:
                cache[a] = self.reachable_from(a)
            if b not in self._by_id:
                raise InvalidTerminalError(f"no vertex {b!r} in the network")
            if b not in cache[a]:
                return False
        return True

    def required_pairs(self) -> tuple[tuple[str, str], ...]:
        """All (source, sink) id pairs implied by vertex roles, minus self-pairs."""
        return tuple((a, b) for a in self.source_ids() for b in self.sink_ids() if a != b)

    def is_connecting(self, pairs: Optional[Sequence[tuple[str, str]]] = None) -> bool:
        return self.connects_pairs(self.required_pairs() if pairs is None else pairs)

    # -- derivation helpers ---------------------------------------------

    def with_edges(self, edges: Iterable[tuple[str, str]]) -> "Network":
        return Network(self.space, self.vertices, edges)

    def without_vertices(self, drop: Iterable[str],
                         edges: Iterable[tuple[str, str]]) -> "Network":
        dropset = set(drop)
        vs = [v for v in self.vertices if v.id not in dropset]
        return Network(self.space, vs, edges)

    def canonical_arcs(self) -> str:
        return ";".join(f"{u}>{v}" for u, v in self.edges)

    def to_dict(self) -> dict:
        def enc(p: Point):
            return list(p) if isinstance(p, tuple) else p

        return {
            "vertices": [{"id": v.id, "role": v.role, "location": enc(v.location)}
                         for v in self.vertices],
            "edges": [[u, v] for u, v in self.edges],
        }


def simplify(net: Network) -> Network:
    """Remove steiner vertices with fewer than 3 distinct neighbours.

    A steiner vertex with at most one neighbour is deleted outright.  One
    with exactly two neighbours u, v is deleted and replaced by the through
    arcs it supported: u->v is added iff both u->s and s->v were present,
    and v->u iff both v->s and s->u.  Repeats until stable, processing
    candidates in sorted id order, so the result is deterministic and every
    surviving steiner vertex has >= 3 neighbours.

    Reachability between all surviving vertices is preserved, and by the
    triangle inequality the length never increases.  Not available in
    ambient mode, where the through arc may not exist.
    """
    if net.space.mode == AMBIENT:
        raise PreconditionError("simplify is not defined in ambient_digraph mode")
    verts = {v.id: v for v in net.vertices}
    edges = set(net.edges)
    changed = True
    while changed:
        changed = False
        for sid in sorted(vid for vid, v in verts.items() if v.role == STEINER):
            nbrs = {v for u, v in edges if u == sid} | {u for u, v in edges if v == sid}
            if len(nbrs) >= 3:
                continue
            incident = {(u, v) for u, v in edges if sid in (u, v)}
            if len(nbrs) == 2:
                u, v = sorted(nbrs)
                if (u, sid) in edges and (sid, v) in edges and u != v:
                    edges.add((u, v))
                if (v, sid) in edges and (sid, u) in edges and v != u:
                    edges.add((v, u))
            edges -= incident
            del verts[sid]
            changed = True
    return Network(net.space, verts.values(), edges)


def prune_redundant_edges(net: Network,
                          pairs: Optional[Sequence[tuple[str, str]]] = None) -> Network:
    """Drop every edge whose removal keeps all required pairs connected.

    Edges are tried once in sorted order.  Redundancy is monotone under
    removal (deleting edges only shrinks reachability), so a single pass
    yields a network in which every remaining edge is needed.
    """
    req = net.required_pairs() if pairs is None else tuple(pairs)
    if not net.connects_pairs(req):
        raise PreconditionError("network does not connect its required pairs")
    keep = list(net.edges)
    for e in list(net.edges):
        trial = [x for x in keep if x != e]
        if Network(net.space, net.vertices, trial).connects_pairs(req):
            keep = trial
    return net.with_edges(keep)


def contract_zero_edges(net: Network, eps: float = 0.0) -> Network:
    """Merge steiner vertices across edges of length <= eps (coordinate modes).

    A steiner endpoint collapses into the other endpoint (into the lower id
    when both are steiner); terminals are never merged with each other.
    Finite and ambient modes are returned unchanged.
    """
    if net.space.mode not in (EUCLIDEAN, RECTILINEAR):
        return net
    verts = {v.id: v for v in net.vertices}
    edges = set(net.edges)
    while True:
        target = None
        for u, v in sorted(edges):
            du, dv = verts[u], verts[v]
            if net.space.distance(du.location, dv.location) <= eps:
                if du.role == STEINER and dv.role == STEINER:
                    target = (max(u, v), min(u, v))
                elif du.role == STEINER:
                    target = (u, v)
                elif dv.role == STEINER:
                    target = (v, u)
                else:
                    continue
                break
        if target is None:
            break
        gone, into = target
        new_edges = set()
        for a, b in edges:
            a2 = into if a == gone else a
            b2 = into if b == gone else b
            if a2 != b2:
                new_edges.add((a2, b2))
        edges = new_edges
        del verts[gone]
    return Network(net.space, verts.values(), edges)
