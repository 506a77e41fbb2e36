"""Metric spaces a directed network can live in.

Five modes are supported:

* ``euclidean`` / ``rectilinear`` -- continuous coordinate spaces of a fixed
  dimension with the L2 / L1 distance; points are float tuples.
* ``explicit_matrix`` -- a finite point set with a pairwise distance matrix.
  The matrix is validated on demand (``validate_metric``); pseudometrics
  (zero distance between distinct points) pass with a warning.
* ``graph_metric`` -- the shortest-path metric of a connected, positively
  weighted undirected graph; all-pairs distances are precomputed at load.
* ``ambient_digraph`` -- a weighted digraph whose arcs are the only edges a
  network may use.  Arc weights are used for length accounting only; this
  mode does not define a point-to-point metric.

Spaces are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import InvalidPointError, PreconditionError

Point = Union[tuple[float, ...], str]

EUCLIDEAN = "euclidean"
RECTILINEAR = "rectilinear"
EXPLICIT = "explicit_matrix"
GRAPH = "graph_metric"
AMBIENT = "ambient_digraph"

_COORDINATE_MODES = (EUCLIDEAN, RECTILINEAR)
_FINITE_MODES = (EXPLICIT, GRAPH, AMBIENT)


@dataclass(frozen=True)
class Violation:
    """One violated metric axiom with the points that witness it."""

    kind: str  # asymmetry | negative | nonzero_diagonal | triangle | nonfinite
    points: tuple[str, ...]
    detail: str


@dataclass(frozen=True)
class MetricReport:
    ok: bool
    violations: tuple[Violation, ...] = ()
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class SteinerDomain:
    """Where extra (non-terminal) vertices may be placed.

    ``kind`` is ``"continuous"`` (any point of R^dim) or ``"finite"``
    (one of ``points``).
    """

    kind: str
    dim: Optional[int] = None
    points: tuple[str, ...] = ()


class Space:
    """One metric space (or ambient digraph) in a fixed mode.

    Use the classmethod constructors; the bare ``__init__`` is internal.
    """

    def __init__(self, mode: str, *, dim: Optional[int] = None,
                 points: tuple[str, ...] = (),
                 matrix: Optional[np.ndarray] = None,
                 graph_edges: tuple[tuple[str, str, float], ...] = (),
                 arcs: tuple[tuple[str, str, float], ...] = ()):
        self.mode = mode
        self.dim = dim
        self.points = points
        self._index = {p: i for i, p in enumerate(points)}
        self._matrix = matrix
        self.graph_edges = graph_edges
        self.arcs = arcs
        self._arc_weight = {(u, v): w for u, v, w in arcs}

    # -- constructors -------------------------------------------------

    @classmethod
    def euclidean(cls, dim: int) -> "Space":
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        return cls(EUCLIDEAN, dim=dim)

    @classmethod
    def rectilinear(cls, dim: int) -> "Space":
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        return cls(RECTILINEAR, dim=dim)

    @classmethod
    def explicit(cls, points: Sequence[str], matrix: Sequence[Sequence[float]]) -> "Space":
        pts = tuple(points)
        if len(set(pts)) != len(pts):
            raise ValueError("point ids must be distinct")
        m = np.asarray(matrix, dtype=float)
        if m.shape != (len(pts), len(pts)):
            raise ValueError(f"matrix shape {m.shape} does not match {len(pts)} points")
        return cls(EXPLICIT, points=pts, matrix=m)

    @classmethod
    def graph(cls, vertices: Sequence[str], edges: Sequence[tuple[str, str, float]]) -> "Space":
        pts = tuple(vertices)
        if len(set(pts)) != len(pts):
            raise ValueError("vertex ids must be distinct")
        index = {p: i for i, p in enumerate(pts)}
        n = len(pts)
        dm = np.full((n, n), np.inf)
        np.fill_diagonal(dm, 0.0)
        es = []
        for u, v, w in edges:
            if u not in index or v not in index:
                raise ValueError(f"edge ({u}, {v}) references an unknown vertex")
            if u == v:
                raise ValueError(f"self-loop on {u}")
            if not (w > 0):
                raise ValueError(f"edge ({u}, {v}) weight must be > 0, got {w}")
            i, j = index[u], index[v]
            dm[i, j] = min(dm[i, j], w)
            dm[j, i] = dm[i, j]
            es.append((u, v, float(w)))
        # Floyd-Warshall; vertex counts here are desk-scale.
        for k in range(n):
            np.minimum(dm, dm[:, k:k + 1] + dm[k:k + 1, :], out=dm)
        if np.isinf(dm).any():
            i, j = map(int, np.argwhere(np.isinf(dm))[0])
            raise ValueError(f"graph is not connected: no path between {pts[i]} and {pts[j]}")
        return cls(GRAPH, points=pts, matrix=dm, graph_edges=tuple(es))

    @classmethod
    def ambient(cls, vertices: Sequence[str], arcs: Sequence[tuple[str, str, float]]) -> "Space":
        pts = tuple(vertices)
        if len(set(pts)) != len(pts):
            raise ValueError("vertex ids must be distinct")
        seen = set()
        norm = []
        for u, v, w in arcs:
            if u not in pts or v not in pts:
                raise ValueError(f"arc ({u}, {v}) references an unknown vertex")
            if u == v:
                raise ValueError(f"self-loop on {u}")
            if not (w > 0):
                raise ValueError(f"arc ({u}, {v}) weight must be > 0, got {w}")
            if (u, v) in seen:
                raise ValueError(f"duplicate arc ({u}, {v})")
            seen.add((u, v))
            norm.append((u, v, float(w)))
        return cls(AMBIENT, points=pts, arcs=tuple(norm))

    # -- point handling -----------------------------------------------

    def check_point(self, p: Point) -> None:
        """Raise InvalidPointError unless p belongs to this space."""
        if self.mode in _COORDINATE_MODES:
            if not isinstance(p, tuple) or len(p) != self.dim:
                raise InvalidPointError(f"expected a {self.dim}-tuple of coordinates, got {p!r}")
            if not all(isinstance(c, (int, float)) and math.isfinite(c) for c in p):
                raise InvalidPointError(f"coordinates must be finite numbers: {p!r}")
        else:
            if p not in self._index:
                raise InvalidPointError(f"unknown point id {p!r}")

    def distance(self, p: Point, q: Point) -> float:
        """Distance between two points of the space.

        Not defined in ambient mode, where only arc weights exist.
        """
        if self.mode == AMBIENT:
            raise PreconditionError("distance is not defined in ambient_digraph mode")
        self.check_point(p)
        self.check_point(q)
        if self.mode == EUCLIDEAN:
            return math.dist(p, q)
        if self.mode == RECTILINEAR:
            return float(sum(abs(a - b) for a, b in zip(p, q)))
        return float(self._matrix[self._index[p], self._index[q]])

    def has_arc(self, u: str, v: str) -> bool:
        return (u, v) in self._arc_weight

    def arc_weight(self, u: str, v: str) -> float:
        if self.mode != AMBIENT:
            raise PreconditionError("arc_weight is only defined in ambient_digraph mode")
        try:
            return self._arc_weight[(u, v)]
        except KeyError:
            raise InvalidPointError(f"({u}, {v}) is not an arc of the ambient digraph") from None

    def scale(self) -> float:
        """A positive size scale of the space, for relative tolerances."""
        if self.mode in _COORDINATE_MODES:
            return 1.0  # instance-dependent; callers fold in terminal spread
        if self.mode == AMBIENT:
            return max((w for _, _, w in self.arcs), default=1.0)
        m = float(np.max(self._matrix)) if self._matrix is not None and self._matrix.size else 0.0
        return m if m > 0 else 1.0

    def to_dict(self) -> dict:
        if self.mode in _COORDINATE_MODES:
            return {"mode": self.mode, "dim": self.dim}
        if self.mode == EXPLICIT:
            return {"mode": self.mode, "points": list(self.points),
                    "matrix": [[float(x) for x in row] for row in self._matrix]}
        if self.mode == GRAPH:
            return {"mode": self.mode, "vertices": list(self.points),
                    "edges": [[u, v, w] for u, v, w in self.graph_edges]}
        return {"mode": self.mode, "vertices": list(self.points),
                "arcs": [[u, v, w] for u, v, w in self.arcs]}


def validate_metric(space: Space) -> MetricReport:
    """Check the metric axioms and report every violation found.

    Only explicit matrices can actually be wrong; the coordinate and graph
    modes are correct by construction and return a clean report.  Ambient
    digraphs define no metric at all, so validating one is a misuse.
    """
    if space.mode == AMBIENT:
        raise PreconditionError("ambient_digraph mode does not define a metric")
    if space.mode != EXPLICIT:
        return MetricReport(ok=True)

    m = space._matrix
    pts = space.points
    n = len(pts)
    violations: list[Violation] = []
    warnings: list[str] = []
    for i in range(n):
        if m[i, i] != 0.0:
            violations.append(Violation("nonzero_diagonal", (pts[i],),
                                        f"d({pts[i]}, {pts[i]}) = {m[i, i]}"))
    for i in range(n):
        for j in range(n):
            if not math.isfinite(m[i, j]):
                violations.append(Violation("nonfinite", (pts[i], pts[j]),
                                            f"d({pts[i]}, {pts[j]}) = {m[i, j]}"))
            elif m[i, j] < 0:
                violations.append(Violation("negative", (pts[i], pts[j]),
                                            f"d({pts[i]}, {pts[j]}) = {m[i, j]}"))
    for i in range(n):
        for j in range(i + 1, n):
            if m[i, j] != m[j, i]:
                violations.append(Violation("asymmetry", (pts[i], pts[j]),
                                            f"d({pts[i]}, {pts[j]}) = {m[i, j]} but "
                                            f"d({pts[j]}, {pts[i]}) = {m[j, i]}"))
    if not violations:
        # Triangle check is only meaningful once the basics hold.
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if m[i, j] > m[i, k] + m[k, j]:
                        violations.append(Violation(
                            "triangle", (pts[i], pts[k], pts[j]),
                            f"d({pts[i]}, {pts[j]}) = {m[i, j]} > "
                            f"{m[i, k]} + {m[k, j]} via {pts[k]}"))
        for i in range(n):
            for j in range(i + 1, n):
                if m[i, j] == 0.0:
                    warnings.append(f"degenerate distance: d({pts[i]}, {pts[j]}) = 0 "
                                    "between distinct points (pseudometric)")
    return MetricReport(ok=not violations, violations=tuple(violations),
                        warnings=tuple(warnings))


def candidate_steiner_locations(space: Space) -> SteinerDomain:
    """Describe where non-terminal vertices may be placed in this space."""
    if space.mode in _COORDINATE_MODES:
        return SteinerDomain("continuous", dim=space.dim)
    return SteinerDomain("finite", points=space.points)
