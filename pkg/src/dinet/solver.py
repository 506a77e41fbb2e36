"""Exact solver: topology enumeration plus position optimization.

The search is split in two.  ``enumerate_topologies`` lists every abstract
wiring (which labelled vertices are joined by which arcs) that could be a
shortest network: exactly the inclusion-minimal digraphs connecting the
required pairs, up to renaming of the extra vertices.  For each wiring,
``optimize_positions`` places the extra vertices to minimize total length:
iteratively reweighted least squares in Euclidean space, exact grid

assignment in rectilinear space, exhaustive point assignment in finite
metrics.  ``solve`` runs the two stages for every extra-vertex count within
budget and keeps the shortest result.

``brute_force_oracle`` is a deliberately separate route (include/exclude
search over individual arcs) used to cross-check the solver on small finite
instances; it shares no enumeration code with ``solve``.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .errors import BudgetError, PreconditionError
from .instance import Instance, STEINER
from .metric import AMBIENT, EUCLIDEAN, EXPLICIT, GRAPH, RECTILINEAR
from .network import Network, Vertex, contract_zero_edges, prune_redundant_edges, simplify

DEFAULT_CEILING = 8
_LEVEL_GUARD = 5_000_000  # partial-union products before refusing


@dataclass(frozen=True)
class Topology:
    """An abstract wiring: labelled arcs over terminals and extra vertices."""

    m: int
    n: int
    steiner_count: int
    arcs: tuple[tuple[str, str], ...]
    canonical_code: str


@dataclass(frozen=True)
class SolveConfig:
    tolerance: float = 1e-9
    max_iterations: int = 10000
    smoothing_epsilon: float = 1e-12
    restarts: int = 1
    parallel: bool = False
    max_steiner: Optional[int] = None
    ceiling: int = DEFAULT_CEILING
    variant: Optional[str] = None  # all_pairs | point_to_point | None = from instance
    rng_seed: int = 0


@dataclass(frozen=True)
class Solution:
    network: Network
    length: float
    topology_count_examined: int
    status: str  # optimal_within_budget | oracle_exact
    converged: bool = True
    notes: tuple[str, ...] = ()


def steiner_count_bound(m: int, n: int) -> int:
    """Worst-case number of extra vertices a shortest network can need."""
    return m * n * (9 * (m + n) + 2)


# ---------------------------------------------------------------------
# topology enumeration


def _simple_path_masks(nv: int, bit: dict[tuple[int, int], int],
                       src: int, dst: int) -> list[int]:
    """Arc bitmasks of every simple path src -> dst in the complete digraph."""
    out: list[int] = []
    seen = [False] * nv
    seen[src] = True

    def walk(u: int, mask: int):
        if u == dst:
            out.append(mask)
            return
        for v in range(nv):
            if not seen[v]:
                seen[v] = True
                walk(v, mask | (1 << bit[(u, v)]))
                seen[v] = False

    walk(src, 0)
    return out


def _inclusion_minimal(masks: set[int]) -> list[int]:
    """Keep only masks with no strict subset in the set."""
    ordered = sorted(masks, key=lambda x: (bin(x).count("1"), x))
    kept: list[int] = []
    arr = np.zeros(len(ordered), dtype=np.uint64)
    count = 0
    for x in ordered:
        ux = np.uint64(x)
        if count and bool(np.any((arr[:count] & ux) == arr[:count])):
            continue
        arr[count] = ux
        kept.append(x)
        count += 1
    return kept


def _steiner_bit_perms(p: int, k: int, bit: dict[tuple[int, int], int],
                       arcs: list[tuple[int, int]]) -> list[list[int]]:
    """For each permutation of the extra vertices, the induced bit relabeling."""
    perms = []
    for sigma in itertools.permutations(range(k)):
        if sigma == tuple(range(k)):
            continue
        vmap = list(range(p)) + [p + s for s in sigma]
        table = [0] * len(arcs)
        for (u, v), b in bit.items():
            table[b] = bit[(vmap[u], vmap[v])]
        perms.append(table)
    return perms


def _canon_mask(mask: int, perm_tables: list[list[int]]) -> int:
    best = mask
    for table in perm_tables:
        y = 0
        x = mask
        while x:
            b = (x & -x).bit_length() - 1
            y |= 1 << table[b]
            x &= x - 1
        if y < best:
            best = y
    return best


_TOPO_CACHE: dict[tuple, tuple[tuple[tuple[int, int], ...], ...]] = {}


def _enumerate_index_topologies(p: int, k: int,
                                pairs: tuple[tuple[int, int], ...],
                                ceiling: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """All minimal digraphs over p terminals and k extra vertices connecting
    the index pairs, as sorted arc tuples, deduplicated up to renaming of
    the extra vertices.  Extra vertices are indices p .. p+k-1."""
    key = (p, k, pairs)
    if key in _TOPO_CACHE:
        return _TOPO_CACHE[key]
    nv = p + k
    if nv > ceiling:
        raise BudgetError(
            f"{nv} vertices exceeds the enumeration ceiling of {ceiling}; "
            f"the complete digraph has {nv * (nv - 1)} candidate arcs and "
            f"up to 2^{nv * (nv - 1)} arc subsets")
    if not pairs:
        _TOPO_CACHE[key] = ((),) if k == 0 else ()
        return _TOPO_CACHE[key]
    if len(pairs) == 1 and k >= 1:
        # A minimal net for one pair is a single simple path; its interior
        # vertices have exactly 2 neighbours, so no extra vertex survives.
        _TOPO_CACHE[key] = ()
        return _TOPO_CACHE[key]

    arcs = [(u, v) for u in range(nv) for v in range(nv) if u != v]
    bit = {a: i for i, a in enumerate(arcs)}
    perm_tables = _steiner_bit_perms(p, k, bit, arcs) if k >= 2 else []

    level: list[int] = [0]
    for (i, j) in pairs:
        pm = _simple_path_masks(nv, bit, i, j)
        if len(level) * len(pm) > _LEVEL_GUARD:
            raise BudgetError(
                f"topology search would form about {len(level) * len(pm)} "
                f"partial unions for {p} terminals and {k} extra vertices; "
                "lower the extra-vertex budget or the ceiling")
        merged = {_canon_mask(a | b, perm_tables) for a in level for b in pm}
        level = _inclusion_minimal(merged)

    out = []
    for mask in level:
        chosen = []
        used = set()
        nbrs: dict[int, set[int]] = {}
        x = mask
        while x:
            b = (x & -x).bit_length() - 1
            u, v = arcs[b]
            chosen.append((u, v))
            nbrs.setdefault(u, set()).add(v)
            nbrs.setdefault(v, set()).add(u)
            used.update((u, v))
            x &= x - 1
        # Every extra vertex must be present with >= 3 distinct neighbours;
        # otherwise the same net appears (shorter or equal) with fewer extras.
        if any(p + s not in used or len(nbrs[p + s]) < 3 for s in range(k)):
            continue
        out.append(tuple(sorted(chosen)))
    result = tuple(sorted(out))
    _TOPO_CACHE[key] = result
    return result


def enumerate_topologies(m: int, n: int, k: int,
                         pairs: Optional[Sequence[tuple[int, int]]] = None,
                         ceiling: int = DEFAULT_CEILING) -> tuple[Topology, ...]:
    """Candidate wirings for m sources, n sinks, and exactly k extra vertices.

    ``pairs`` are (source index, sink index) pairs; ``None`` means all m*n.
    Labels in the result are ``a0..``, ``b0..``, ``s0..``.
    """
    if pairs is None:
        idx = tuple((i, m + j) for i in range(m) for j in range(n))
    else:
        idx = tuple((i, m + j) for i, j in pairs)
    labels = [f"a{i}" for i in range(m)] + [f"b{j}" for j in range(n)] \
        + [f"s{s}" for s in range(k)]
    out = []
    for arcset in _enumerate_index_topologies(m + n, k, idx, ceiling):
        named = tuple(sorted((labels[u], labels[v]) for u, v in arcset))
        code = ";".join(f"{u}>{v}" for u, v in named)
        out.append(Topology(m, n, k, named, code))
    return tuple(out)


# ---------------------------------------------------------------------
# position optimization


@dataclass(frozen=True)
class PlacedTopology:
    """A wiring with concrete locations for its extra vertices."""

    topology: Topology
    steiner_locations: tuple
    length: float
    converged: bool


def _euclidean_once(arcs, fixed, snames, dim, start, config):
    """IRLS descent from one starting position matrix; returns (S, length, ok)."""
    sidx = {s: i for i, s in enumerate(snames)}
    k = len(snames)
    S = start.copy()

    def edge_vecs():
        pts = {}
        for lbl, loc in fixed.items():
            pts[lbl] = np.asarray(loc, dtype=float)
        for s, i in sidx.items():
            pts[s] = S[i]
        return [(u, v, pts[u], pts[v]) for u, v in arcs]

    def true_length():
        return math.fsum(float(np.linalg.norm(pu - pv))
                         for _, _, pu, pv in edge_vecs())

    span = max((float(np.linalg.norm(np.asarray(a) - np.asarray(b)))
                for a in fixed.values() for b in fixed.values()), default=1.0)
    span = max(span, 1e-9)
    delta = max(config.smoothing_epsilon, 1e-3 * span)
    floor = config.smoothing_epsilon
    move_tol = max(config.tolerance, 1e-15) * span
    it = 0
    ok = False
    while it < config.max_iterations:
        it += 1
        A = np.zeros((k, k))
        rhs = np.zeros((k, dim))
        for u, v, pu, pv in edge_vecs():
            d = float(np.linalg.norm(pu - pv))
            w = 1.0 / max(d, delta)
            iu, iv = sidx.get(u), sidx.get(v)
            if iu is not None and iv is not None:
                A[iu, iu] += w
                A[iv, iv] += w
                A[iu, iv] -= w
                A[iv, iu] -= w
            elif iu is not None:
                A[iu, iu] += w
                rhs[iu] += w * pv
            elif iv is not None:
                A[iv, iv] += w
                rhs[iv] += w * pu
        A += np.eye(k) * 1e-12
        new = np.linalg.solve(A, rhs)
        move = float(np.max(np.abs(new - S))) if k else 0.0
        S = new
        if move < max(move_tol, 0.5 * delta * 1e-3):
            if delta <= floor:
                ok = True
                break
            delta = max(floor, delta * 0.1)
    return S, true_length(), ok


def optimize_positions(topology: Topology, instance: Instance,
                       config: SolveConfig = SolveConfig(),
                       locations: Optional[dict] = None) -> PlacedTopology:
    """Place the extra vertices of one wiring to minimize total length.

    ``locations`` maps terminal labels to points; by default the instance's
    terminals in order (a0.., b0..).  The objective (total length as a
    function of the extra-vertex positions) is convex, so every descent from
    every start meets the same minimum length within tolerance.
    """
    space = instance.space
    if space.mode == AMBIENT:
        raise PreconditionError("ambient digraphs fix all locations; nothing to optimize")
    if locations is None:
        locations = {t.id: t.location for t in instance.terminals()}
    snames = sorted({x for arc in topology.arcs for x in arc} - set(locations),
                    key=lambda s: (len(s), s))
    fixed = dict(locations)
    k = len(snames)

    if k == 0:
        total = math.fsum(space.distance(locations[u], locations[v])
                          for u, v in sorted(topology.arcs))
        return PlacedTopology(topology, (), total, True)

    if space.mode == EUCLIDEAN:
        return _optimize_euclidean(topology, fixed, snames, space.dim, config)
    if space.mode == RECTILINEAR:
        return _optimize_rectilinear(topology, fixed, snames, space.dim, config)
    return _optimize_finite(topology, fixed, snames, space, config)


def _optimize_euclidean(topology, fixed, snames, dim, config):
    k = len(snames)
    term_pts = np.array([np.asarray(p, dtype=float) for p in fixed.values()])
    centroid = term_pts.mean(axis=0)
    lo = term_pts.min(axis=0)
    hi = term_pts.max(axis=0)
    span = float(np.max(hi - lo)) if len(term_pts) > 1 else 1.0
    span = max(span, 1e-9)

    starts = []
    # Deterministic first start: centroid with small distinct offsets so
    # coincident extra vertices can separate.
    base = np.stack([centroid + 1e-3 * span * _offset(i, dim) for i in range(k)])
    starts.append(base)
    rng = np.random.default_rng(config.rng_seed)
    for _ in range(max(0, config.restarts - 1)):
        starts.append(lo + rng.random((k, dim)) * np.maximum(hi - lo, 1e-9 * span))

    best = None
    for start in starts:
        S, length, ok = _euclidean_once(topology.arcs, fixed, snames, dim, start, config)
        cand = (length, tuple(tuple(float(c) for c in row) for row in S), ok)
        if best is None or cand[0] < best[0]:
            best = cand
    locs = tuple(best[1])
    return PlacedTopology(topology, locs, best[0], best[2])


def _offset(i: int, dim: int) -> np.ndarray:
    """Small deterministic direction, distinct per index."""
    v = np.zeros(dim)
    ang = 0.61803398875 * (i + 1) * 2 * math.pi
    v[0] = math.cos(ang)
    if dim > 1:
        v[1] = math.sin(ang)
    return v * (1.0 + 0.1 * i)


def _optimize_rectilinear(topology, fixed, snames, dim, config):
    """Exact: optimal coordinates per axis lie on terminal coordinate values,
    and axes separate, so try every assignment per axis."""
    k = len(snames)
    sidx = {s: i for i, s in enumerate(snames)}
    coords = np.zeros((k, dim))
    for axis in range(dim):
        values = sorted({float(p[axis]) for p in fixed.values()})
        if len(values) ** k > 2_000_000:
            raise BudgetError(
                f"rectilinear placement would try {len(values) ** k} assignments")
        best = None
        for assign in itertools.product(values, repeat=k):
            cost = 0.0
            for u, v in topology.arcs:
                cu = assign[sidx[u]] if u in sidx else float(fixed[u][axis])
                cv = assign[sidx[v]] if v in sidx else float(fixed[v][axis])
                cost += abs(cu - cv)
            if best is None or cost < best[0] - 1e-15:
                best = (cost, assign)
        for i in range(k):
            coords[i, axis] = best[1][i]
    pts = {lbl: tuple(float(c) for c in p) if not isinstance(p, tuple) else p
           for lbl, p in fixed.items()}
    for s, i in sidx.items():
        pts[s] = tuple(float(c) for c in coords[i])
    total = math.fsum(sum(abs(a - b) for a, b in zip(pts[u], pts[v]))
                      for u, v in sorted(topology.arcs))
    return PlacedTopology(topology, tuple(pts[s] for s in snames), total, True)


def _optimize_finite(topology, fixed, snames, space, config):
    """Assign each extra vertex to an unoccupied point; try all assignments."""
    k = len(snames)
    sidx = {s: i for i, s in enumerate(snames)}
    occupied = set(fixed.values())
    candidates = tuple(p for p in space.points if p not in occupied)
    if not candidates and k:
        raise BudgetError("no free points remain for extra vertices")
    if len(candidates) ** k > 2_000_000:
        raise BudgetError(
            f"finite placement would try {len(candidates) ** k} assignments")
    best = None
    for assign in itertools.product(candidates, repeat=k):
        pts = dict(fixed)
        for s, i in sidx.items():
            pts[s] = assign[i]
        total = math.fsum(space.distance(pts[u], pts[v])
                          for u, v in sorted(topology.arcs))
        if best is None or total < best[0]:
            best = (total, assign)
    return PlacedTopology(topology, best[1], best[0], True)


# ---------------------------------------------------------------------
# solving


def _build_network(instance: Instance, placed: PlacedTopology) -> Network:
    terms = instance.terminals()
    verts = [Vertex(t.id, t.role, t.location) for t in terms]
    used = {x for arc in placed.topology.arcs for x in arc}
    tids = {t.id for t in terms}
    snames = sorted(used - tids, key=lambda s: (len(s), s))
    for s, loc in zip(snames, placed.steiner_locations):
        verts.append(Vertex(s, STEINER, loc))
    return Network(instance.space, verts, placed.topology.arcs)


def _candidate_key(length: float, net: Network) -> tuple:
    return (length, len(net.edges), net.canonical_arcs())


def solve(instance: Instance, config: SolveConfig = SolveConfig()) -> Solution:
    """Shortest network connecting the instance's required pairs.

    Exact up to the configured budgets: every inclusion-minimal wiring with
    up to ``max_steiner`` extra vertices is examined.  The returned status is
    ``optimal_within_budget``; notes record any budget that actually bound.
    """
    if instance.space.mode == AMBIENT:
        return _solve_ambient(instance, config)
    pairs = instance.required_pairs(config.variant)
    terms = instance.terminals()
    tindex = {t.id: i for i, t in enumerate(terms)}
    idx_pairs = tuple(sorted((tindex[a], tindex[b]) for a, b in pairs))
    p = len(terms)
    notes = []

    bound = steiner_count_bound(len(instance.sources), len(instance.sinks))
    k_cap = bound
    if config.max_steiner is not None:
        k_cap = min(k_cap, config.max_steiner)
    if p + k_cap > config.ceiling:
        k_cap = max(0, config.ceiling - p)
        notes.append(f"extra-vertex budget capped at {k_cap} by the "
                     f"enumeration ceiling of {config.ceiling} vertices")
    if instance.space.mode in (EXPLICIT, GRAPH):
        spare = len(instance.space.points) - len({t.location for t in terms})
        if k_cap > spare:
            k_cap = spare  # no free points beyond this; duplicates never win

    labels = [t.id for t in terms] + [f"s{i}" for i in range(k_cap)]
    if not idx_pairs:
        net = Network(instance.space, [Vertex(t.id, t.role, t.location) for t in terms], [])
        return Solution(net, 0.0, 1, "optimal_within_budget", True, tuple(notes))

    examined = 0
    best = None  # (key, placed, converged)

    def consider(placed: PlacedTopology):
        nonlocal best
        net = _build_network(instance, placed)
        key = _candidate_key(placed.length, net)
        if best is None or key < best[0]:
            best = (key, placed, net)

    for k in range(k_cap + 1):
        arcsets = _enumerate_index_topologies(p, k, idx_pairs, config.ceiling)
        topos = []
        for arcset in arcsets:
            named = tuple(sorted((labels[u], labels[v]) for u, v in arcset))
            code = ";".join(f"{u}>{v}" for u, v in named)
            topos.append(Topology(instance.m, instance.n, k, named, code))
        if config.parallel and len(topos) > 1:
            with ThreadPoolExecutor() as pool:
                placed_list = list(pool.map(
                    lambda t: optimize_positions(t, instance, config), topos))
        else:
            placed_list = [optimize_positions(t, instance, config) for t in topos]
        for placed in placed_list:
            examined += 1
            consider(placed)

    if best is None:
        raise PreconditionError("no candidate topology found")

    net = best[2]
    span = _terminal_span(instance)
    net = contract_zero_edges(net, eps=1e-9 * span)
    net = simplify(net)
    net = prune_redundant_edges(net, pairs)
    converged = best[1].converged
    if not converged:
        notes.append("position optimization hit the iteration budget")
    return Solution(net, net.length(), examined, "optimal_within_budget",
                    converged, tuple(notes))


def _terminal_span(instance: Instance) -> float:
    if instance.space.mode in (EUCLIDEAN, RECTILINEAR):
        pts = [np.asarray(t.location, dtype=float) for t in instance.terminals()]
        if len(pts) > 1:
            arr = np.stack(pts)
            return max(float(np.max(arr.max(axis=0) - arr.min(axis=0))), 1e-9)
        return 1.0
    return instance.space.scale()


def solve_point_to_point(instance: Instance,
                         config: SolveConfig = SolveConfig()) -> Solution:
    """Solve with connectivity required only for the instance's pair list."""
    return solve(instance, replace(config, variant="point_to_point"))


# ---------------------------------------------------------------------
# ambient mode: choose a subset of the given arcs


def _closure_ok(nv: int, out_masks: list[int], pairs_idx) -> bool:
    """True when every required pair is joined by the given adjacency."""
    reach = list(out_masks)
    for _ in range(nv):
        changed = False
        for u in range(nv):
            r = reach[u]
            x = r
            acc = r
            while x:
                b = (x & -x).bit_length() - 1
                acc |= reach[b]
                x &= x - 1
            if acc != r:
                reach[u] = acc
                changed = True
        if not changed:
            break
    return all((reach[a] >> b) & 1 for a, b in pairs_idx)


def _solve_ambient(instance: Instance, config: SolveConfig) -> Solution:
    space = instance.space
    pairs = instance.required_pairs(config.variant)
    vids = list(space.points)
    vidx = {v: i for i, v in enumerate(vids)}
    nv = len(vids)
    pairs_idx = [(vidx[a], vidx[b]) for a, b in pairs]
    arcs = sorted(space.arcs)  # (u, v, w) lexicographic
    na = len(arcs)

    full = [0] * nv
    for u, v, _ in arcs:
        full[vidx[u]] |= 1 << vidx[v]
    if not _closure_ok(nv, full, pairs_idx):
        missing = next((a, b) for a, b in pairs
                       if not _reaches(nv, full, vidx[a], vidx[b]))
        raise PreconditionError(
            f"the ambient digraph has no path from {missing[0]} to {missing[1]}")

    # Initial bound: keep all arcs, then greedily drop redundant ones.
    init = _greedy_prune_arcs(nv, arcs, vidx, pairs_idx)
    best_len = math.fsum(w for _, _, w in init)
    best_set = tuple(sorted((u, v) for u, v, _ in init))
    examined = 1

    src_need = sorted({vidx[a] for a, _ in pairs})
    dst_need = sorted({vidx[b] for _, b in pairs})

    out_masks = [0] * nv
    included: list[int] = []

    def lower_bound(length: float, i: int) -> float:
        # Every needed source must shoot an arc out, every needed sink must
        # receive one; undecided arcs are the only way to fix a deficit.
        # One arc can fix at most one deficit on each side, so the two
        # repair costs combine by max, not sum.
        out_fix = 0.0
        for s in src_need:
            if not out_masks[s]:
                c = min((w for u, v, w in arcs[i:] if vidx[u] == s), default=None)
                if c is None:
                    return math.inf
                out_fix += c
        in_mask = 0
        for u in range(nv):
            in_mask |= out_masks[u]
        in_fix = 0.0
        for t in dst_need:
            if not ((in_mask >> t) & 1):
                c = min((w for u, v, w in arcs[i:] if vidx[v] == t), default=None)
                if c is None:
                    return math.inf
                in_fix += c
        return length + max(out_fix, in_fix)

    def dfs(i: int, length: float):
        nonlocal best_len, best_set, examined
        if length > best_len + 1e-15:
            return
        if _closure_ok(nv, out_masks, pairs_idx):
            examined += 1
            cand = tuple(sorted((arcs[a][0], arcs[a][1]) for a in included))
            key = (length, len(cand), cand)
            if key < (best_len, len(best_set), best_set):
                best_len, best_set = length, cand
            return
        if i == na:
            return
        if lower_bound(length, i) > best_len + 1e-15:
            return
        # feasibility: included plus everything still undecided
        avail = list(out_masks)
        for j in range(i, na):
            u, v, _ = arcs[j]
            avail[vidx[u]] |= 1 << vidx[v]
        if not _closure_ok(nv, avail, pairs_idx):
            return
        u, v, w = arcs[i]
        # exclude first: sparse candidates surface early
        dfs(i + 1, length)
        bitu, bitv = vidx[u], vidx[v]
        out_masks[bitu] |= 1 << bitv
        included.append(i)
        dfs(i + 1, length + w)
        included.pop()
        out_masks[bitu] &= ~(1 << bitv)  # arcs are unique, the bit was ours

    dfs(0, 0.0)

    roles = {t.id: t.role for t in instance.terminals()}
    used = {x for e in best_set for x in e}
    verts = [Vertex(t.id, t.role, t.location) for t in instance.terminals()]
    verts += [Vertex(v, STEINER, v) for v in sorted(used - set(roles))]
    net = Network(space, verts, best_set)
    net = prune_redundant_edges(net, pairs)
    return Solution(net, net.length(), examined, "optimal_within_budget")


def _reaches(nv: int, out_masks: list[int], a: int, b: int) -> bool:
    seen = 1 << a
    frontier = 1 << a
    while frontier:
        nxt = 0
        x = frontier
        while x:
            u = (x & -x).bit_length() - 1
            nxt |= out_masks[u]
            x &= x - 1
        frontier = nxt & ~seen
        seen |= nxt
    return bool((seen >> b) & 1)


def _greedy_prune_arcs(nv, arcs, vidx, pairs_idx):
    keep = list(arcs)
    for cand in list(arcs):
        trial = [a for a in keep if a is not cand]
        masks = [0] * nv
        for u, v, _ in trial:
            masks[vidx[u]] |= 1 << vidx[v]
        if _closure_ok(nv, masks, pairs_idx):
            keep = trial
    return keep


# ---------------------------------------------------------------------
# brute-force oracle (independent route, small finite instances only)


def brute_force_oracle(instance: Instance,
                       config: SolveConfig = SolveConfig()) -> Solution:
    """Certain optimum by include/exclude search over every possible arc.

    Only for finite metric spaces with at most 7 points.  Shares no
    enumeration machinery with ``solve``: arcs are decided one by one with
    length, feasibility, and degree-deficit pruning.
    """
    space = instance.space
    if space.mode not in (EXPLICIT, GRAPH):
        raise PreconditionError("the oracle needs a finite metric space")
    if len(space.points) > 7:
        raise BudgetError(
            f"{len(space.points)} points means "
            f"2^{len(space.points) * (len(space.points) - 1)} arc subsets; "
            "the oracle is limited to 7 points")
    pairs = instance.required_pairs(config.variant)
    vids = list(space.points)
    vidx = {v: i for i, v in enumerate(vids)}
    nv = len(vids)
    pairs_idx = [(vidx[a], vidx[b]) for a, b in pairs]

    D = {(u, v): space.distance(u, v) for u in vids for v in vids if u != v}
    arcs = sorted(((u, v) for u in vids for v in vids if u != v),
                  key=lambda e: (-D[e], e))
    na = len(arcs)

    if not pairs_idx:
        verts = [Vertex(t.id, t.role, t.location) for t in instance.terminals()]
        return Solution(Network(space, verts, []), 0.0, 1, "oracle_exact")

    # Feasible warm start: one direct arc per pair.
    direct = tuple(sorted({(a, b) for a, b in pairs}))
    best_len = math.fsum(D[e] for e in direct)
    best_set = direct
    examined = 1

    out_masks = [0] * nv
    included: list[tuple[str, str]] = []

    def dfs(i: int, length: float):
        nonlocal best_len, best_set, examined
        if length > best_len + 1e-15:
            return
        if _closure_ok(nv, out_masks, pairs_idx):
            examined += 1
            cand = tuple(sorted(included))
            key = (length, len(cand), cand)
            if key < (best_len, len(best_set), best_set):
                best_len, best_set = length, cand
            return
        if i == na:
            return
        avail = list(out_masks)
        for j in range(i, na):
            u, v = arcs[j]
            avail[vidx[u]] |= 1 << vidx[v]
        if not _closure_ok(nv, avail, pairs_idx):
            return
        u, v = arcs[i]
        dfs(i + 1, length)  # exclude branch first
        bu, bv = vidx[u], vidx[v]
        out_masks[bu] |= 1 << bv
        included.append((u, v))
        dfs(i + 1, length + D[(u, v)])
        included.pop()
        out_masks[bu] &= ~(1 << bv)

    dfs(0, 0.0)

    roles = {t.id: t.role for t in instance.terminals()}
    used = {x for e in best_set for x in e}
    verts = [Vertex(t.id, t.role, t.location) for t in instance.terminals()]
    verts += [Vertex(v, STEINER, v) for v in sorted(used - set(roles))]
    net = Network(space, verts, best_set)
    return Solution(net, net.length(), examined, "oracle_exact")
