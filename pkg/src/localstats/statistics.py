"""Neighborhood statistics, the d_inf metric, and ball / graph catalogs."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Iterator, Mapping

from .canon import canonical_code, decode_code, graph_code
from .freegroup import (
    ResourceCapExceeded,
    _partial_actions,
    enumerate_pseudo_subgroups,
    pseudo_to_ball,
)
from .graphs import BoundedDegreeGraph, GraphError, SchreierGraph, ball, schreier_ball

GRAPH = "graph"
SCHREIER = "schreier"


@dataclass(frozen=True)
class StatVector:
    """Sparse exact distribution of rooted-ball types.

    ``param`` is the generator count d for Schreier statistics and is ignored
    (kept as the source graph's degree cap) for plain graphs.
    """

    kind: str
    r: int
    entries: Mapping[bytes, Fraction]
    param: int = 0

    def __getitem__(self, code: bytes) -> Fraction:
        return self.entries.get(code, Fraction(0))

    def total(self) -> Fraction:
        return sum(self.entries.values(), Fraction(0))

    def support(self) -> list[bytes]:
        return sorted(self.entries)

    def check(self) -> None:
        if any(x < 0 or x > 1 for x in self.entries.values()):
            raise ValueError("entry outside [0, 1]")
        if self.total() != 1:
            raise ValueError(f"entries sum to {self.total()}, not 1")
        for code in self.entries:
            b = decode_code(code)
            if b.radius > self.r:
                raise ValueError("ball type has radius larger than r")
            if b.labeled != (self.kind == SCHREIER):
                raise ValueError("ball type does not match the index kind")


def _vector(kind: str, r: int, codes: list[bytes], param: int) -> StatVector:
    n = len(codes)
    counts = Counter(codes)
    return StatVector(kind, r, {c: Fraction(k, n) for c, k in sorted(counts.items())}, param)


def neighborhood_stats(g: BoundedDegreeGraph, r: int) -> StatVector:
    if g.n == 0:
        raise GraphError("statistics of the empty graph are undefined")
    return _vector(GRAPH, r, [canonical_code(ball(g, v, r)) for v in range(g.n)], g.delta)


def schreier_stats(g: SchreierGraph, r: int) -> StatVector:
    return _vector(SCHREIER, r, [canonical_code(schreier_ball(g, v, r)) for v in range(g.n)], g.d)


def stat_distance(x: StatVector, y: StatVector) -> Fraction:
    """Exact d_inf distance."""
    if x.kind != y.kind or x.r != y.r or (x.kind == SCHREIER and x.param != y.param):
        raise ValueError("statistics vectors have different parameters")
    keys = set(x.entries) | set(y.entries)
    return max((abs(x[c] - y[c]) for c in keys), default=Fraction(0))


# ------------------------------------------------------------------ catalogs


@dataclass(frozen=True)
class BallCatalog:
    kind: str
    params: tuple[int, int]
    codes: tuple[bytes, ...]
    partial: bool = False
    _pos: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_pos", {c: i for i, c in enumerate(self.codes)})

    def __len__(self):
        return len(self.codes)

    def __contains__(self, code):
        return code in self._pos

    def position(self, code: bytes) -> int:
        return self._pos[code]


def enumerate_balls(delta: int, r: int, cap: int) -> BallCatalog:
    """Rooted graphs with max degree <= delta, radius <= r, at most ``cap`` vertices.

    Orderly generation: vertices are added in breadth-first order, each new
    vertex joined to a nonempty set of earlier vertices at distances t-1
    (at least one) and t, never lowering an earlier distance.  Removing the
    last vertex of a breadth-first order keeps all distances, so every type
    is reached from a smaller one; duplicates are removed by canonical code.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    # state: (n, adjacency sets, dist)
    level = {canonical_code(_as_ball([set()], 0)): ([set()], [0])}
    seen = set(level)
    partial = False
    while level:
        nxt = {}
        for adj, dist in level.values():
            for new_adj, new_dist in _extensions(adj, dist, delta, r):
                if len(new_adj) > cap:
                    partial = True
                    break
                code = canonical_code(_as_ball(new_adj, max(new_dist)))
                if code not in seen:
                    seen.add(code)
                    nxt[code] = (new_adj, new_dist)
        level = nxt
    return BallCatalog("graph", (delta, r), tuple(sorted(seen)), partial)


def _as_ball(adj, radius):
    from .graphs import RootedBall

    edges = frozenset((u, v) for u in range(len(adj)) for v in adj[u] if u < v)
    return RootedBall(len(adj), 0, radius, edges=edges)


def _extensions(adj, dist, delta, r):
    n = len(adj)
    tmax = max(dist)
    for t in (tmax, tmax + 1):
        if t == 0 or t > r:
            continue
        parents = [u for u in range(n) if dist[u] == t - 1 and len(adj[u]) < delta]
        peers = [u for u in range(n) if dist[u] == t and len(adj[u]) < delta]
        pool = parents + peers
        for mask in range(1, 1 << len(pool)):
            chosen = [pool[i] for i in range(len(pool)) if mask >> i & 1]
            if len(chosen) > delta or not any(dist[u] == t - 1 for u in chosen):
                continue
            new_adj = [set(a) for a in adj] + [set(chosen)]
            for u in chosen:
                new_adj[u].add(n)
            yield new_adj, dist + [t]


def enumerate_schreier_balls(d: int, r: int, cap: int | None = 200_000) -> BallCatalog:
    """Schreier-realizable radius-r labeled balls (one per pseudo-subgroup of W_d(2r+1))."""
    if d < 1:
        raise ValueError("d must be at least 1")
    subs = enumerate_pseudo_subgroups(d, 2 * r + 1, cap)
    codes = sorted({canonical_code(pseudo_to_ball(s, r)) for s in subs})
    return BallCatalog("schreier", (d, r), tuple(codes))


def count_schreier_balls(d: int, r: int, cap: int | None = 2_000_000) -> int:
    """|catalog(d, r)| without materializing it.

    Interior decisions are enumerated; at the boundary the remaining choice for
    each generator a_i is a partial injection from boundary vertices with a free
    a_i slot to boundary vertices with a free a_i^-1 slot.
    """
    total = 0
    for moves in _partial_actions(d, r, False, cap):
        dist = _labeled_dist(moves)
        term = 1
        for i in range(1, d + 1):
            p = sum(1 for x, m in enumerate(moves) if dist[x] == r and m.get(i) == -1)
            q = sum(1 for x, m in enumerate(moves) if dist[x] == r and m.get(-i) == -1)
            term *= sum(comb(p, j) * comb(q, j) * factorial(j) for j in range(min(p, q) + 1))
        total += term
    return total


def _labeled_dist(moves) -> list[int]:
    dist = [-1] * len(moves)
    dist[0] = 0
    order = [0]
    for x in order:
        for y in moves[x].values():
            if y >= 0 and dist[y] < 0:
                dist[y] = dist[x] + 1
                order.append(y)
    return dist


# ------------------------------------------------------------ whole graphs


def enumerate_connected_graphs(delta: int, max_n: int) -> dict[int, list[BoundedDegreeGraph]]:
    """Connected graphs with max degree <= delta, by vertex count, up to isomorphism.

    Every connected graph on n+1 vertices arises from a connected graph on n
    vertices by adding one vertex (a leaf of a spanning tree) joined to a
    nonempty set of old vertices.
    """
    out: dict[int, list[BoundedDegreeGraph]] = {}
    if max_n < 1:
        return out
    level = {graph_code(BoundedDegreeGraph(1, ((),), delta)): BoundedDegreeGraph(1, ((),), delta)}
    out[1] = [level[c] for c in sorted(level)]
    for n in range(2, max_n + 1):
        nxt: dict[bytes, BoundedDegreeGraph] = {}
        for g in level.values():
            room = [u for u in range(g.n) if g.degree(u) < delta]
            for mask in range(1, 1 << len(room)):
                chosen = [room[i] for i in range(len(room)) if mask >> i & 1]
                if len(chosen) > delta:
                    continue
                h = BoundedDegreeGraph.from_edges(
                    n, g.edges() + [(u, n - 1) for u in chosen], delta
                )
                code = graph_code(h)
                if code not in nxt:
                    nxt[code] = h
        level = nxt
        out[n] = [level[c] for c in sorted(level)]
    return out


def enumerate_graphs(delta: int, max_n: int) -> Iterator[BoundedDegreeGraph]:
    """All graphs (connected or not) with max degree <= delta and 1..max_n vertices.

    Fixed order: ascending vertex count, then ascending canonical code.
    """
    conn = enumerate_connected_graphs(delta, max_n)
    comps = [(n, g) for n in sorted(conn) for g in conn[n]]
    for n in range(1, max_n + 1):
        found: dict[bytes, BoundedDegreeGraph] = {}
        for parts in _multisets(comps, n, 0):
            g = parts[0]
            for h in parts[1:]:
                g = g.disjoint_union(h)
            g = BoundedDegreeGraph(g.n, g.adjacency, delta)
            found[graph_code(g)] = g
        for code in sorted(found):
            yield found[code]


def _multisets(comps, n, start):
    if n == 0:
        yield []
        return
    for i in range(start, len(comps)):
        size, g = comps[i]
        if size > n:
            continue
        for rest in _multisets(comps, n - size, i):
            yield [g] + rest
