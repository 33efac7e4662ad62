"""Bounded-degree graphs, free-group Schreier graphs and rooted balls.

Letters of the free group F_d are encoded as nonzero integers: ``i`` is the
generator a_i and ``-i`` its inverse a_i^-1 (1 <= i <= d).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence


def letters(d: int) -> tuple[int, ...]:
    """Letters in slot order a_1..a_d, a_1^-1..a_d^-1."""
    return tuple(range(1, d + 1)) + tuple(-i for i in range(1, d + 1))


def letter_name(x: int) -> str:
    return f"a{x}" if x > 0 else f"a{-x}^-1"


class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class BoundedDegreeGraph:
    n: int
    adjacency: tuple[tuple[int, ...], ...]
    delta: int

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise GraphError("adjacency length does not match n")
        for v, nbrs in enumerate(self.adjacency):
            if len(nbrs) > self.delta:
                raise GraphError(f"vertex {v} has degree {len(nbrs)} > delta={self.delta}")
            if list(nbrs) != sorted(set(nbrs)):
                raise GraphError(f"neighbors of {v} are not sorted and distinct")
            for u in nbrs:
                if u == v:
                    raise GraphError(f"self-loop at {v}")
                if not 0 <= u < self.n or v not in self.adjacency[u]:
                    raise GraphError(f"asymmetric edge {v}-{u}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], delta: int | None = None):
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {u}-{v} out of range")
            nbrs[u].add(v)
            nbrs[v].add(u)
        adj = tuple(tuple(sorted(s)) for s in nbrs)
        if delta is None:
            delta = max((len(a) for a in adj), default=0)
        return cls(n, adj, delta)

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def relabel(self, perm: Sequence[int]) -> "BoundedDegreeGraph":
        """Graph with vertex ``v`` renamed ``perm[v]``."""
        return BoundedDegreeGraph.from_edges(
            self.n, [(perm[u], perm[v]) for u, v in self.edges()], self.delta
        )

    def disjoint_union(self, other: "BoundedDegreeGraph") -> "BoundedDegreeGraph":
        shift = self.n
        edges = self.edges() + [(u + shift, v + shift) for u, v in other.edges()]
        return BoundedDegreeGraph.from_edges(self.n + other.n, edges, max(self.delta, other.delta))


@dataclass(frozen=True)
class SchreierGraph:
    """Action of F_d on {0..n-1}; ``perms[i-1][x]`` is a_i . x."""

    n: int
    d: int
    perms: tuple[tuple[int, ...], ...]
    _inv: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.perms) != self.d:
            raise GraphError(f"expected {self.d} permutations, got {len(self.perms)}")
        report = validate_schreier(self.perms)
        if report is not None:
            raise GraphError(report)
        inv = []
        for p in self.perms:
            q = [0] * self.n
            for x, y in enumerate(p):
                q[y] = x
            inv.append(tuple(q))
        object.__setattr__(self, "_inv", tuple(inv))

    @classmethod
    def from_perms(cls, perms: Iterable[Sequence[int]]) -> "SchreierGraph":
        perms = tuple(tuple(p) for p in perms)
        if not perms:
            raise GraphError("need at least one generator")
        return cls(len(perms[0]), len(perms), perms)

    @classmethod
    def trivial(cls, d: int, n: int = 1) -> "SchreierGraph":
        return cls(n, d, tuple(tuple(range(n)) for _ in range(d)))

    def act(self, letter: int, x: int) -> int:
        if letter > 0:
            return self.perms[letter - 1][x]
        return self._inv[-letter - 1][x]

    def act_word(self, word: Sequence[int], x: int) -> int:
        # right-to-left: the last letter acts first
        for letter in reversed(word):
            x = self.act(letter, x)
        return x

    def relabel(self, perm: Sequence[int]) -> "SchreierGraph":
        """Simultaneous conjugation: vertex ``x`` becomes ``perm[x]``."""
        new = []
        for p in self.perms:
            q = [0] * self.n
            for x, y in enumerate(p):
                q[perm[x]] = perm[y]
            new.append(tuple(q))
        return SchreierGraph(self.n, self.d, tuple(new))

    def disjoint_union(self, other: "SchreierGraph") -> "SchreierGraph":
        if other.d != self.d:
            raise GraphError("generator counts differ")
        perms = tuple(
            p + tuple(y + self.n for y in q) for p, q in zip(self.perms, other.perms)
        )
        return SchreierGraph(self.n + other.n, self.d, perms)

    def labeling(self) -> dict[tuple[int, int], frozenset[int]]:
        """The edge labeling c(x, y) derived from the permutations."""
        c: dict[tuple[int, int], set[int]] = {}
        for x in range(self.n):
            for ell in letters(self.d):
                c.setdefault((x, self.act(ell, x)), set()).add(ell)
        return {e: frozenset(s) for e, s in c.items()}


def validate_schreier(g) -> str | None:
    """Return ``None`` if both Schreier axioms hold, else a violation message.

    ``g`` is a ``SchreierGraph`` or a raw sequence of maps (lists) on
    ``{0..n-1}``; the labeling is derived from the maps as in ``labeling``.
    """
    perms = [list(p) for p in (g.perms if isinstance(g, SchreierGraph) else g)]
    if not perms:
        return "no generators"
    n = len(perms[0])
    for i, p in enumerate(perms):
        if len(p) != n:
            return f"perms[{i}] has length {len(p)}, expected {n}"
        for x, y in enumerate(p):
            if not isinstance(y, int) or not 0 <= y < n:
                return f"axiom 2 (unique target): a{i + 1} maps {x} outside the vertex set"
    d = len(perms)
    out: dict[tuple[int, int], list[int]] = {}
    labels: dict[tuple[int, int], set[int]] = {}
    for i, p in enumerate(perms, start=1):
        for x, y in enumerate(p):
            out.setdefault((x, i), []).append(y)
            out.setdefault((y, -i), []).append(x)
            labels.setdefault((x, y), set()).add(i)
            labels.setdefault((y, x), set()).add(-i)
    for (x, y), c in labels.items():
        for ell in c:
            if -ell not in labels.get((y, x), ()):
                return f"axiom 1 (symmetry): {letter_name(ell)} on ({x},{y}) without inverse on ({y},{x})"
    for x in range(n):
        for ell in letters(d):
            targets = out.get((x, ell), [])
            if len(targets) != 1:
                return f"axiom 2 (unique target): {letter_name(ell)} at {x} has targets {sorted(targets)}"
    return None


@dataclass(frozen=True)
class RootedBall:
    """Rooted ball; ``arcs`` is ``None`` for plain graphs.

    Plain balls store undirected ``edges`` as pairs ``(u, v)`` with ``u < v``.
    Labeled balls store ``arcs`` ``(x, letter, y)`` meaning letter . x = y; the
    inverse arc ``(y, -letter, x)`` is always present.
    """

    n: int
    root: int
    radius: int
    edges: frozenset = frozenset()
    arcs: frozenset | None = None
    d: int = 0

    @property
    def labeled(self) -> bool:
        return self.arcs is not None

    def neighbors(self) -> list[set[int]]:
        nb: list[set[int]] = [set() for _ in range(self.n)]
        if self.arcs is None:
            for u, v in self.edges:
                nb[u].add(v)
                nb[v].add(u)
        else:
            for x, _, y in self.arcs:
                if x != y:
                    nb[x].add(y)
                    nb[y].add(x)
        return nb

    def moves(self) -> list[dict[int, int]]:
        mv: list[dict[int, int]] = [{} for _ in range(self.n)]
        for x, ell, y in self.arcs or ():
            mv[x][ell] = y
        return mv

    def distances(self) -> list[int]:
        return _bfs_dist(self.neighbors(), self.root)

    def check(self) -> None:
        """Raise ``GraphError`` unless the ball is well formed."""
        if not 0 <= self.root < self.n:
            raise GraphError("root out of range")
        dist = self.distances()
        if any(t < 0 or t > self.radius for t in dist):
            raise GraphError("vertex farther than the radius from the root")
        if self.arcs is not None:
            seen = set()
            for x, ell, y in self.arcs:
                if (y, -ell, x) not in self.arcs:
                    raise GraphError(f"label symmetry fails on ({x},{y})")
                if (x, ell) in seen:
                    raise GraphError(f"two {letter_name(ell)}-arcs leave {x}")
                seen.add((x, ell))


def _bfs_dist(nbrs: Sequence[Iterable[int]], root: int, limit: int | None = None) -> list[int]:
    dist = [-1] * len(nbrs)
    dist[root] = 0
    queue = deque([root])
    while queue:
        x = queue.popleft()
        if limit is not None and dist[x] >= limit:
            continue
        for y in nbrs[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def ball(g: BoundedDegreeGraph, v: int, r: int) -> RootedBall:
    """Induced radius-``r`` ball of ``g`` rooted at ``v``."""
    if not 0 <= v < g.n:
        raise GraphError(f"vertex {v} out of range")
    if r < 0:
        raise GraphError("radius must be nonnegative")
    dist = _bfs_dist(g.adjacency, v, r)
    verts = [u for u in range(g.n) if dist[u] >= 0]
    index = {u: i for i, u in enumerate(verts)}
    edges = frozenset(
        (index[u], index[w]) for u in verts for w in g.adjacency[u] if w in index and u < w
    )
    return RootedBall(len(verts), index[v], r, edges=edges)


def schreier_ball(g: SchreierGraph, v: int, r: int) -> RootedBall:
    """Induced radius-``r`` edge-labeled ball of ``g`` rooted at ``v``."""
    if not 0 <= v < g.n:
        raise GraphError(f"vertex {v} out of range")
    if r < 0:
        raise GraphError("radius must be nonnegative")
    ls = letters(g.d)
    nbrs = [[g.act(ell, x) for ell in ls] for x in range(g.n)]
    dist = _bfs_dist(nbrs, v, r)
    verts = [u for u in range(g.n) if dist[u] >= 0]
    index = {u: i for i, u in enumerate(verts)}
    arcs = frozenset(
        (index[x], ell, index[y])
        for x in verts
        for ell in ls
        if (y := g.act(ell, x)) in index
    )
    return RootedBall(len(verts), index[v], r, arcs=arcs, d=g.d)
