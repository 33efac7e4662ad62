"""Canonical codes for rooted balls, whole graphs and Schreier actions.

Plain rooted graphs get the lexicographically minimal adjacency code over all
vertex orderings that respect an isomorphism-invariant colouring (distance to
the root, then iterated neighbour-colour refinement).  The search is exact
backtracking; it only skips branches that provably give the same or a larger
code (non-minimal rows, interchangeable twins).

Labeled balls need no search: the letters make the breadth-first traversal
from the root deterministic, so its numbering is already canonical.
"""

from __future__ import annotations

from typing import Sequence

from .graphs import BoundedDegreeGraph, GraphError, RootedBall, SchreierGraph, letters

PLAIN = b"G"
LABELED = b"S"


def _refine(nbrs: Sequence[set[int]], dist: Sequence[int]) -> list[int]:
    colour = [(dist[v], len(nbrs[v])) for v in range(len(nbrs))]
    ranks = _ranks(colour)
    while True:
        sig = [(ranks[v], tuple(sorted(ranks[u] for u in nbrs[v]))) for v in range(len(nbrs))]
        new = _ranks(sig)
        if len(set(new)) == len(set(ranks)):
            return new
        ranks = new


def _ranks(keys: list) -> list[int]:
    table = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [table[k] for k in keys]


def _min_adjacency_code(nbrs: Sequence[set[int]], root: int) -> tuple[tuple[int, ...], ...]:
    n = len(nbrs)
    dist = [-1] * n
    dist[root] = 0
    frontier = [root]
    while frontier:
        nxt = []
        for x in frontier:
            for y in nbrs[x]:
                if dist[y] < 0:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        frontier = nxt
    if min(dist) < 0:
        raise GraphError("rooted graph is not connected")
    colour = _refine(nbrs, dist)

    best: list[tuple[int, ...]] | None = None
    order: list[int] = []
    pos = [-1] * n
    rows: list[tuple[int, ...]] = []

    def search() -> None:
        nonlocal best
        j = len(order)
        if j == n:
            if best is None or rows < best:
                best = list(rows)
            return
        free = [v for v in range(n) if pos[v] < 0]
        c = min(colour[v] for v in free)
        scored = [
            (tuple(1 if order[i] in nbrs[v] else 0 for i in range(j)), v)
            for v in free
            if colour[v] == c
        ]
        low = min(row for row, _ in scored)
        if best is not None and rows == best[:j] and low > best[j]:
            return
        tried: list[int] = []
        for row, v in scored:
            if row != low:
                continue
            # swapping twins is an automorphism fixing everything already placed
            if any(_twins(nbrs, v, u) for u in tried):
                continue
            tried.append(v)
            order.append(v)
            pos[v] = j
            rows.append(row)
            search()
            rows.pop()
            pos[v] = -1
            order.pop()

    search()
    assert best is not None
    return tuple(best)


def _twins(nbrs: Sequence[set[int]], u: int, v: int) -> bool:
    return nbrs[u] - {v} == nbrs[v] - {u}


def _pack_rows(n: int, rows: Sequence[Sequence[int]]) -> bytes:
    bits = [b for row in rows for b in row]
    out = bytearray(PLAIN)
    out += n.to_bytes(2, "big")
    acc = 0
    for i, b in enumerate(bits):
        acc = (acc << 1) | b
        if i % 8 == 7:
            out.append(acc)
            acc = 0
    if len(bits) % 8:
        out.append(acc << (8 - len(bits) % 8))
    return bytes(out)


def canonical_code(b: RootedBall) -> bytes:
    """Canonical byte code of a rooted ball (plain or labeled)."""
    if b.labeled:
        return _labeled_code(b.n, b.d, b.moves(), b.root)
    nbrs = b.neighbors()
    rows = _min_adjacency_code(nbrs, b.root)
    return _pack_rows(b.n, rows)


def _labeled_code(n: int, d: int, moves: Sequence[dict[int, int]], root: int) -> bytes:
    ls = letters(d)
    index = {root: 0}
    order = [root]
    out = bytearray(LABELED)
    out.append(d)
    body = bytearray()
    i = 0
    while i < len(order):
        x = order[i]
        for ell in ls:
            y = moves[x].get(ell)
            if y is None:
                body += b"\x00\x00"
                continue
            if y not in index:
                index[y] = len(order)
                order.append(y)
            body += (index[y] + 1).to_bytes(2, "big")
        i += 1
    if len(order) != n:
        raise GraphError("labeled ball is not connected")
    out += n.to_bytes(2, "big")
    out += body
    return bytes(out)


def decode_code(code: bytes) -> RootedBall:
    """Rebuild the (canonically numbered) ball from its code; root is 0."""
    kind = code[:1]
    if kind == PLAIN:
        n = int.from_bytes(code[1:3], "big")
        bits = []
        for byte in code[3:]:
            bits.extend((byte >> (7 - k)) & 1 for k in range(8))
        edges = set()
        p = 0
        for j in range(n):
            for i in range(j):
                if bits[p]:
                    edges.add((i, j))
                p += 1
        b = RootedBall(n, 0, 0, edges=frozenset(edges))
        return RootedBall(n, 0, max(b.distances()), edges=b.edges)
    if kind == LABELED:
        d = code[1]
        n = int.from_bytes(code[2:4], "big")
        ls = letters(d)
        arcs = set()
        p = 4
        for x in range(n):
            for ell in ls:
                t = int.from_bytes(code[p : p + 2], "big")
                p += 2
                if t:
                    arcs.add((x, ell, t - 1))
        b = RootedBall(n, 0, 0, arcs=frozenset(arcs), d=d)
        return RootedBall(n, 0, max(b.distances()), arcs=b.arcs, d=d)
    raise ValueError(f"unknown code kind {kind!r}")


def graph_code(g: BoundedDegreeGraph) -> bytes:
    """Canonical code of an unrooted, possibly disconnected graph."""
    parts = sorted(_component_codes(g))
    out = bytearray(b"U")
    out += len(parts).to_bytes(2, "big")
    for c in parts:
        out += len(c).to_bytes(2, "big") + c
    return bytes(out)


def _components(nbrs: Sequence[Sequence[int]]) -> list[list[int]]:
    seen = [False] * len(nbrs)
    comps = []
    for s in range(len(nbrs)):
        if seen[s]:
            continue
        seen[s] = True
        comp = [s]
        i = 0
        while i < len(comp):
            for y in nbrs[comp[i]]:
                if not seen[y]:
                    seen[y] = True
                    comp.append(y)
            i += 1
        comps.append(sorted(comp))
    return comps


def _component_codes(g: BoundedDegreeGraph) -> list[bytes]:
    codes = []
    for comp in _components(g.adjacency):
        index = {v: i for i, v in enumerate(comp)}
        nbrs = [{index[u] for u in g.adjacency[v]} for v in comp]
        # roots restricted to the smallest refinement class
        colour = _refine(nbrs, [0] * len(comp))
        c0 = min(colour)
        best = min(
            _pack_rows(len(comp), _min_adjacency_code(nbrs, root))
            for root in range(len(comp))
            if colour[root] == c0
        )
        codes.append(best)
    return codes


def action_code(g: SchreierGraph) -> bytes:
    """Canonical form of a Schreier graph up to simultaneous conjugacy."""
    ls = letters(g.d)
    nbrs = [[g.act(ell, x) for ell in ls] for x in range(g.n)]
    moves = [{ell: g.act(ell, x) for ell in ls} for x in range(g.n)]
    parts = []
    for comp in _components(nbrs):
        parts.append(min(_labeled_code_sub(g.d, moves, root, len(comp)) for root in comp))
    parts.sort()
    out = bytearray(b"A")
    out.append(g.d)
    out += len(parts).to_bytes(2, "big")
    for c in parts:
        out += len(c).to_bytes(2, "big") + c
    return bytes(out)


def _labeled_code_sub(d: int, moves, root: int, size: int) -> bytes:
    ls = letters(d)
    index = {root: 0}
    order = [root]
    body = bytearray()
    i = 0
    while i < len(order):
        x = order[i]
        for ell in ls:
            y = moves[x][ell]
            if y not in index:
                index[y] = len(order)
                order.append(y)
            body += (index[y] + 1).to_bytes(2, "big")
        i += 1
    return size.to_bytes(2, "big") + bytes(body)
