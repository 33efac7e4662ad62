"""Codecs between bounded-degree graphs and free-group Schreier graphs.

``encode_graph``: a graph becomes an F_2 action on its directed edges
(a rotates the out-edges at the source, b reverses the edge).

``encode_schreier``: an F_d action becomes a max-degree-3 graph: each vertex
is a 2d-cycle of slots, and each a_i-edge x -> y is a gadget path from slot
x_{a_i} to slot y_{a_i^-1} of length 2d+2, with a pendant path of i vertices
hanging off the path vertex next to the target.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .graphs import BoundedDegreeGraph, GraphError, SchreierGraph, letters

OrderingPolicy = Callable[[int, Sequence[int]], Sequence[int]]


def ascending_order(v: int, targets: Sequence[int]) -> list[int]:
    return sorted(targets)


def directed_edges(g: BoundedDegreeGraph) -> list[tuple[int, int]]:
    return [(u, v) for u in range(g.n) for v in g.adjacency[u]]


def encode_graph(g: BoundedDegreeGraph, policy: OrderingPolicy = ascending_order) -> SchreierGraph:
    """F_2 Schreier graph on the directed edges of ``g`` (vertex i = ``directed_edges(g)[i]``)."""
    isolated = [v for v in range(g.n) if not g.adjacency[v]]
    if isolated:
        raise GraphError(f"isolated vertices {isolated} cannot be encoded")
    darts = directed_edges(g)
    index = {e: i for i, e in enumerate(darts)}
    a = [0] * len(darts)
    for u in range(g.n):
        cyc = list(policy(u, g.adjacency[u]))
        if sorted(cyc) != list(g.adjacency[u]):
            raise GraphError(f"ordering policy is not a cyclic order of the out-edges at {u}")
        for j, v in enumerate(cyc):
            a[index[(u, v)]] = index[(u, cyc[(j + 1) % len(cyc)])]
    b = [index[(v, u)] for u, v in darts]
    return SchreierGraph(len(darts), 2, (tuple(a), tuple(b)))


def _empty_graph(delta: int) -> BoundedDegreeGraph:
    return BoundedDegreeGraph(0, (), delta)


def decode_schreier(g: SchreierGraph, delta: int) -> tuple[BoundedDegreeGraph, Fraction]:
    """Graph on the good a-cycles of an F_2 action, joined along b-2-cycles.

    A good a-cycle has length <= delta and each of its vertices is swapped by
    b with a vertex outside the cycle.
    """
    if g.d != 2:
        raise GraphError("decode_schreier expects an F_2 action")
    if g.n == 0:
        return _empty_graph(delta), Fraction(1)
    a, b = g.perms
    cycle_of = [-1] * g.n
    cycles: list[list[int]] = []
    for s in range(g.n):
        if cycle_of[s] >= 0:
            continue
        cyc = [s]
        cycle_of[s] = len(cycles)
        x = a[s]
        while x != s:
            cycle_of[x] = len(cycles)
            cyc.append(x)
            x = a[x]
        cycles.append(cyc)
    good = []
    for ci, cyc in enumerate(cycles):
        if len(cyc) > delta:
            continue
        if all(b[x] != x and b[b[x]] == x and cycle_of[b[x]] != ci for x in cyc):
            good.append(ci)
    if not good:
        return _empty_graph(delta), Fraction(1)
    vid = {ci: i for i, ci in enumerate(good)}
    edges = set()
    for ci in good:
        for x in cycles[ci]:
            cj = cycle_of[b[x]]
            if cj in vid:
                edges.add((min(vid[ci], vid[cj]), max(vid[ci], vid[cj])))
    covered = sum(len(cycles[ci]) for ci in good)
    return (
        BoundedDegreeGraph.from_edges(len(good), sorted(edges), delta),
        Fraction(g.n - covered, g.n),
    )


@dataclass(frozen=True)
class GadgetLayout:
    """Gadget shape for F_d; ``pendants[i-1]`` is the pendant length marking a_i."""

    d: int
    pendants: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.pendants:
            object.__setattr__(self, "pendants", tuple(range(1, self.d + 1)))
        if len(self.pendants) != self.d or len(set(self.pendants)) != self.d or min(self.pendants) < 1:
            raise ValueError("pendant lengths must be d distinct positive integers")

    @property
    def path_length(self) -> int:
        return 2 * self.d + 2

    def gadget_size(self, i: int) -> int:
        """Vertices of the a_i gadget excluding its two endpoints."""
        return 2 * self.d + 1 + self.pendants[i - 1]

    @property
    def block_size(self) -> int:
        return 2 * self.d + sum(self.gadget_size(i) for i in range(1, self.d + 1))


def encode_schreier(g: SchreierGraph, layout: GadgetLayout | None = None) -> BoundedDegreeGraph:
    d = g.d
    if d < 2:
        raise GraphError("encode_schreier needs d >= 2")
    layout = layout or GadgetLayout(d)
    if layout.d != d:
        raise GraphError("layout generator count does not match")
    ls = letters(d)
    B = layout.block_size
    edges: list[tuple[int, int]] = []

    def slot(x: int, ell: int) -> int:
        return x * B + ls.index(ell)

    for x in range(g.n):
        base = x * B
        for s in range(2 * d):
            edges.append((base + s, base + (s + 1) % (2 * d)))
        nxt = base + 2 * d
        for i in range(1, d + 1):
            path = [slot(x, i)] + list(range(nxt, nxt + 2 * d + 1)) + [slot(g.act(i, x), -i)]
            nxt += 2 * d + 1
            edges.extend(zip(path, path[1:]))
            pendant = [path[-2]] + list(range(nxt, nxt + layout.pendants[i - 1]))
            nxt += layout.pendants[i - 1]
            edges.extend(zip(pendant, pendant[1:]))
    return BoundedDegreeGraph.from_edges(g.n * B, edges, 3)


# ------------------------------------------------------------------ decoding


def _cycles_of_length(adj: Sequence[Sequence[int]], length: int) -> list[tuple[int, ...]]:
    """Simple cycles of the given length, each once, as vertex tuples from their minimum."""
    out = set()
    n = len(adj)
    for s in range(n):
        stack = [(s, (s,))]
        while stack:
            x, path = stack.pop()
            if len(path) == length:
                if s in adj[x]:
                    cyc = path if path[1] < path[-1] else (path[0],) + tuple(reversed(path[1:]))
                    out.add(cyc)
                continue
            for y in adj[x]:
                if y > s and y not in path:
                    stack.append((y, path + (y,)))
    return sorted(out)


def _pendant(adj, start: int, prev: int, dmax: int) -> list[int] | None:
    """Path start, ... ending in a leaf through degree-2 vertices, at most dmax long."""
    path = [start]
    x, p = start, prev
    while True:
        if len(path) > dmax:
            return None
        nb = [y for y in adj[x] if y != p]
        if len(adj[x]) == 1:
            return path
        if len(adj[x]) != 2:
            return None
        p, x = x, nb[0]
        path.append(x)


def _trace_gadget(adj, c: int, u: int, d: int):
    """Follow the gadget leaving cycle vertex ``c`` through ``u``.

    Returns ``(i, role, far_end, vertices)`` with role "out" when ``c`` is the
    source end and "in" when it is the target end, or ``None``.
    """
    plen = 2 * d + 1

    def junction(pre: int, came_from: int):
        others = [y for y in adj[pre] if y != came_from]
        if len(adj[pre]) != 3 or len(others) != 2:
            return None
        options = []
        for q, other in ((others[0], others[1]), (others[1], others[0])):
            pend = _pendant(adj, q, pre, d)
            if pend is not None:
                options.append((pend, other))
        if len(options) != 1:
            return None
        return options[0]

    if len(adj[u]) == 2:
        path = [u]
        x, p = u, c
        while len(path) < plen:
            nb = [y for y in adj[x] if y != p]
            if len(adj[x]) != 2 or len(nb) != 1:
                return None
            p, x = x, nb[0]
            path.append(x)
        got = junction(path[-1], path[-2])
        if got is None:
            return None
        pend, far = got
        verts = path + pend
        role = "out"
    elif len(adj[u]) == 3:
        got = junction(u, c)
        if got is None:
            return None
        pend, nxt = got
        path = [u]
        x, p = nxt, u
        path.append(x)
        while len(path) < plen:
            nb = [y for y in adj[x] if y != p]
            if len(adj[x]) != 2 or len(nb) != 1:
                return None
            p, x = x, nb[0]
            path.append(x)
        nb = [y for y in adj[x] if y != p]
        if len(adj[x]) != 2 or len(nb) != 1:
            return None
        far = nb[0]
        verts = path + pend
        role = "in"
    else:
        return None
    if len(set(verts)) != len(verts) or c in verts or far in verts:
        return None
    return len(pend), role, far, frozenset(verts)


def decode_graph(h: BoundedDegreeGraph, d: int) -> tuple[SchreierGraph, Fraction]:
    """F_d action on the good 2d-cycles of ``h``, completed to a full action."""
    if d < 2:
        raise GraphError("decode_graph needs d >= 2")
    empty = SchreierGraph(0, d, tuple(() for _ in range(d)))
    if h.n == 0:
        return empty, Fraction(1)
    adj = h.adjacency
    want = {(i, role) for i in range(1, d + 1) for role in ("out", "in")}
    good: list[dict] = []
    used: set[int] = set()
    for cyc in _cycles_of_length(adj, 2 * d):
        cset = set(cyc)
        if cset & used:
            continue
        slots = {}
        for c in cyc:
            outside = [y for y in adj[c] if y not in cset]
            if len(outside) != 1:
                break
            gad = _trace_gadget(adj, c, outside[0], d)
            if gad is None:
                break
            i, role, far, verts = gad
            if (i, role) in slots or (i, role) not in want:
                break
            slots[(i, role)] = (c, far, verts)
        else:
            if set(slots) == want:
                good.append({"verts": cset, "slots": slots})
                used |= cset
    if not good:
        return empty, Fraction(1)
    block_of = {}
    for bi, blk in enumerate(good):
        for v in blk["verts"]:
            block_of[v] = bi
    n = len(good)
    perms = []
    for i in range(1, d + 1):
        sigma: dict[int, int] = {}
        for bi, blk in enumerate(good):
            c, far, verts = blk["slots"][(i, "out")]
            bj = block_of.get(far)
            if bj is None:
                continue
            c2, far2, verts2 = good[bj]["slots"][(i, "in")]
            if c2 == far and far2 == c and verts2 == verts:
                sigma[bi] = bj
        missing_out = [x for x in range(n) if x not in sigma]
        missing_in = sorted(set(range(n)) - set(sigma.values()))
        assert len(missing_out) == len(missing_in), "unequal missing a_i out/in counts"
        for x, y in zip(missing_out, missing_in):
            sigma[x] = y
        perms.append(tuple(sigma[x] for x in range(n)))
    covered = set()
    for blk in good:
        covered |= blk["verts"]
        for c, far, verts in blk["slots"].values():
            covered |= verts
    return SchreierGraph(n, d, tuple(perms)), Fraction(h.n - len(covered), h.n)
