"""Oracle-driven decision procedures, epsilon-nets, and bound transfers between
the sparse and Schreier settings.

Genuine regularity bounds cannot be computed, so every function here takes a
caller-supplied oracle and records how far its answer can be trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .encodings import GadgetLayout, decode_graph, decode_schreier
from .freegroup import ResourceCapExceeded
from .graphs import BoundedDegreeGraph, SchreierGraph
from .lp import as_rational
from .localtests import count_schreier_graphs, enumerate_schreier_graphs
from .pirs import Region
from .statistics import (
    GRAPH,
    SCHREIER,
    StatVector,
    enumerate_balls,
    enumerate_graphs,
    neighborhood_stats,
    schreier_stats,
    stat_distance,
)

SPARSE = "sparse"

YES, NO, UNKNOWN = "yes", "no", "unknown"


@dataclass
class BoundOracle:
    """Caller-supplied size bound N(eps, r); ``kind`` is "sparse" or "schreier"."""

    fn: Callable[[Fraction, int], int]
    kind: str = SPARSE
    trust: str = "declared"
    param: int = 3  # degree cap for sparse oracles, generator count for Schreier ones

    def __call__(self, eps, r: int) -> int:
        n = int(self.fn(as_rational(eps), r))
        if n < 1:
            raise ValueError(f"oracle returned {n}; bounds must be >= 1")
        return n

    @classmethod
    def constant(cls, n: int, kind: str = SPARSE, trust: str = "stub", param: int = 3):
        return cls(lambda eps, r: n, kind, trust, param)


@dataclass
class LsdfAnswer:
    status: str
    witness: BoundedDegreeGraph | None = None
    cap: int | None = None
    graphs_scanned: int = 0

    def __bool__(self):
        return self.status == YES


@dataclass
class EpsilonNet:
    delta: int
    eps: Fraction
    r: int
    graphs: list = field(default_factory=list)
    provenance: str = "cap-limited"
    kind: str = GRAPH

    @property
    def max_size(self) -> int:
        return max((g.n for g in self.graphs), default=0)

    def stats(self) -> list[StatVector]:
        f = neighborhood_stats if self.kind == GRAPH else schreier_stats
        return [f(g, self.r) for g in self.graphs]

    def distance_to(self, x: StatVector) -> Fraction:
        return min(stat_distance(x, y) for y in self.stats())


def graph_catalog_ref(delta: int, r: int) -> tuple:
    return (GRAPH, (delta, r))


def _scan(delta: int, r: int, s: Region, max_n: int, graph_cap: int | None) -> LsdfAnswer:
    if tuple(s.catalog) != graph_catalog_ref(delta, r):
        raise ValueError(f"region catalog {s.catalog} does not match {graph_catalog_ref(delta, r)}")
    scanned = 0
    for g in enumerate_graphs(delta, max_n):
        scanned += 1
        if graph_cap is not None and scanned > graph_cap:
            raise ResourceCapExceeded(f"more than {graph_cap} graphs to scan")
        if s.contains(neighborhood_stats(g, r)):
            return LsdfAnswer(YES, g, None, scanned)
    return LsdfAnswer(NO, None, None, scanned)


def lsdf_from_bound(
    delta: int, eps, r: int, s: Region, oracle: BoundOracle, graph_cap: int | None = 1_000_000
) -> LsdfAnswer:
    """Scan every graph with at most oracle(eps, r) vertices for statistics in ``s``.

    "no" is correct only if the oracle is a genuine bound.  The first hit in
    the fixed enumeration order has the fewest vertices.
    """
    if oracle.kind != SPARSE:
        raise ValueError("lsdf_from_bound needs a sparse oracle")
    return _scan(delta, r, s, oracle(eps, r), graph_cap)


def capped_lsdf(
    delta: int, eps, r: int, s: Region, size_cap: int, trusted_n: int | None = None,
    graph_cap: int | None = 1_000_000,
) -> LsdfAnswer:
    """yes if found within ``size_cap``; no only when a trusted bound is covered; else unknown."""
    if trusted_n is not None and size_cap >= trusted_n:
        return _scan(delta, r, s, trusted_n, graph_cap)
    ans = _scan(delta, r, s, size_cap, graph_cap)
    if ans.status == NO:
        return LsdfAnswer(UNKNOWN, None, size_cap, ans.graphs_scanned)
    return ans


def moore_bound(delta: int, r: int) -> int:
    """Most vertices a radius-r ball of max degree delta can have."""
    total, layer = 1, delta
    for _ in range(r):
        total += layer
        layer *= max(delta - 1, 1)
    return total


def complement_of_balls(
    catalog_codes, centers: list[StatVector], radius: Fraction, delta: int, r: int
) -> Region:
    """Points at d_inf distance >= radius from every center."""
    boxes = []
    for x in centers:
        boxes.append({c: (x[c] - radius, x[c] + radius) for c in catalog_codes})
    return Region(graph_catalog_ref(delta, r), boxes, negated=True)


def net_from_lsdf(
    delta: int,
    eps,
    r: int,
    lsdf: Callable[[Fraction, int, Region], LsdfAnswer],
    max_iter: int = 1000,
) -> tuple[EpsilonNet, int]:
    """Grow a net by asking for a graph outside the eps/2-balls around the current one."""
    eps = as_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    cat = enumerate_balls(delta, r, moore_bound(delta, r))
    net = EpsilonNet(delta, eps, r, [], "oracle-certified")
    centers: list[StatVector] = []
    for _ in range(max_iter):
        region = complement_of_balls(cat.codes, centers, eps / 2, delta, r)
        ans = lsdf(eps / 2, r, region)
        if ans.status == NO:
            return net, net.max_size
        if ans.status == UNKNOWN:
            net.provenance = "cap-limited"
            return net, net.max_size
        x = neighborhood_stats(ans.witness, r)
        if not region.contains(x):
            raise AssertionError("LSDF witness is outside the query region")
        net.graphs.append(ans.witness)
        centers.append(x)
    raise ResourceCapExceeded(f"net construction did not stop within {max_iter} rounds")


def greedy_net(delta: int, eps, r: int, size_cap: int) -> EpsilonNet:
    """Ascending scan keeping every graph farther than eps from all kept ones."""
    if size_cap < 1:
        raise ValueError("size_cap must be at least 1")
    eps = as_rational(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    net = EpsilonNet(delta, eps, r)
    kept: list[StatVector] = []
    for g in enumerate_graphs(delta, size_cap):
        x = neighborhood_stats(g, r)
        if all(stat_distance(x, y) > eps for y in kept):
            net.graphs.append(g)
            kept.append(x)
    return net


def greedy_schreier_net(d: int, eps, r: int, size_cap: int, cap: int | None = 200_000) -> EpsilonNet:
    """Schreier analogue of ``greedy_net`` over actions up to conjugacy."""
    eps = as_rational(eps)
    net = EpsilonNet(d, eps, r, kind=SCHREIER)
    kept: list[StatVector] = []
    for n in range(1, size_cap + 1):
        for g in enumerate_schreier_graphs(d, n, dedup=True, cap=cap):
            x = schreier_stats(g, r)
            if all(stat_distance(x, y) > eps for y in kept):
                net.graphs.append(g)
                kept.append(x)
    return net


def oracle_from_net(net: EpsilonNet, trust: str = "cap-certified") -> BoundOracle:
    kind = SPARSE if net.kind == GRAPH else SCHREIER
    n = max(net.max_size, 1)
    return BoundOracle(lambda eps, r: n, kind, trust, net.delta)


# ------------------------------------------------------------- transfers


def graph_dilation(delta: int, r: int) -> int:
    return (delta + 1) * (r + 1)


def schreier_dilation(d: int, r: int) -> int:
    return (5 * d + 2) * (r + 1)


@dataclass
class TransferResult:
    n: int
    eps0: Fraction
    r0: int
    oracle_value: int
    method: str  # "enumerated" | "closed-form"
    sentinel: bool
    trust: str
    decoded_max: int


def _all_schreier(d: int, max_n: int) -> Iterator[SchreierGraph]:
    for n in range(1, max_n + 1):
        yield from enumerate_schreier_graphs(d, n, cap=None)


def sparse_bound_from_schreier(
    oracle: BoundOracle, delta: int, eps, r: int, cap: int | None = 200_000
) -> TransferResult:
    """Sparse bound from a Schreier bound for F_2: decode every small action."""
    if oracle.kind != SCHREIER or oracle.param != 2:
        raise ValueError("needs a Schreier oracle for d = 2")
    eps0 = as_rational(eps) / 4
    r0 = graph_dilation(delta, r)
    m = oracle(eps0, r0)
    total = sum(count_schreier_graphs(2, n) for n in range(1, m + 1))
    if cap is not None and total > cap:
        # good a-cycles pair up through b; an odd leftover vertex is b-fixed
        best = m if m % 2 == 0 else m - 1
        method = "closed-form"
    else:
        best = 0
        for g in _all_schreier(2, m):
            h, _ = decode_schreier(g, delta)
            best = max(best, h.n)
        method = "enumerated"
    return TransferResult(max(best, 1), eps0, r0, m, method, best == 0, oracle.trust, best)


def schreier_bound_from_sparse(
    oracle: BoundOracle, d: int, eps, r: int, cap: int | None = 200_000
) -> TransferResult:
    """Schreier bound for F_d from a sparse bound with degree cap 3."""
    if oracle.kind != SPARSE or oracle.param != 3:
        raise ValueError("needs a sparse oracle with degree cap 3")
    if d < 2:
        raise ValueError("d must be at least 2")
    eps0 = as_rational(eps) / 4
    r0 = schreier_dilation(d, r)
    m = oracle(eps0, r0)
    block = GadgetLayout(d).block_size
    # a good block owns its 2d-cycle and its outgoing gadgets, so decoding an
    # m-vertex graph yields at most m // block vertices; graphs that large are
    # far past brute-force range, so the count is used directly
    best, method = m // block, "closed-form"
    return TransferResult(max(best, 1), eps0, r0, m, method, best == 0, oracle.trust, best)
