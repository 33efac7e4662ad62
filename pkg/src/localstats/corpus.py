"""Seeded random graphs and Schreier graphs for audits and self-tests."""

from __future__ import annotations

import random

from .graphs import BoundedDegreeGraph, SchreierGraph


def random_graph(
    rng: random.Random, n: int, delta: int, p: float = 0.5, no_isolated: bool = False
) -> BoundedDegreeGraph:
    """Random graph with degrees <= delta: candidate pairs in random order, each kept with prob. p.

    With ``no_isolated`` each leftover isolated vertex is joined to a random
    vertex with spare degree (needs delta >= 2 or even n to terminate).
    """
    while True:
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
        rng.shuffle(pairs)
        deg = [0] * n
        edges = []
        for u, v in pairs:
            if deg[u] < delta and deg[v] < delta and rng.random() < p:
                edges.append((u, v))
                deg[u] += 1
                deg[v] += 1
        if no_isolated:
            for u in range(n):
                free = [v for v in range(n) if v != u and deg[v] < delta]
                if deg[u] == 0 and free:
                    v = rng.choice(free)
                    edges.append((min(u, v), max(u, v)))
                    deg[u] += 1
                    deg[v] += 1
        if not no_isolated or all(deg):
            return BoundedDegreeGraph.from_edges(n, edges, delta)


def random_schreier(rng: random.Random, d: int, n: int) -> SchreierGraph:
    perms = []
    for _ in range(d):
        p = list(range(n))
        rng.shuffle(p)
        perms.append(p)
    return SchreierGraph.from_perms(perms)


def graph_corpus(seed: int, count: int, max_n: int, max_delta: int, min_n: int = 1, no_isolated=False):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        delta = rng.randint(2 if no_isolated else 0, max_delta)
        lo = max(min_n, 2 if no_isolated else 1)
        n = rng.randint(lo, max_n)
        out.append(random_graph(rng, n, delta, rng.choice([0.2, 0.5, 0.9]), no_isolated))
    return out


def schreier_corpus(seed: int, count: int, d: int, max_n: int):
    rng = random.Random(seed)
    return [random_schreier(rng, d, rng.randint(1, max_n)) for _ in range(count)]
