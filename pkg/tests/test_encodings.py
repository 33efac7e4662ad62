import random

import pytest
from hypothesis import given, settings, strategies as st

from localstats.canon import action_code, canonical_code, graph_code
from localstats.corpus import graph_corpus, random_graph, random_schreier, schreier_corpus
from localstats.encodings import (
    GadgetLayout,
    _cycles_of_length,
    decode_graph,
    decode_schreier,
    directed_edges,
    encode_graph,
    encode_schreier,
)
from localstats.graphs import BoundedDegreeGraph, GraphError, SchreierGraph, ball, schreier_ball, validate_schreier
from localstats.reductions import graph_dilation, schreier_dilation


def test_single_edge():
    g = BoundedDegreeGraph.from_edges(2, [(0, 1)], 1)
    s = encode_graph(g)
    assert s.n == 2 and s.perms == ((0, 1), (1, 0))
    h, frac = decode_schreier(s, 1)
    assert graph_code(h) == graph_code(g) and frac == 0


def test_triangle():
    s = encode_graph(BoundedDegreeGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)], 2))
    a, b = s.perms
    assert s.n == 6
    for p in (a, b):
        assert all(p[x] != x and p[p[x]] == x for x in range(6))


def test_seven_vertex_graph_has_twelve_darts():
    # seven vertices, six edges: a triangle with a tail, plus a separate edge 4-5
    edges = [(2, 0), (0, 1), (1, 3), (3, 6), (2, 1), (4, 5)]
    g = BoundedDegreeGraph.from_edges(7, edges, 3)
    s = encode_graph(g)
    assert s.n == 12 == 2 * len(edges)
    assert validate_schreier(s) is None
    h, frac = decode_schreier(s, 3)
    assert graph_code(h) == graph_code(g) and frac == 0


def test_isolated_vertex_rejected():
    with pytest.raises(GraphError):
        encode_graph(BoundedDegreeGraph.from_edges(3, [(0, 1)], 1))


def test_custom_ordering_policy():
    g = BoundedDegreeGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)], 3)
    s = encode_graph(g, lambda v, ts: sorted(ts, reverse=True))
    darts = directed_edges(g)
    a = s.perms[0]
    assert darts[a[darts.index((0, 3))]] == (0, 2)
    h, _ = decode_schreier(s, 3)
    assert graph_code(h) == graph_code(g)
    with pytest.raises(GraphError):
        encode_graph(g, lambda v, ts: list(ts)[:1])


def test_trivial_action_decodes_to_sentinel():
    h, frac = decode_schreier(SchreierGraph.trivial(2), 3)
    assert h.n == 0 and frac == 1


def test_long_cycles_are_bad():
    # a 4-cycle of darts under a with delta 3 is not good
    s = SchreierGraph.from_perms([[1, 2, 3, 0, 5, 6, 7, 4], [4, 5, 6, 7, 0, 1, 2, 3]])
    h, frac = decode_schreier(s, 3)
    assert h.n == 0 and frac == 1
    h, frac = decode_schreier(s, 4)
    assert h.n == 2 and frac == 0


def test_trivial_schreier_encoding_size():
    h = encode_schreier(SchreierGraph.trivial(2))
    assert h.n == 17 == GadgetLayout(2).block_size
    assert max(h.degree(v) for v in range(h.n)) == 3


def test_block_size_formula():
    for d in (2, 3, 4):
        lay = GadgetLayout(d)
        assert lay.block_size == 2 * d + sum(2 * d + 1 + i for i in range(1, d + 1))
        g = random_schreier(random.Random(d), d, 3)
        assert encode_schreier(g).n == 3 * lay.block_size


def test_d1_rejected():
    with pytest.raises(GraphError):
        encode_schreier(SchreierGraph.trivial(1))
    with pytest.raises(GraphError):
        decode_graph(BoundedDegreeGraph(1, ((),), 3), 1)


def test_loop_gadget_stays_in_block():
    # vertex 0 is fixed by both generators, so its block is a component on its own
    g = SchreierGraph.from_perms([[0, 2, 1], [0, 1, 2]])
    h = encode_schreier(g)
    block = GadgetLayout(2).block_size
    assert all(w < block for v in range(block) for w in h.adjacency[v])
    back, frac = decode_graph(h, 2)
    assert action_code(back) == action_code(g) and frac == 0


def test_cycle_census():
    rng = random.Random(4)
    for _ in range(20):
        g = random_schreier(rng, 2, rng.randint(1, 6))
        h = encode_schreier(g)
        assert max(h.degree(v) for v in range(h.n)) == 3
        cycles = _cycles_of_length(h.adjacency, 4)
        block = GadgetLayout(2).block_size
        assert sorted(set(c) for c in map(set, cycles)) == sorted({x * block + s for s in range(4)} for x in range(g.n))


def test_bare_cycle_has_no_good_block():
    h = BoundedDegreeGraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)], 3)
    g, frac = decode_graph(h, 2)
    assert g.n == 0 and frac == 1


def test_completion_of_broken_gadget():
    g = SchreierGraph.from_perms([[1, 2, 0], [0, 1, 2]])
    h = encode_schreier(g)
    # cut one a1 gadget in the middle of its path
    block = GadgetLayout(2).block_size
    path_mid = 4 + 2  # third internal vertex of vertex 0's a1 gadget
    u, v = path_mid, path_mid + 1
    edges = [e for e in h.edges() if e != (u, v)]
    cut = BoundedDegreeGraph.from_edges(h.n, edges, 3)
    back, frac = decode_graph(cut, 2)
    # both blocks touching the cut gadget stop being good, leaving one block
    assert back.n == 1 and validate_schreier(back) is None
    assert back.perms == ((0,), (0,))
    assert 0 < frac < 1
    assert cut.n == 3 * block


def test_round_trips_corpus():
    for g in graph_corpus(11, 40, 14, 4, min_n=2, no_isolated=True):
        h, frac = decode_schreier(encode_graph(g), g.delta)
        assert frac == 0 and graph_code(h) == graph_code(g)
    for g in schreier_corpus(12, 40, 2, 6):
        h, frac = decode_graph(encode_schreier(g), 2)
        assert frac == 0 and action_code(h) == action_code(g)
    for g in schreier_corpus(13, 10, 3, 3):
        h, frac = decode_graph(encode_schreier(g), 3)
        assert frac == 0 and action_code(h) == action_code(g)


def test_encode_graph_injective_on_corpus():
    seen = {}
    for g in graph_corpus(14, 60, 8, 3, min_n=2, no_isolated=True):
        seen.setdefault(graph_code(g), set()).add(action_code(encode_graph(g)))
    # the encoding depends on labels, but never sends different graphs to one action
    codes = [c for cs in seen.values() for c in cs]
    assert len(codes) == len(set(codes))


def test_graph_locality():
    """The radius-1 ball at v is determined by the encoding's ball around any dart at v."""
    rng = random.Random(15)
    delta = 3
    r0 = graph_dilation(delta, 1)
    table = {}
    for _ in range(40):
        g = random_graph(rng, rng.randint(2, 9), delta, rng.choice([0.3, 0.6]), no_isolated=True)
        s = encode_graph(g)
        darts = directed_edges(g)
        for i, (u, _) in enumerate(darts):
            key = canonical_code(schreier_ball(s, i, r0))
            table.setdefault(key, set()).add(canonical_code(ball(g, u, 1)))
    assert all(len(v) == 1 for v in table.values())


def test_schreier_locality():
    rng = random.Random(16)
    r0 = schreier_dilation(2, 1)
    table = {}
    for _ in range(25):
        g = random_schreier(rng, 2, rng.randint(1, 4))
        h = encode_schreier(g)
        block = GadgetLayout(2).block_size
        for x in range(g.n):
            key = canonical_code(ball(h, x * block, r0))
            table.setdefault(key, set()).add(canonical_code(schreier_ball(g, x, 1)))
    assert all(len(v) == 1 for v in table.values())


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10**6))
def test_decode_graph_always_valid(n, seed):
    """Damaged encodings still decode to valid actions with bad fraction in [0, 1]."""
    rng = random.Random(seed)
    h = encode_schreier(random_schreier(rng, 2, n))
    edges = h.edges()
    keep = [e for e in edges if rng.random() > 0.05]
    g, frac = decode_graph(BoundedDegreeGraph.from_edges(h.n, keep, 3), 2)
    assert validate_schreier(g) is None
    assert 0 <= frac <= 1 and g.n <= n
