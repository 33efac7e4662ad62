import random
from fractions import Fraction

import networkx as nx
import pytest

from localstats.canon import canonical_code, graph_code
from localstats.corpus import random_graph, random_schreier
from localstats.graphs import BoundedDegreeGraph, GraphError, SchreierGraph, ball, schreier_ball
from localstats.statistics import (
    GRAPH,
    StatVector,
    count_schreier_balls,
    enumerate_balls,
    enumerate_connected_graphs,
    enumerate_graphs,
    enumerate_schreier_balls,
    neighborhood_stats,
    schreier_stats,
    stat_distance,
)

from oracles import rooted_ball_types


def test_k13_statistics():
    g = BoundedDegreeGraph.from_edges(4, [(0, 1), (0, 2), (0, 3)], 3)
    x = neighborhood_stats(g, 1)
    assert sorted(x.entries.values()) == [Fraction(1, 4), Fraction(3, 4)]
    assert x[canonical_code(ball(g, 0, 1))] == Fraction(1, 4)
    x.check()


def test_radius_zero_has_one_type():
    rng = random.Random(0)
    for _ in range(10):
        g = random_graph(rng, rng.randint(1, 12), 3)
        assert len(neighborhood_stats(g, 0).entries) == 1


def test_empty_graph_rejected():
    with pytest.raises(GraphError):
        neighborhood_stats(BoundedDegreeGraph(0, (), 3), 1)


def test_stat_distance():
    path = BoundedDegreeGraph.from_edges(3, [(0, 1), (1, 2)], 2)
    tri = BoundedDegreeGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)], 2)
    x, y = neighborhood_stats(path, 1), neighborhood_stats(tri, 1)
    assert stat_distance(x, x) == 0
    assert stat_distance(x, y) == 1  # the triangle ball has mass 1 on one side only
    assert stat_distance(x, y) == stat_distance(y, x)
    with pytest.raises(ValueError):
        stat_distance(x, neighborhood_stats(path, 2))


def test_statvector_check_catches_errors():
    g = BoundedDegreeGraph.from_edges(2, [(0, 1)], 1)
    x = neighborhood_stats(g, 1)
    bad = StatVector(GRAPH, 1, {k: v / 2 for k, v in x.entries.items()})
    with pytest.raises(ValueError):
        bad.check()
    with pytest.raises(ValueError):
        StatVector(GRAPH, 0, dict(x.entries)).check()  # type radius too large


def test_schreier_stats_normalized_and_sized():
    rng = random.Random(1)
    for _ in range(20):
        g = random_schreier(rng, 2, rng.randint(1, 7))
        for r in (0, 1, 2):
            x = schreier_stats(g, r)
            assert x.total() == 1
            x.check()


@pytest.mark.parametrize("delta,r", [(0, 1), (1, 2), (2, 1), (2, 2), (3, 1), (4, 1)])
def test_ball_catalog_matches_atlas(delta, r):
    assert len(enumerate_balls(delta, r, 7)) == rooted_ball_types(delta, r)


def test_ball_catalog_frozen_sizes():
    # 443 was cross-checked against the atlas for balls of <= 7 vertices
    assert len(enumerate_balls(3, 2, 10)) == 443


def test_ball_catalog_partial_flag():
    cat = enumerate_balls(3, 1, 2)
    assert cat.partial and len(cat) < 8
    assert not enumerate_balls(3, 1, 4).partial


def test_catalog_contains_every_observed_ball():
    rng = random.Random(2)
    cat = enumerate_balls(3, 2, 10)
    for _ in range(20):
        g = random_graph(rng, rng.randint(1, 15), 3)
        assert all(c in cat for c in neighborhood_stats(g, 2).entries)


@pytest.mark.parametrize("d,r,size", [(1, 0, 2), (2, 0, 4), (3, 0, 8), (1, 1, 4), (1, 2, 6), (2, 1, 1512)])
def test_schreier_catalog_sizes(d, r, size):
    assert len(enumerate_schreier_balls(d, r)) == size
    assert count_schreier_balls(d, r) == size


def test_schreier_catalog_contains_observed_balls():
    rng = random.Random(3)
    cat = enumerate_schreier_balls(2, 1)
    for _ in range(30):
        g = random_schreier(rng, 2, rng.randint(1, 8))
        assert all(c in cat for c in schreier_stats(g, 1).entries)


def test_schreier_catalog_d1_by_hand():
    # F_1 radius-1 balls: loop, 2-cycle, 3-cycle seen at radius 1, open path
    assert len(enumerate_schreier_balls(1, 1)) == 4
    seen = {canonical_code(schreier_ball(SchreierGraph.from_perms([list(range(1, n)) + [0]]), 0, 1)) for n in range(1, 6)}
    assert seen == set(enumerate_schreier_balls(1, 1).codes)


def test_connected_graph_counts():
    # connected graphs with max degree <= 3 (oracle: networkx atlas for n <= 7)
    counts = {n: len(gs) for n, gs in enumerate_connected_graphs(3, 8).items()}
    atlas = {}
    for g in nx.graph_atlas_g()[1:]:
        if nx.is_connected(g) and max(d for _, d in g.degree()) <= 3:
            atlas[g.number_of_nodes()] = atlas.get(g.number_of_nodes(), 0) + 1
    for n in range(1, 8):
        assert counts[n] == atlas[n]
    assert counts[8] == 194


def test_enumerate_graphs_order_and_completeness():
    gs = list(enumerate_graphs(2, 5))
    sizes = [g.n for g in gs]
    assert sizes == sorted(sizes)
    for n in range(1, 6):
        codes = [graph_code(g) for g in gs if g.n == n]
        assert codes == sorted(codes) and len(set(codes)) == len(codes)
    atlas = sum(
        1 for g in nx.graph_atlas_g() if 1 <= g.number_of_nodes() <= 5 and max((d for _, d in g.degree()), default=0) <= 2
    )
    assert len(gs) == atlas
