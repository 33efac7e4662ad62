import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from localstats.corpus import random_schreier
from localstats.freegroup import PseudoSubgroup, pseudo_to_ball, stab_window, window
from localstats.graphs import GraphError, SchreierGraph, schreier_ball
from localstats.localtests import (
    LocalTest,
    enumerate_schreier_graphs,
    eval_test,
    sofic_bracket,
    sofic_lower_search,
    val,
)
from localstats import localtests as lt
from localstats.statistics import count_schreier_balls

A1 = LocalTest.indicator(2, [("a1", True)])
SQUARE = LocalTest.indicator(2, [("a1", False), ("a1^2", True)])
CONTRA = LocalTest(2, 1, (((("a1", True), ("a1", False)), 1),), 0)


def test_eval_examples():
    assert eval_test(A1, {(), (1,)}) == 1
    assert eval_test(A1, {()}) == 0
    assert eval_test(CONTRA, {(), (1,)}) == 0 and eval_test(CONTRA, {()}) == 0


def test_first_match_wins():
    t = LocalTest(2, 1, (((("a1", True),), 5), ((("a2", True),), 7)), -1)
    assert eval_test(t, {(1,), (2,)}) == 5
    assert eval_test(t, {(2,)}) == 7
    assert eval_test(t, set()) == -1


def test_pattern_validation():
    with pytest.raises(ValueError):
        LocalTest(2, 1, (((("a1^2", True),), 1),))
    with pytest.raises(ValueError):
        LocalTest(2, 2, (((("a3", True),), 1),))


def test_on_ball_examples():
    full = schreier_ball(SchreierGraph.trivial(2), 0, 1)
    assert lt.test_on_ball(A1, full) == 1
    star = pseudo_to_ball(PseudoSubgroup(window(2, 3), frozenset({()})), 1)
    assert lt.test_on_ball(A1, star) == 0
    with pytest.raises(GraphError):
        lt.test_on_ball(SQUARE, star)  # radius 1 < k_T = 2 on a tree-like ball


def test_on_ball_matches_stabilizers():
    rng = random.Random(0)
    for _ in range(20):
        g = random_schreier(rng, 2, rng.randint(1, 6))
        for v in range(g.n):
            for t in (A1, SQUARE):
                assert lt.test_on_ball(t, schreier_ball(g, v, t.k)) == eval_test(t, stab_window(g, v, t.k))


def test_val_examples():
    g = SchreierGraph.from_perms([[0, 2, 1, 3], [1, 2, 3, 0]])
    assert val(A1, g) == Fraction(2, 4)
    assert val(A1, SchreierGraph.trivial(2)) == 1
    assert val(SQUARE, SchreierGraph.from_perms([[1, 0], [0, 1]])) == 1
    with pytest.raises(ValueError):
        val(A1, SchreierGraph.trivial(3))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10**6))
def test_val_conjugation_invariance_and_additivity(n, m, seed):
    rng = random.Random(seed)
    g, h = random_schreier(rng, 2, n), random_schreier(rng, 2, m)
    perm = list(range(n))
    rng.shuffle(perm)
    for t in (A1, SQUARE):
        assert val(t, g) == val(t, g.relabel(perm))
        assert val(t, g.disjoint_union(h)) == (n * val(t, g) + m * val(t, h)) / (n + m)


def test_enumeration_counts():
    assert len(list(enumerate_schreier_graphs(2, 1))) == 1
    assert len(list(enumerate_schreier_graphs(2, 2))) == 4
    assert len(list(enumerate_schreier_graphs(1, 3, dedup=True))) == 3
    assert len(list(enumerate_schreier_graphs(2, 3, dedup=True))) == 11


def test_lower_search_examples():
    r = sofic_lower_search(A1, 1)
    assert r.value == 1 and r.witness.perms == ((0,), (0,))
    r = sofic_lower_search(SQUARE, 2)
    assert r.value == 1 and r.witness.perms[0] == (1, 0)
    assert sofic_lower_search(CONTRA, 3).value == 0


def test_lower_search_monotone():
    t = LocalTest.indicator(2, [("a1", False), ("a2", False), ("a1 a2", True)])
    vals = [sofic_lower_search(t, n).value for n in range(1, 5)]
    assert vals == sorted(vals)


def test_test_maximum():
    assert lt.test_maximum(A1) == 1
    assert lt.test_maximum(CONTRA) == 0


def test_bracket_examples():
    theta = Fraction(1, 10)
    b = sofic_bracket(A1, theta, lambda eps, r: 2)
    assert (b.lower, b.upper) == (1, Fraction(11, 10))
    assert b.radius == 1 and b.catalog_size == count_schreier_balls(2, 1) == 1512
    assert b.eps == theta / 1512
    assert b.lower == sofic_lower_search(A1, 2).value
    c = sofic_bracket(CONTRA, theta, lambda eps, r: 2)
    assert (c.lower, c.upper) == (0, theta) and c.degenerate and c.notes
    assert sofic_bracket(A1, 0.1, lambda eps, r: 1).theta == Fraction(1, 10)
    with pytest.raises(ValueError):
        sofic_bracket(A1, 0, lambda eps, r: 1)
