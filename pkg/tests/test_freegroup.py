import random

import pytest
from hypothesis import given, settings, strategies as st

from localstats.canon import canonical_code
from localstats.corpus import random_schreier
from localstats.freegroup import (
    PseudoSubgroup,
    ResourceCapExceeded,
    enumerate_pseudo_subgroups,
    fold,
    format_word,
    inverse,
    is_pseudo_subgroup,
    mul,
    parse_word,
    pseudo_subgroup_violation,
    pseudo_to_ball,
    reduce_word,
    stab_window,
    stallings_membership,
    window,
    window_size,
    word_images,
)
from localstats.graphs import SchreierGraph, schreier_ball

from oracles import brute_pseudo_subgroups

words = st.lists(st.sampled_from([1, 2, -1, -2]), max_size=8).map(reduce_word)


def test_parse_and_format():
    assert parse_word("a1 a2^-1 a1^2") == (1, -2, 1, 1)
    assert parse_word("e") == ()
    assert parse_word("a1 a1^-1") == ()
    assert format_word((1, -2, 1, 1)) == "a1 a2^-1 a1^2"
    assert format_word(()) == "e"
    with pytest.raises(ValueError):
        parse_word("b1")


@given(words)
def test_format_parse_round_trip(w):
    assert parse_word(format_word(w)) == w


@given(words, words, words)
def test_group_laws(u, v, w):
    assert mul(mul(u, v), w) == mul(u, mul(v, w))
    assert mul(u, inverse(u)) == ()
    assert inverse(inverse(u)) == u


def test_window_sizes_and_order():
    assert [window_size(2, k) for k in range(4)] == [1, 5, 17, 53]
    assert window_size(1, 3) == 7 and window_size(3, 1) == 7
    w = window(2, 1).words
    assert w == ((), (1,), (-1,), (2,), (-2,))
    for k in range(4):
        assert len(window(2, k)) == window_size(2, k)


def test_window_cap():
    with pytest.raises(ResourceCapExceeded):
        window(5, 12)


def test_stallings_examples():
    assert not stallings_membership([(1, 1), (2,)], (1,))
    assert stallings_membership([(1, 1), (2,)], (2, 1, 1, -2))
    assert not stallings_membership([(1, 2, -1)], (2,))
    assert stallings_membership([(1,)], (1, 1, 1))
    assert stallings_membership([], ())
    assert not stallings_membership([], (1,))
    # <a1^2, a1^3> = <a1>
    assert stallings_membership([(1, 1), (1, 1, 1)], (1,))


def test_fold_is_deterministic_automaton():
    g = fold([(1, 2, -1), (1, 1), (2, 2, 2)])
    seen = set()
    for (s, ell), t in g.trans.items():
        assert (s, ell) not in seen
        seen.add((s, ell))
        assert g.trans[(t, -ell)] == s


def _products(gens, k):
    facs = set(gens) | {inverse(g) for g in gens}
    out, frontier = {()}, {()}
    for _ in range(k):
        frontier = {mul(w, f) for w in frontier for f in facs} - out
        out |= frontier
    return out


def test_stallings_accepts_all_short_products():
    rng = random.Random(5)
    for _ in range(30):
        gens = [reduce_word(rng.choice([1, 2, -1, -2]) for _ in range(rng.randint(1, 4))) for _ in range(rng.randint(1, 3))]
        gens = [g for g in gens if g]
        for w in _products(gens, 5):
            assert stallings_membership(gens, w)


@pytest.mark.parametrize("d,k", [(1, 1), (1, 2), (1, 3), (1, 4), (2, 1), (3, 1)])
def test_pseudo_subgroups_match_brute_force(d, k):
    fast = {s.members for s in enumerate_pseudo_subgroups(d, k)}
    assert fast == brute_pseudo_subgroups(d, k)


@pytest.mark.parametrize("d,k,count", [(2, 1, 4), (2, 2, 20), (1, 1, 2), (3, 1, 8), (2, 3, 1512), (3, 2, 255)])
def test_pseudo_subgroup_counts(d, k, count):
    subs = enumerate_pseudo_subgroups(d, k)
    assert len(subs) == count
    assert len({s.members for s in subs}) == count
    assert all(() in s.members for s in subs)


def test_pseudo_subgroup_checks():
    win = window(2, 2)
    assert is_pseudo_subgroup(win, [(), (1,), (-1,), (1, 1), (-1, -1)])
    assert pseudo_subgroup_violation(win, [(), (1,)]) is not None  # missing a1^-1
    assert not is_pseudo_subgroup(win, [(), (1,), (-1,)])  # missing a1^2


def test_restrict_of_pseudo_subgroup_is_pseudo_subgroup():
    small = {s.members for s in enumerate_pseudo_subgroups(2, 1)}
    for s in enumerate_pseudo_subgroups(2, 2):
        assert s.restrict(1).members in small


def test_stab_window_matches_word_images():
    rng = random.Random(6)
    for _ in range(20):
        g = random_schreier(rng, 2, rng.randint(1, 6))
        win = window(2, 3)
        imgs = word_images(g, win)
        for v in range(g.n):
            s = stab_window(g, v, 3)
            assert s.members == {w for w in win.words if g.act_word(w, v) == v}
            assert s.members == {w for w in win.words if imgs[w][v] == v}


def test_pseudo_to_ball_duality():
    rng = random.Random(7)
    for _ in range(40):
        g = random_schreier(rng, 2, rng.randint(1, 6))
        for r in (0, 1):
            for v in range(g.n):
                b = pseudo_to_ball(stab_window(g, v, 2 * r + 1), r)
                b.check()
                assert canonical_code(b) == canonical_code(schreier_ball(g, v, r))


def test_pseudo_to_ball_needs_matching_window():
    s = stab_window(SchreierGraph.trivial(2), 0, 2)
    with pytest.raises(ValueError):
        pseudo_to_ball(s, 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_every_stabilizer_is_pseudo_subgroup(n, seed):
    g = random_schreier(random.Random(seed), 2, n)
    win = window(2, 2)
    for v in range(n):
        assert is_pseudo_subgroup(win, stab_window(g, v, 2).members)
