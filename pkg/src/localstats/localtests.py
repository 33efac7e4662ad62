"""Local tests on subsets of F_d, their values on Schreier graphs, and sofic brackets."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

from .canon import action_code
from .freegroup import (
    ResourceCapExceeded,
    Window,
    Word,
    enumerate_pseudo_subgroups,
    format_word,
    parse_word,
    reduce_word,
    window,
    word_images,
)
from .graphs import GraphError, RootedBall, SchreierGraph
from .lp import as_rational
from .statistics import count_schreier_balls


@dataclass(frozen=True)
class LocalTest:
    """First-match clause list over a window W_d(k).

    Each clause is ``(pattern, value)`` with ``pattern`` a tuple of
    ``(word, present)`` pairs; the first clause whose words are all present /
    absent as required gives the value, otherwise ``default``.
    """

    d: int
    k: int
    clauses: tuple = ()
    default: Fraction = Fraction(0)

    def __post_init__(self):
        clauses = []
        for pattern, value in self.clauses:
            pat = []
            for w, present in pattern:
                w = reduce_word(parse_word(w) if isinstance(w, str) else w)
                if len(w) > self.k:
                    raise ValueError(f"pattern word {format_word(w)} longer than k={self.k}")
                if any(abs(x) > self.d for x in w):
                    raise ValueError(f"pattern word {format_word(w)} uses a generator beyond d={self.d}")
                pat.append((w, bool(present)))
            clauses.append((tuple(pat), Fraction(value)))
        object.__setattr__(self, "clauses", tuple(clauses))
        object.__setattr__(self, "default", Fraction(self.default))

    @classmethod
    def indicator(cls, d: int, pattern: Iterable, k: int | None = None) -> "LocalTest":
        """1 on sets matching ``pattern``, 0 elsewhere; k defaults to the longest word."""
        pattern = [(parse_word(w) if isinstance(w, str) else tuple(w), p) for w, p in pattern]
        if k is None:
            k = max((len(w) for w, _ in pattern), default=0)
        return cls(d, k, ((tuple(pattern), 1),), Fraction(0))

    def values(self) -> list[Fraction]:
        return [v for _, v in self.clauses] + [self.default]


def eval_test(t: LocalTest, s) -> Fraction:
    """Value of ``t`` on a subset ``s`` of W_d(k_T) (extra longer words are ignored)."""
    members = s.members if hasattr(s, "members") else s
    for pattern, value in t.clauses:
        if all((w in members) == present for w, present in pattern):
            return value
    return t.default


def stab_on_ball(b: RootedBall, k: int) -> frozenset:
    """Words of length <= k whose path from the root returns to the root."""
    if not b.labeled:
        raise GraphError("ball is not edge-labeled")
    moves = b.moves()
    win = window(b.d, k)
    out = []
    for w in win.words:
        x = b.root
        for letter in reversed(w):
            y = moves[x].get(letter)
            if y is None:
                raise GraphError(f"ball radius too small: {format_word(w)} leaves the ball")
            x = y
        if x == b.root:
            out.append(w)
    return frozenset(out)


def test_on_ball(t: LocalTest, f: RootedBall) -> Fraction:
    if f.radius < t.k and len(f.arcs or ()) < 2 * f.d * f.n:
        raise GraphError(f"ball radius {f.radius} < k_T={t.k}")
    return eval_test(t, stab_on_ball(f, t.k))


def stabilizer_windows(g: SchreierGraph, k: int) -> list[frozenset]:
    win = window(g.d, k)
    imgs = word_images(g, win)
    out: list[list[Word]] = [[] for _ in range(g.n)]
    for w in win.words:
        img = imgs[w]
        for v in range(g.n):
            if img[v] == v:
                out[v].append(w)
    return [frozenset(ws) for ws in out]


def val(t: LocalTest, g: SchreierGraph) -> Fraction:
    """Exact average of t(Stab(v)) over the vertices of g."""
    if t.d != g.d:
        raise ValueError(f"test has d={t.d}, graph has d={g.d}")
    vals = [eval_test(t, s) for s in stabilizer_windows(g, t.k)]
    return Fraction(sum(vals), g.n)


def count_schreier_graphs(d: int, n: int) -> int:
    total = 1
    for i in range(2, n + 1):
        total *= i
    return total**d


def enumerate_schreier_graphs(
    d: int, n: int, dedup: bool = False, cap: int | None = 5_000_000
) -> Iterator[SchreierGraph]:
    """All d-tuples of permutations of n points, in lexicographic order.

    With ``dedup`` only the first tuple of each simultaneous-conjugacy class is
    yielded.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if cap is not None and count_schreier_graphs(d, n) > cap:
        raise ResourceCapExceeded(f"(n!)^d = {count_schreier_graphs(d, n)} tuples exceeds cap {cap}")
    perms = list(itertools.permutations(range(n)))
    seen: set[bytes] = set()
    for tup in itertools.product(perms, repeat=d):
        g = SchreierGraph(n, d, tup)
        if dedup:
            code = action_code(g)
            if code in seen:
                continue
            seen.add(code)
        yield g


@dataclass
class SearchResult:
    value: Fraction
    witness: SchreierGraph
    graphs_searched: int


def sofic_lower_search(t: LocalTest, n_max: int, cap: int | None = 5_000_000) -> SearchResult:
    """max val(t, g) over all Schreier graphs with at most ``n_max`` vertices.

    The witness is the first maximizer in (vertex count, tuple) order.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    total = sum(count_schreier_graphs(t.d, n) for n in range(1, n_max + 1))
    if cap is not None and total > cap:
        raise ResourceCapExceeded(f"{total} Schreier graphs exceeds cap {cap}")
    best: SearchResult | None = None
    win = window(t.d, t.k)
    cache: dict[frozenset, Fraction] = {}
    searched = 0
    for n in range(1, n_max + 1):
        for g in enumerate_schreier_graphs(t.d, n, cap=None):
            searched += 1
            imgs = word_images(g, win)
            total_v = Fraction(0)
            for v in range(n):
                s = frozenset(w for w in win.words if imgs[w][v] == v)
                x = cache.get(s)
                if x is None:
                    x = cache[s] = eval_test(t, s)
                total_v += x
            value = total_v / n
            if best is None or value > best.value:
                best = SearchResult(value, g, 0)
    assert best is not None
    best.graphs_searched = searched
    return best


@dataclass
class SoficBracket:
    lower: Fraction
    upper: Fraction
    witness: SchreierGraph
    theta: Fraction
    eps: Fraction
    radius: int
    catalog_size: int
    m: Fraction
    n_bound: int
    degenerate: bool = False
    notes: list[str] = field(default_factory=list)


def test_maximum(t: LocalTest) -> Fraction:
    """max over catalog balls F of t(Stab(F)).

    Stab(F) meet W_d(k_T) ranges over exactly the k_T-pseudo-subgroups as F
    ranges over the radius-k_T catalog, so the maximum is taken there.
    """
    return max(eval_test(t, s) for s in enumerate_pseudo_subgroups(t.d, t.k))


def sofic_bracket(
    t: LocalTest,
    theta,
    bound_oracle: Callable[[Fraction, int], int],
    catalog_size: int | None = None,
    cap: int | None = 5_000_000,
) -> SoficBracket:
    """[beta, beta + theta] with beta the best value over graphs of at most
    ``bound_oracle(eps, r)`` vertices; the upper end is only as trustworthy as
    the oracle.
    """
    theta = as_rational(theta)
    if theta <= 0:
        raise ValueError("theta must be positive")
    r = t.k
    notes = []
    size = catalog_size if catalog_size is not None else count_schreier_balls(t.d, r)
    m = test_maximum(t)
    degenerate = False
    if m <= 0:
        degenerate = True
        m_used = max(max(abs(v) for v in t.values()), Fraction(1))
        notes.append(f"m(T) = {m} <= 0; eps computed with {m_used} instead")
    else:
        m_used = m
    eps = theta / (size * m_used)
    n_bound = int(bound_oracle(eps, r))
    if n_bound < 1:
        raise ValueError("bound oracle returned a bound below 1")
    res = sofic_lower_search(t, n_bound, cap)
    return SoficBracket(
        res.value, res.value + theta, res.witness, theta, eps, r, size, m, n_bound, degenerate, notes
    )
