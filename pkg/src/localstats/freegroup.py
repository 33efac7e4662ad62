"""Reduced words in F_d, balls W_d(k), Stallings foldings and pseudo-subgroups.

A word is a tuple of letters (nonzero ints, see ``graphs.letters``).  Words act
on Schreier graphs right to left: ``(g_m, ..., g_1) . v = g_m . (... (g_1 . v))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .canon import canonical_code
from .graphs import GraphError, RootedBall, SchreierGraph, letters

Word = tuple[int, ...]
E: Word = ()

WINDOW_LIMIT = 2_000_000


class ResourceCapExceeded(RuntimeError):
    """An enumeration would exceed its configured cap."""


def reduce_word(w: Iterable[int]) -> Word:
    out: list[int] = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def inverse(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def mul(*ws: Sequence[int]) -> Word:
    return reduce_word(x for w in ws for x in w)


def is_reduced(w: Sequence[int]) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def _letter_key(x: int) -> tuple[int, int]:
    return (abs(x), 0 if x > 0 else 1)


def word_key(w: Sequence[int]) -> tuple:
    """Length-then-lexicographic order with a_1 < a_1^-1 < a_2 < ..."""
    return (len(w), tuple(_letter_key(x) for x in w))


_TOKEN = re.compile(r"a(\d+)(?:\^(-?\d+))?")


def parse_word(text: str) -> Word:
    """Parse ``"a1 a2^-1 a1^2"`` (spaces optional); ``"e"`` or ``""`` is the identity."""
    text = text.replace(" ", "").replace("*", "")
    if text in ("", "e", "1"):
        return E
    out: list[int] = []
    pos = 0
    for m in _TOKEN.finditer(text):
        if m.start() != pos:
            raise ValueError(f"cannot parse word {text!r}")
        pos = m.end()
        i = int(m.group(1))
        k = int(m.group(2)) if m.group(2) else 1
        if i < 1:
            raise ValueError(f"bad generator index in {text!r}")
        out.extend([i if k > 0 else -i] * abs(k))
    if pos != len(text):
        raise ValueError(f"cannot parse word {text!r}")
    return reduce_word(out)


def format_word(w: Sequence[int]) -> str:
    if not w:
        return "e"
    parts = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        k = (j - i) * (1 if w[i] > 0 else -1)
        parts.append(f"a{abs(w[i])}" + ("" if k == 1 else f"^{k}"))
        i = j
    return " ".join(parts)


def window_size(d: int, k: int) -> int:
    return 1 + sum(2 * d * (2 * d - 1) ** (j - 1) for j in range(1, k + 1))


@dataclass(frozen=True)
class Window:
    """All reduced words of length <= k, in length-then-lexicographic order."""

    d: int
    k: int
    words: tuple[Word, ...]
    index: dict = field(compare=False, repr=False, hash=False)

    def __len__(self):
        return len(self.words)

    def __contains__(self, w):
        return w in self.index


@lru_cache(maxsize=None)
def window(d: int, k: int) -> Window:
    if d < 1 or k < 0:
        raise ValueError("need d >= 1 and k >= 0")
    if window_size(d, k) > WINDOW_LIMIT:
        raise ResourceCapExceeded(f"|W_{d}({k})| = {window_size(d, k)} exceeds {WINDOW_LIMIT}")
    ls = sorted(letters(d), key=_letter_key)
    layer: list[Word] = [E]
    words: list[Word] = [E]
    for _ in range(k):
        layer = [w + (x,) for w in layer for x in ls if not w or w[-1] != -x]
        words.extend(layer)
    return Window(d, k, tuple(words), {w: i for i, w in enumerate(words)})


# ---------------------------------------------------------------- Stallings


@dataclass
class StallingsGraph:
    """Folded core automaton of a finitely generated subgroup; base state is 0."""

    states: int
    trans: dict[tuple[int, int], int]

    def trace(self, w: Sequence[int], start: int = 0) -> int | None:
        s = start
        for x in w:
            s = self.trans.get((s, x))
            if s is None:
                return None
        return s

    def accepts(self, w: Sequence[int]) -> bool:
        return self.trace(w) == 0


def fold(gens: Iterable[Sequence[int]]) -> StallingsGraph:
    """Stallings folding of the wedge of loops spelled by ``gens``."""
    parent: list[int] = [0]
    edges: list[tuple[int, int, int]] = []  # (u, letter, v)
    for g in gens:
        g = reduce_word(g)
        if not g:
            continue
        prev = 0
        for pos, x in enumerate(g):
            if pos == len(g) - 1:
                nxt = 0
            else:
                nxt = len(parent)
                parent.append(nxt)
            edges.append((prev, x, nxt))
            prev = nxt

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    changed = True
    while changed:
        changed = False
        out: dict[tuple[int, int], int] = {}
        for u, x, v in edges:
            for a, lab, b in ((find(u), x, find(v)), (find(v), -x, find(u))):
                c = out.get((a, lab))
                if c is None:
                    out[(a, lab)] = b
                elif find(c) != b:
                    ra, rb = find(c), b
                    if ra > rb:
                        ra, rb = rb, ra
                    parent[rb] = ra
                    changed = True
    trans: dict[tuple[int, int], int] = {}
    for u, x, v in edges:
        trans[(find(u), x)] = find(v)
        trans[(find(v), -x)] = find(u)
    trans = _trim(trans)
    states = sorted({s for s, _ in trans} | {0})
    ren = {s: i for i, s in enumerate(states)}
    return StallingsGraph(len(states), {(ren[s], x): ren[t] for (s, x), t in trans.items()})


def _trim(trans: dict[tuple[int, int], int]) -> dict[tuple[int, int], int]:
    """Remove non-base states of degree one until the graph is a core."""
    trans = dict(trans)
    while True:
        deg: dict[int, int] = {}
        for s, _ in trans:
            deg[s] = deg.get(s, 0) + 1
        hairs = [s for s, k in deg.items() if k == 1 and s != 0]
        if not hairs:
            return trans
        drop = set(hairs)
        trans = {(s, x): t for (s, x), t in trans.items() if s not in drop and t not in drop}


def stallings_membership(gens: Iterable[Sequence[int]], w: Sequence[int]) -> bool:
    return fold(gens).accepts(reduce_word(w))


# --------------------------------------------------------- pseudo-subgroups


@dataclass(frozen=True)
class PseudoSubgroup:
    window: Window
    members: frozenset

    def __contains__(self, w):
        return w in self.members

    def restrict(self, k: int) -> "PseudoSubgroup":
        if k > self.window.k:
            raise ValueError("cannot restrict to a larger window")
        return PseudoSubgroup(window(self.window.d, k), frozenset(w for w in self.members if len(w) <= k))

    def sorted_words(self) -> list[Word]:
        return sorted(self.members, key=word_key)

    def key(self) -> tuple:
        idx = self.window.index
        return (len(self.members), tuple(sorted(idx[w] for w in self.members)))


def pseudo_subgroup_violation(win: Window, members: Iterable[Sequence[int]]) -> str | None:
    """``None`` iff ``members`` = <members> intersected with ``win``."""
    s = set(members)
    for w in s:
        if w not in win:
            return f"{format_word(w)} is not in W_{win.d}({win.k})"
    if E not in s:
        return "identity missing"
    for w in s:
        if inverse(w) not in s:
            return f"not closed under inversion at {format_word(w)}"
    st = fold(s)
    for w in win.words:
        if st.accepts(w) != (w in s):
            return f"<S> meets the window in {format_word(w)}, which is not in S"
    return None


def is_pseudo_subgroup(win: Window, members: Iterable[Sequence[int]]) -> bool:
    return pseudo_subgroup_violation(win, members) is None


def _partial_actions(d: int, radius: int, boundary_edges: bool, cap: int | None):
    """Rooted partial actions realizable as induced balls (or, without
    ``boundary_edges``, as balls missing edges between boundary vertices).

    Yields ``moves`` lists in canonical breadth-first numbering; every labeled
    ball arises exactly once because each slot decision follows the canonical
    scan order (vertices by number, letters in slot order).
    """
    ls = letters(d)
    OUT = -1
    moves: list[dict[int, int]] = [{}]
    dist = [0]
    count = 0

    def next_slot(x0: int, li0: int):
        x, li = x0, li0
        while x < len(moves):
            while li < len(ls):
                if ls[li] not in moves[x]:
                    return x, li
                li += 1
            x, li = x + 1, 0
        return None

    def rec(x0: int, li0: int):
        nonlocal count
        slot = next_slot(x0, li0)
        if slot is None:
            count += 1
            if cap is not None and count > cap:
                raise ResourceCapExceeded(f"more than {cap} partial actions for d={d}, radius={radius}")
            yield [dict(m) for m in moves]
            return
        x, li = slot
        ell = ls[li]
        t = dist[x]
        if t == radius:
            moves[x][ell] = OUT
            yield from rec(x, li + 1)
            del moves[x][ell]
            if not boundary_edges:
                return
        for y in range(len(moves)):
            if -ell in moves[y] or dist[y] < t or (y == x and ell in moves[x]):
                continue
            if t == radius and dist[y] != radius:
                continue
            moves[x][ell] = y
            moves[y][-ell] = x
            yield from rec(x, li + 1)
            del moves[y][-ell]
            moves[x].pop(ell, None)
        if t < radius:
            z = len(moves)
            moves.append({-ell: x})
            dist.append(t + 1)
            moves[x][ell] = z
            yield from rec(x, li + 1)
            del moves[x][ell]
            moves.pop()
            dist.pop()

    yield from rec(0, 0)


def _closed_words(moves: Sequence[dict[int, int]], win: Window) -> frozenset:
    out = []
    for w in win.words:
        s = 0
        for x in reversed(w):
            s = moves[s].get(x, -1)
            if s < 0:
                break
        else:
            if s == 0:
                out.append(w)
    return frozenset(out)


def enumerate_pseudo_subgroups(d: int, k: int, cap: int | None = 200_000) -> list[PseudoSubgroup]:
    """All k-pseudo-subgroups of F_d, sorted by (size, window indices).

    A subset of W_d(k) is H meet W_d(k) for a subgroup H exactly when it is
    the set of closed words of length <= k at the root of a coset graph; such
    words never leave the radius-floor(k/2) ball, so the pseudo-subgroups are
    read off the realizable partial actions of that radius.
    """
    if d < 1 or k < 0:
        raise ValueError("need d >= 1 and k >= 0")
    win = window(d, k)
    found = {
        _closed_words(m, win)
        for m in _partial_actions(d, k // 2, k % 2 == 1, cap)
    }
    subs = [PseudoSubgroup(win, s) for s in found]
    subs.sort(key=PseudoSubgroup.key)
    return subs


def stab_window(g: SchreierGraph, v: int, k: int) -> PseudoSubgroup:
    """Stab(v) meet W_d(k)."""
    if not 0 <= v < g.n:
        raise GraphError(f"vertex {v} out of range")
    win = window(g.d, k)
    images = word_images(g, win)
    return PseudoSubgroup(win, frozenset(w for w in win.words if images[w][v] == v))


def word_images(g: SchreierGraph, win: Window) -> dict[Word, tuple[int, ...]]:
    """For every window word, the tuple of images of all vertices."""
    imgs: dict[Word, tuple[int, ...]] = {E: tuple(range(g.n))}
    for w in win.words[1:]:
        # w = w[0] w[1:], the tail acts first
        tail = imgs[w[1:]]
        x = w[0]
        table = g.perms[x - 1] if x > 0 else g._inv[-x - 1]
        imgs[w] = tuple(table[y] for y in tail)
    return imgs


def pseudo_to_ball(s: PseudoSubgroup, r: int) -> RootedBall:
    """Radius-r labeled ball of the coset graph of any subgroup meeting W_d(2r+1) in ``s``."""
    win = s.window
    if win.k != 2 * r + 1:
        raise ValueError(f"window radius must be {2 * r + 1}, got {win.k}")
    d = win.d
    ball_words = [w for w in win.words if len(w) <= r]
    # u ~ w  iff  w^-1 u in s  (u . v and w . v name the same vertex)
    rep: dict[Word, int] = {}
    reps: list[Word] = []
    for u in ball_words:
        for i, w in enumerate(reps):
            if mul(inverse(w), u) in s.members:
                rep[u] = i
                break
        else:
            rep[u] = len(reps)
            reps.append(u)
    for u in ball_words:
        for w in ball_words:
            same = mul(inverse(w), u) in s.members
            if same != (rep[u] == rep[w]):
                raise ValueError("not a pseudo-subgroup: coset relation is not an equivalence")
    arcs = set()
    for i, u in enumerate(reps):
        for x in letters(d):
            targets = {rep[w] for w in ball_words if mul(inverse(w), (x,), u) in s.members}
            if len(targets) > 1:
                raise ValueError("not a pseudo-subgroup: two targets for one letter")
            if targets:
                arcs.add((i, x, targets.pop()))
    return RootedBall(len(reps), 0, r, arcs=frozenset(arcs), d=d)


def pseudo_ball_code(s: PseudoSubgroup, r: int) -> bytes:
    return canonical_code(pseudo_to_ball(s, r))
