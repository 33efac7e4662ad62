"""Pseudo-IRS polytopes, their statistics images, LP upper bounds and the containment machine."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .canon import canonical_code
from .freegroup import (
    PseudoSubgroup,
    ResourceCapExceeded,
    enumerate_pseudo_subgroups,
    mul,
    pseudo_to_ball,
    window,
)
from .graphs import SchreierGraph, letters
from .localtests import LocalTest, eval_test, stabilizer_windows
from .lp import LinearSystem, feasible, maximize
from .statistics import SCHREIER, BallCatalog, StatVector, enumerate_schreier_balls


@dataclass
class PirsPolytope:
    """Probability vectors over k-pseudo-subgroups satisfying the conjugation marginals.

    For each letter g and each set T meeting W_d(k-2): the mass of
    {S : {w in W_d(k-2) : g w g^-1 in S} = T} equals the mass of
    {S : S meet W_d(k-2) = T}.  Conjugates g w g^-1 of words in W_d(k-2) stay
    in W_d(k), so these equalities hold for every invariant random subgroup.
    """

    d: int
    k: int
    subgroups: list[PseudoSubgroup]
    system: LinearSystem
    index: dict = field(repr=False)

    def __len__(self):
        return len(self.subgroups)

    def point_mass(self, members) -> list[Fraction]:
        x = [Fraction(0)] * len(self.subgroups)
        x[self.index[frozenset(members)]] = Fraction(1)
        return x

    def contains(self, x: Sequence) -> bool:
        return self.system.satisfied_by(x)


@lru_cache(maxsize=None)
def build_pirs(d: int, k: int, cap: int | None = 200_000) -> PirsPolytope:
    subs = enumerate_pseudo_subgroups(d, k, cap)
    index = {s.members: i for i, s in enumerate(subs)}
    n = len(subs)
    system = LinearSystem(n)
    system.add_eq([1] * n, 1)
    if k >= 3:
        inner = window(d, k - 2).words
        for g in letters(d):
            conj = {w: mul((g,), w, (-g,)) for w in inner}
            rows: dict[frozenset, dict[int, int]] = {}
            for j, s in enumerate(subs):
                image = frozenset(w for w in inner if conj[w] in s.members)
                restr = frozenset(w for w in inner if w in s.members)
                if image != restr:
                    rows.setdefault(image, {})[j] = 1
                    rows.setdefault(restr, {})[j] = -1
            for key in sorted(rows, key=lambda t: sorted(window(d, k - 2).index[w] for w in t)):
                system.add_eq(rows[key], 0)
    return PirsPolytope(d, k, subs, system, index)


def empirical_distribution(p: PirsPolytope, g: SchreierGraph) -> list[Fraction]:
    """Law of Stab(v) meet W_d(k) for uniform v, as a point of the polytope's space."""
    x = [Fraction(0)] * len(p.subgroups)
    for s in stabilizer_windows(g, p.k):
        x[p.index[s]] += Fraction(1, g.n)
    return x


# ------------------------------------------------------------- stats map


@dataclass
class StatsMap:
    """0/1 matrix from pseudo-subgroup masses to ball-type masses."""

    catalog: BallCatalog
    columns: list[int]  # catalog position of each pseudo-subgroup's ball

    def matrix(self) -> list[list[int]]:
        rows = [[0] * len(self.columns) for _ in range(len(self.catalog))]
        for j, c in enumerate(self.columns):
            rows[c][j] = 1
        return rows

    def apply(self, x: Sequence) -> StatVector:
        acc: dict[bytes, Fraction] = {}
        for j, v in enumerate(x):
            if v:
                code = self.catalog.codes[self.columns[j]]
                acc[code] = acc.get(code, Fraction(0)) + Fraction(v)
        d, r = self.catalog.params
        return StatVector(SCHREIER, r, dict(sorted(acc.items())), d)


@lru_cache(maxsize=None)
def _ball_code(members: frozenset, d: int, r: int) -> bytes:
    return canonical_code(pseudo_to_ball(PseudoSubgroup(window(d, 2 * r + 1), members), r))


def stats_map(p: PirsPolytope, r: int) -> StatsMap:
    if p.k < 2 * r + 1:
        raise ValueError(f"k={p.k} is too small for radius {r}; need k >= {2 * r + 1}")
    cat = enumerate_schreier_balls(p.d, r)
    cols = []
    for s in p.subgroups:
        members = frozenset(w for w in s.members if len(w) <= 2 * r + 1)
        cols.append(cat.position(_ball_code(members, p.d, r)))
    return StatsMap(cat, cols)


# --------------------------------------------------------------- aggregation


def _aggregate(p: PirsPolytope, keys: Sequence) -> tuple[LinearSystem, list[list[int]]]:
    """Merge variables with equal constraint columns and equal ``keys``.

    The merged LP is the exact image of the original under summing each group.
    """
    cols: list[list[tuple[int, Fraction]]] = [[] for _ in range(len(p.subgroups))]
    for i, (row, _) in enumerate(p.system.eq):
        for j, c in row.items():
            cols[j].append((i, c))
    groups: dict[tuple, list[int]] = {}
    for j in range(len(p.subgroups)):
        groups.setdefault((tuple(cols[j]), keys[j]), []).append(j)
    members = list(groups.values())
    reduced = LinearSystem(len(members))
    for i, (row, rhs) in enumerate(p.system.eq):
        new = {}
        for g, js in enumerate(members):
            c = row.get(js[0])
            if c:
                new[g] = c
        reduced.add_eq(new, rhs)
    return reduced, members


def _expand(members: list[list[int]], y: Sequence[Fraction], n: int) -> list[Fraction]:
    x = [Fraction(0)] * n
    for js, v in zip(members, y):
        x[js[0]] = v
    return x


def irs_upper_bound(t: LocalTest, k: int, cap: int | None = 200_000) -> Fraction:
    """max of E_mu[t] over P-IRS_d(k); an upper bound on the sofic value of t."""
    if k < t.k:
        raise ValueError(f"k={k} is below the test's window radius {t.k}")
    p = build_pirs(t.d, k, cap)
    obj = [eval_test(t, s) for s in p.subgroups]
    reduced, members = _aggregate(p, obj)
    res = maximize(reduced, [obj[js[0]] for js in members])
    assert res.status == "optimal"
    return res.value


def image_maximum(p: PirsPolytope, r: int, objective: Mapping[bytes, Fraction]) -> Fraction:
    """max of sum_F objective[F] * U(mu)[F] over mu in the polytope."""
    sm = stats_map(p, r)
    keys = [sm.columns[j] for j in range(len(p))]
    reduced, members = _aggregate(p, keys)
    c = [Fraction(objective.get(sm.catalog.codes[keys[js[0]]], 0)) for js in members]
    res = maximize(reduced, c)
    assert res.status == "optimal"
    return res.value


# ------------------------------------------------------------------ regions


@dataclass
class Region:
    """Union of open boxes in statistics coordinates (or its complement).

    Each box maps ball codes to ``(lower, upper)`` with strict inequalities;
    coordinates a box omits are unconstrained.  ``negated`` turns the region
    into its complement, which is how the decision-function queries express
    "far from every current net member".
    """

    catalog: tuple  # (kind, params)
    boxes: list[dict[bytes, tuple[Fraction, Fraction]]]
    negated: bool = False

    def __post_init__(self):
        kind, params = self.catalog
        self.catalog = (kind, tuple(params))
        boxes = []
        for box in self.boxes:
            b = {}
            for code, (lo, hi) in sorted(box.items()):
                lo, hi = Fraction(lo), Fraction(hi)
                if not lo < hi:
                    raise ValueError("box needs lower < upper")
                b[code] = (lo, hi)
            boxes.append(b)
        self.boxes = boxes

    @classmethod
    def whole_cube(cls, catalog) -> "Region":
        return cls(catalog, [{}])

    @classmethod
    def empty(cls, catalog) -> "Region":
        return cls(catalog, [])

    def contains(self, x: StatVector) -> bool:
        inside = any(all(lo < x[c] < hi for c, (lo, hi) in box.items()) for box in self.boxes)
        return inside != self.negated


def _catalog_ref(cat: BallCatalog) -> tuple:
    return (cat.kind, tuple(cat.params))


@dataclass
class Containment:
    contained: bool
    witness: StatVector | None = None
    branches: int = 0


def check_containment(
    p: PirsPolytope, r: int, s: Region, branch_cap: int = 100_000
) -> Containment:
    """Is the statistics image of ``p`` inside the union of open boxes ``s``?

    The complement of the union is the intersection over boxes of "some
    constrained coordinate sits on or past a face", expanded as a disjunction
    of closed polyhedra; each branch is one exact feasibility problem.
    """
    if s.negated:
        raise ValueError("containment is defined for unions of boxes only")
    sm = stats_map(p, r)
    if tuple(s.catalog) != _catalog_ref(sm.catalog):
        raise ValueError(f"region catalog {s.catalog} does not match {_catalog_ref(sm.catalog)}")
    faces_per_box = []
    for box in s.boxes:
        faces = []
        for code, (lo, hi) in box.items():
            if code not in sm.catalog:
                raise ValueError("region uses a coordinate outside the catalog")
            if lo >= 0:
                faces.append((code, "le", lo))
            if hi <= 1:
                faces.append((code, "ge", hi))
        if not faces:
            return Containment(True, None, 0)
        faces_per_box.append(faces)
    total = 1
    for faces in faces_per_box:
        total *= len(faces)
    if total > branch_cap:
        raise ResourceCapExceeded(f"{total} DNF branches exceeds cap {branch_cap}")
    keys = list(sm.columns)
    reduced, members = _aggregate(p, keys)
    by_coord: dict[int, list[int]] = {}
    for gi, js in enumerate(members):
        by_coord.setdefault(keys[js[0]], []).append(gi)
    count = 0
    for branch in itertools.product(*faces_per_box):
        count += 1
        system = reduced.copy()
        for code, side, bound in branch:
            row = {gi: 1 for gi in by_coord.get(sm.catalog.position(code), [])}
            if side == "le":
                system.add_le(row, bound)
            else:
                system.add_ge(row, bound)
        y = feasible(system)
        if y is not None:
            x = _expand(members, y, len(p))
            return Containment(False, sm.apply(x), count)
    return Containment(True, None, count)


@dataclass
class MachineResult:
    halted: bool
    k: int
    witness: StatVector | None = None
    trace: list[tuple[int, bool]] = field(default_factory=list)


def m_machine(d: int, r: int, s: Region, k_max: int, branch_cap: int = 100_000) -> MachineResult:
    """Capped run of the search over k = 2r+1, ..., k_max for a certified containment."""
    if k_max < 2 * r + 1:
        raise ValueError(f"k_max must be at least {2 * r + 1}")
    trace = []
    witness = None
    for k in range(2 * r + 1, k_max + 1):
        res = check_containment(build_pirs(d, k), r, s, branch_cap)
        trace.append((k, res.contained))
        if res.contained:
            return MachineResult(True, k, None, trace)
        witness = res.witness
    return MachineResult(False, k_max, witness, trace)


def catalog_ref(d: int, r: int) -> tuple:
    return (SCHREIER, (d, r))
