"""Acceptance checks shared by the test suite and ``localstats selftest``.

Each ``criterion_*`` returns a ``CriterionResult``; ``quick=True`` shrinks the
corpora for a fast smoke run but keeps every comparison exact.
"""

from __future__ import annotations

import contextlib
import io
import json
import os
import random
import tempfile
import time
from dataclasses import dataclass
from fractions import Fraction

from .canon import action_code, canonical_code, graph_code
from .corpus import graph_corpus, random_graph, schreier_corpus
from .encodings import decode_graph, decode_schreier, encode_graph, encode_schreier
from .freegroup import (
    enumerate_pseudo_subgroups,
    inverse,
    mul,
    pseudo_to_ball,
    stab_window,
    stallings_membership,
    window,
)
from .graphs import SchreierGraph, schreier_ball
from .localtests import LocalTest, sofic_lower_search
from .pirs import (
    Region,
    build_pirs,
    catalog_ref,
    check_containment,
    empirical_distribution,
    image_maximum,
    irs_upper_bound,
    m_machine,
)
from .reductions import greedy_net, lsdf_from_bound, net_from_lsdf, oracle_from_net
from .statistics import enumerate_schreier_balls, neighborhood_stats, schreier_stats, stat_distance


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"criterion {self.number} [{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def _timed(number, name, fn):
    t0 = time.perf_counter()
    passed, detail = fn()
    return CriterionResult(number, name, passed, detail, time.perf_counter() - t0)


def criterion_1(seed: int = 1, quick: bool = False) -> CriterionResult:
    count = 10 if quick else 100

    def run():
        bad = 0
        for g in graph_corpus(seed, count, 40, 4):
            for r in (0, 1, 2):
                if neighborhood_stats(g, r).total() != 1:
                    bad += 1
        for g in schreier_corpus(seed + 1, count, 2, 8):
            for r in (0, 1, 2):
                if schreier_stats(g, r).total() != 1:
                    bad += 1
        return bad == 0, f"{6 * count} vectors, {bad} not summing to 1"

    return _timed(1, "statistics normalization", run)


def criterion_2(seed: int = 2, quick: bool = False) -> CriterionResult:
    count = 20 if quick else 200

    def run():
        checked = bad = 0
        for g in schreier_corpus(seed, count, 2, 6):
            for r in (0, 1):
                for v in range(g.n):
                    lhs = canonical_code(pseudo_to_ball(stab_window(g, v, 2 * r + 1), r))
                    checked += 1
                    if lhs != canonical_code(schreier_ball(g, v, r)):
                        bad += 1
        return bad == 0, f"{checked} (graph, vertex, r) cases, {bad} mismatches"

    return _timed(2, "ball/stabilizer duality", run)


def criterion_3(seed: int = 3, quick: bool = False) -> CriterionResult:
    count = 10 if quick else 100

    def run():
        bad = []
        for g in graph_corpus(seed, count, 20, 4, min_n=2, no_isolated=True):
            h, frac = decode_schreier(encode_graph(g), g.delta)
            if frac != 0 or graph_code(h) != graph_code(g):
                bad.append("graph")
        for g in schreier_corpus(seed + 1, count, 2, 6):
            h, frac = decode_graph(encode_schreier(g), 2)
            if frac != 0 or action_code(h) != action_code(g):
                bad.append("schreier")
        one = encode_schreier(SchreierGraph.trivial(2, 1))
        size_ok = one.n == 17 and max(one.degree(v) for v in range(one.n)) == 3
        return not bad and size_ok, (
            f"{2 * count} round trips, {len(bad)} failures; trivial 1-vertex encoding has "
            f"{one.n} vertices, max degree {max(one.degree(v) for v in range(one.n))}"
        )

    return _timed(3, "codec round trips", run)


def _random_word(rng: random.Random, n: int, d: int = 2):
    w: list[int] = []
    while len(w) < n:
        x = rng.choice([i for i in range(1, d + 1)] + [-i for i in range(1, d + 1)])
        if w and w[-1] == -x:
            continue
        w.append(x)
    return tuple(w)


def products(gens, factors: int) -> set:
    """All reduced products of at most ``factors`` generators or inverses."""
    facs = set(gens) | {inverse(g) for g in gens}
    out, frontier = {()}, {()}
    for _ in range(factors):
        frontier = {mul(w, f) for w in frontier for f in facs} - out
        out |= frontier
    return out


def bounded_closure(gens, max_len: int) -> set:
    """Subgroup elements reachable through products whose partial values stay short."""
    facs = set(gens) | {inverse(g) for g in gens}
    seen, stack = {()}, [()]
    while stack:
        w = stack.pop()
        for f in facs:
            u = mul(w, f)
            if len(u) <= max_len and u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def criterion_4(seed: int = 4, quick: bool = False) -> CriterionResult:
    count = 10 if quick else 50

    def run():
        n_sub = len(enumerate_pseudo_subgroups(2, 1))
        w22 = len(window(2, 2))
        rng = random.Random(seed)
        missed = disagree = 0
        for _ in range(count):
            gens = [_random_word(rng, rng.randint(1, 3)) for _ in range(rng.randint(1, 3))]
            for w in products(gens, 6):
                if not stallings_membership(gens, w):
                    missed += 1
            exact = bounded_closure(gens, 8)
            for w in window(2, 3).words:
                if stallings_membership(gens, w) != (w in exact):
                    disagree += 1
        ok = n_sub == 4 and w22 == 17 and missed == 0 and disagree == 0
        return ok, (
            f"|PS(2,1)|={n_sub}, |W_2(2)|={w22}; {count} generator sets: {missed} <=6-factor "
            f"products rejected, {disagree} W_2(3) disagreements with exact closure"
        )

    return _timed(4, "pseudo-subgroup census and Stallings membership", run)


def criterion_5(seed: int = 5, quick: bool = False) -> CriterionResult:
    count = 10 if quick else 100
    nobj = 4 if quick else 20

    def run():
        infeasible = 0
        for g in schreier_corpus(seed, count, 2, 6):
            for k in (1, 2, 3):
                p = build_pirs(2, k)
                if not p.contains(empirical_distribution(p, g)):
                    infeasible += 1
        rng = random.Random(seed)
        codes = enumerate_schreier_balls(2, 0).codes
        increases = 0
        for _ in range(nobj):
            obj = {c: Fraction(rng.randint(-10, 10), rng.randint(1, 10)) for c in codes}
            vals = [image_maximum(build_pirs(2, k), 0, obj) for k in (1, 2, 3)]
            increases += sum(1 for a, b in zip(vals, vals[1:]) if b > a)
        return infeasible == 0 and increases == 0, (
            f"{3 * count} empirical points, {infeasible} infeasible; {nobj} objectives, "
            f"{increases} optimum increases from k to k+1"
        )

    return _timed(5, "P-IRS soundness", run)


def sandwich_tests() -> list[tuple[str, LocalTest]]:
    ind = LocalTest.indicator
    return [
        ("1[a1 in S]", ind(2, [("a1", True)])),
        ("1[a1 not in S, a1^2 in S]", ind(2, [("a1", False), ("a1^2", True)])),
        ("1[a1 in S, a1^2 not in S] (contradictory)", ind(2, [("a1", True), ("a1^2", False)])),
        ("1[a1 a2 in S]", ind(2, [("a1 a2", True)])),
        ("1[a1 in S, a2 in S]", ind(2, [("a1", True), ("a2", True)])),
        ("1[a1, a2 not in S, a1 a2 in S]", ind(2, [("a1", False), ("a2", False), ("a1 a2", True)])),
        ("1[a1 a2 a1^-1 in S, a2 not in S]", ind(2, [("a1 a2 a1^-1", True), ("a2", False)])),
        ("1[a1^3 in S, a1 not in S]", ind(2, [("a1^3", True), ("a1", False)])),
        (
            "1/2 on a1, else 1/3 on a2",
            LocalTest(2, 1, (((("a1", True),), "1/2"), ((("a2", True),), "1/3")), 0),
        ),
        (
            "2 if a1, a2 absent; -1 if a1 present",
            LocalTest(2, 1, (((("a1", False), ("a2", False)), 2), ((("a1", True),), -1)), 0),
        ),
    ]


def criterion_6(seed: int = 6, quick: bool = False) -> CriterionResult:
    n_max = 4 if quick else 5

    def run():
        rows = []
        ok = True
        for name, t in sandwich_tests():
            lo = sofic_lower_search(t, n_max).value
            hi = irs_upper_bound(t, 3)
            rows.append((name, lo, hi))
            ok &= lo <= hi
        first, contra = rows[0], rows[2]
        ok &= first[1] == first[2] == 1
        ok &= contra[1] == contra[2] == 0
        detail = "; ".join(f"{n}: {lo} <= {hi}" for n, lo, hi in rows)
        return ok, detail

    return _timed(6, "sofic sandwich", run)


def contained_regions(seed: int, count: int, d: int = 2, r: int = 0) -> list[Region]:
    """Seeded unions of boxes that cover the probability simplex."""
    rng = random.Random(seed)
    codes = list(enumerate_schreier_balls(d, r).codes)
    out = []
    for _ in range(count):
        boxes = []
        c = rng.choice(codes)
        t = Fraction(rng.randint(1, 9), 10)
        boxes.append({c: (Fraction(-1, 10), t + Fraction(1, 20))})
        c2 = rng.choice(codes)
        t2 = Fraction(rng.randint(1, 9), 10)
        boxes.append({c: (t, Fraction(11, 10)), c2: (Fraction(-1, 10), t2)})
        boxes.append({c: (t, Fraction(11, 10)), c2: (t2 - Fraction(1, 20), Fraction(11, 10))})
        out.append(Region(catalog_ref(d, r), boxes))
    return out


def criterion_7(seed: int = 7, quick: bool = False) -> CriterionResult:
    def run():
        whole = m_machine(2, 0, Region.whole_cube(catalog_ref(2, 0)), 3)
        triv = schreier_stats(SchreierGraph.trivial(2, 1), 0)
        (tcode,) = triv.entries
        excl = Region(catalog_ref(2, 0), [{tcode: (Fraction(-1, 10), Fraction(1))}])
        never = m_machine(2, 0, excl, 3)
        witness_ok = never.witness is not None and not excl.contains(never.witness)
        mono_bad = 0
        regions = contained_regions(seed, 5)
        for s in regions:
            res = [check_containment(build_pirs(2, k), 0, s).contained for k in (1, 2, 3)]
            mono_bad += sum(1 for a, b in zip(res, res[1:]) if a and not b)
            mono_bad += 0 if any(res) else 1
        ok = whole.halted and whole.k == 1 and not never.halted and witness_ok and mono_bad == 0
        wit = {c.hex(): str(v) for c, v in never.witness.entries.items()} if never.witness else None
        return ok, (
            f"whole cube halted={whole.halted} at k={whole.k}; excluded-trivial region "
            f"halted={never.halted}, trace={never.trace}, witness={wit}; "
            f"{len(regions)} contained regions, {mono_bad} monotonicity failures"
        )

    return _timed(7, "m_machine behavior", run)


def criterion_8(seed: int = 8, quick: bool = False) -> CriterionResult:
    size = 6 if quick else 8
    sample = 10 if quick else 50

    def run():
        eps = Fraction(1, 2)
        brute = greedy_net(3, eps, 1, size)
        oracle = oracle_from_net(brute)
        answers = []

        def lsdf(e, r, s):
            ans = lsdf_from_bound(3, e, r, s, oracle)
            answers.append((s, ans))
            return ans

        net, n_bound = net_from_lsdf(3, eps, 1, lsdf)
        witnesses_ok = all(
            s.contains(neighborhood_stats(a.witness, 1)) for s, a in answers if a.status == "yes"
        )
        rng = random.Random(seed)
        stats = net.stats()
        worst = Fraction(0)
        for _ in range(sample):
            g = random_graph(rng, rng.randint(1, 20), 3, rng.choice([0.2, 0.5, 0.9]))
            x = neighborhood_stats(g, 1)
            worst = max(worst, min(stat_distance(x, y) for y in stats))
        ok = witnesses_ok and worst <= eps
        return ok, (
            f"brute-force net bound {oracle(eps, 1)}; LSDF net has {len(net.graphs)} members, "
            f"N={n_bound}, {len(answers)} queries, witnesses valid={witnesses_ok}; worst sample "
            f"distance {worst} <= {eps}"
        )

    return _timed(8, "LSDF net loop", run)


def cli_determinism_commands(workdir: str) -> list[list[str]]:
    def write(name, doc):
        path = os.path.join(workdir, name)
        with open(path, "w") as f:
            json.dump(doc, f, sort_keys=True)
        return path

    k13 = write("k13.json", {"kind": "graph", "n": 4, "edges": [[0, 1], [0, 2], [0, 3]]})
    edge = write("edge.json", {"kind": "graph", "n": 2, "edges": [[0, 1]]})
    sch = write("sch.json", {"kind": "schreier", "d": 2, "n": 3, "perms": [[1, 2, 0], [0, 2, 1]]})
    cube = write("cube.json", {"catalog": {"kind": "schreier", "params": [2, 0]}, "boxes": [{}]})
    gcube = write("gcube.json", {"catalog": {"kind": "graph", "params": [3, 1]}, "boxes": [{}]})
    test = write(
        "test.json",
        {"d": 2, "k": 2, "clauses": [{"pattern": [["a1", False], ["a1^2", True]], "value": "1"}], "default": "0"},
    )
    return [
        ["stats", "--graph", k13, "--r", "1"],
        ["stats", "--graph", sch, "--r", "1"],
        ["ballcat", "--kind", "graph", "--delta", "3", "--r", "1"],
        ["ballcat", "--kind", "schreier", "--d", "2", "--r", "0"],
        ["encode", "--graph", edge],
        ["encode", "--graph", sch],
        ["decode", "--graph", sch, "--delta", "3"],
        ["enum-schreier", "--d", "2", "--n", "3", "--dedup"],
        ["sofic-lb", "--test", test, "--nmax", "3"],
        ["pirs-upper", "--pattern", "a1", "--d", "2", "--k", "3"],
        ["pirs-check", "--d", "2", "--r", "0", "--region", cube, "--kmax", "3"],
        ["net", "--delta", "2", "--eps", "1/4", "--r", "1", "--size-cap", "6"],
        ["lsdf", "--delta", "3", "--eps", "1/2", "--r", "1", "--region", gcube, "--size-cap", "3"],
        ["reduce", "--direction", "schreier-from-sparse", "--oracle-value", "17", "--d", "2", "--eps", "1/2", "--r", "0"],
    ]


def run_cli_captured(argv: list[str]) -> tuple[int, bytes]:
    from .cli import main

    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(argv)
    return code, buf.getvalue().encode()


def criterion_9(seed: int = 9, quick: bool = False) -> CriterionResult:
    def run():
        differing = []
        with tempfile.TemporaryDirectory() as tmp:
            cmds = cli_determinism_commands(tmp)
            for argv in cmds:
                a = run_cli_captured(argv)
                b = run_cli_captured(argv)
                if a != b or a[0] not in (0, 1):
                    differing.append(argv[0])
        return not differing, f"{len(cmds)} commands run twice, differing or failing: {differing or 'none'}"

    return _timed(9, "CLI determinism", run)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


def run_all(quick: bool = False, seed: int | None = None) -> list[CriterionResult]:
    out = []
    for i, fn in enumerate(CRITERIA, start=1):
        out.append(fn(seed=seed + i, quick=quick) if seed is not None else fn(quick=quick))
    return out
