"""JSON documents for graphs, statistics, regions and local tests.

Rationals are written as "p/q" strings and ball codes as hex, so every
document round-trips exactly.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .freegroup import format_word, parse_word
from .graphs import BoundedDegreeGraph, GraphError, SchreierGraph
from .localtests import LocalTest
from .pirs import Region
from .statistics import StatVector


def rat(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rat(s) -> Fraction:
    if isinstance(s, float):
        raise ValueError(f"float {s!r} is not an exact rational; write it as a string")
    return Fraction(s)


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def graph_to_doc(g) -> dict:
    if isinstance(g, SchreierGraph):
        return {"kind": "schreier", "d": g.d, "n": g.n, "perms": [list(p) for p in g.perms]}
    return {"kind": "graph", "n": g.n, "delta": g.delta, "edges": [list(e) for e in g.edges()]}


def graph_from_doc(doc: dict, delta: int | None = None):
    kind = doc.get("kind")
    if kind == "schreier":
        g = SchreierGraph.from_perms(doc["perms"]) if doc["n"] else SchreierGraph(0, doc["d"], tuple(() for _ in range(doc["d"])))
        if g.n != doc["n"] or g.d != doc["d"]:
            raise GraphError("n or d does not match perms")
        return g
    if kind == "graph":
        edges = [tuple(e) for e in doc["edges"]]
        if delta is None:
            delta = doc.get("delta")
        return BoundedDegreeGraph.from_edges(doc["n"], edges, delta)
    raise GraphError(f"unknown graph kind {kind!r}")


def stats_to_doc(x: StatVector) -> dict:
    return {
        "kind": x.kind,
        "r": x.r,
        "param": x.param,
        "entries": {c.hex(): rat(v) for c, v in sorted(x.entries.items())},
    }


def stats_from_doc(doc: dict) -> StatVector:
    x = StatVector(
        doc["kind"], doc["r"], {bytes.fromhex(c): parse_rat(v) for c, v in doc["entries"].items()}, doc.get("param", 0)
    )
    x.check()
    return x


def region_to_doc(s: Region) -> dict:
    kind, params = s.catalog
    return {
        "catalog": {"kind": kind, "params": list(params)},
        "boxes": [{c.hex(): [rat(lo), rat(hi)] for c, (lo, hi) in box.items()} for box in s.boxes],
        "negated": s.negated,
    }


def region_from_doc(doc: dict) -> Region:
    cat = doc["catalog"]
    boxes = [
        {bytes.fromhex(c): (parse_rat(lo), parse_rat(hi)) for c, (lo, hi) in box.items()}
        for box in doc["boxes"]
    ]
    return Region((cat["kind"], tuple(cat["params"])), boxes, bool(doc.get("negated", False)))


def parse_pattern(text: str) -> list[tuple[tuple[int, ...], bool]]:
    """``"a1; !a1^2"`` -> a1 present, a1^2 absent."""
    out = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        present = not item.startswith("!")
        out.append((parse_word(item.lstrip("!").strip()), present))
    return out


def test_to_doc(t: LocalTest) -> dict:
    return {
        "d": t.d,
        "k": t.k,
        "clauses": [
            {"pattern": [[format_word(w), p] for w, p in pat], "value": rat(v)} for pat, v in t.clauses
        ],
        "default": rat(t.default),
    }


def test_from_doc(doc: dict) -> LocalTest:
    clauses = []
    for c in doc["clauses"]:
        clauses.append((tuple((parse_word(w), bool(p)) for w, p in c["pattern"]), parse_rat(c["value"])))
    return LocalTest(doc["d"], doc["k"], tuple(clauses), parse_rat(doc.get("default", "0")))
