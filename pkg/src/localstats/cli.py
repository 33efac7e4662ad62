"""Command-line interface.

Every command writes one JSON document (sorted keys, rationals as "p/q",
ball codes as hex) with a manifest, so reruns are byte-identical.
Exit codes: 0 ok, 1 property violation, 2 usage or input error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import random
import sys
from fractions import Fraction

from . import __version__
from .encodings import decode_graph, decode_schreier, encode_graph, encode_schreier, GadgetLayout
from .freegroup import ResourceCapExceeded
from .graphs import GraphError, SchreierGraph
from .io import (
    dumps,
    graph_from_doc,
    graph_to_doc,
    parse_pattern,
    parse_rat,
    rat,
    region_from_doc,
    stats_to_doc,
    test_from_doc,
    test_to_doc,
)
from .localtests import LocalTest, count_schreier_graphs, enumerate_schreier_graphs, sofic_lower_search, val
from .pirs import irs_upper_bound, m_machine
from .reductions import (
    BoundOracle,
    SCHREIER,
    capped_lsdf,
    greedy_net,
    lsdf_from_bound,
    net_from_lsdf,
    oracle_from_net,
    schreier_bound_from_sparse,
    sparse_bound_from_schreier,
)
from .corpus import random_graph
from .statistics import (
    enumerate_balls,
    enumerate_schreier_balls,
    count_schreier_balls,
    neighborhood_stats,
    schreier_stats,
    stat_distance,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read_json(path: str, inputs: dict) -> dict:
    try:
        with open(path, "rb") as f:
            raw = f.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e
    inputs[path] = hashlib.sha256(raw).hexdigest()
    try:
        return json.loads(raw)
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not valid JSON: {e}") from e


def _manifest(args, inputs: dict) -> dict:
    skip = {"func", "out", "format", "cache_dir"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return {
        "command": args.command,
        "inputs": dict(sorted(inputs.items())),
        "params": params,
        "version": __version__,
        "deterministic": True,
    }


def _load_test(args, inputs) -> LocalTest:
    if args.test:
        return test_from_doc(_read_json(args.test, inputs))
    if args.pattern is None:
        raise UsageError("give --test FILE or --pattern")
    if args.d is None:
        raise UsageError("--pattern needs --d")
    return LocalTest.indicator(args.d, parse_pattern(args.pattern))


# ----------------------------------------------------------------- commands


def cmd_stats(args, inputs):
    g = graph_from_doc(_read_json(args.graph, inputs), args.delta)
    x = schreier_stats(g, args.r) if isinstance(g, SchreierGraph) else neighborhood_stats(g, args.r)
    x.check()
    return {"stats": stats_to_doc(x)}, EXIT_OK


def _catalog_doc(args):
    if args.kind == "graph":
        if args.delta is None:
            raise UsageError("--kind graph needs --delta")
        cap = args.cap_balls
        if cap is None:
            from .reductions import moore_bound

            cap = moore_bound(args.delta, args.r)
        cat = enumerate_balls(args.delta, args.r, cap)
    else:
        if args.d is None:
            raise UsageError("--kind schreier needs --d")
        if args.count_only:
            n = count_schreier_balls(args.d, args.r, args.cap_subgroups)
            return {"kind": "schreier", "params": [args.d, args.r], "size": n}
        cat = enumerate_schreier_balls(args.d, args.r, args.cap_subgroups)
    return {
        "kind": cat.kind,
        "params": list(cat.params),
        "size": len(cat),
        "partial": cat.partial,
        "codes": [c.hex() for c in cat.codes],
    }


def cmd_ballcat(args, inputs):
    if args.cache_dir:
        params = f"{args.delta if args.kind == 'graph' else args.d}-{args.r}"
        extra = f"-cap{args.cap_balls}" if args.cap_balls else ""
        extra += "-count" if args.count_only else ""
        path = os.path.join(args.cache_dir, f"{args.kind}-{params}{extra}-v{__version__}.json")
        if os.path.exists(path):
            with open(path) as f:
                doc = json.load(f)
            print(f"catalog cache hit: {path}", file=sys.stderr)
        else:
            doc = _catalog_doc(args)
            os.makedirs(args.cache_dir, exist_ok=True)
            with open(path, "w") as f:
                f.write(dumps(doc))
        return {"catalog": doc}, EXIT_OK
    return {"catalog": _catalog_doc(args)}, EXIT_OK


def cmd_encode(args, inputs):
    g = graph_from_doc(_read_json(args.graph, inputs))
    if isinstance(g, SchreierGraph):
        layout = GadgetLayout(g.d, tuple(args.pendants)) if args.pendants else None
        h = encode_schreier(g, layout)
    else:
        h = encode_graph(g)
    return graph_to_doc(h), EXIT_OK


def cmd_decode(args, inputs):
    g = graph_from_doc(_read_json(args.graph, inputs))
    if isinstance(g, SchreierGraph):
        if args.delta is None:
            raise UsageError("decoding a Schreier graph needs --delta")
        h, frac = decode_schreier(g, args.delta)
    else:
        h, frac = decode_graph(g, args.d or 2)
    doc = graph_to_doc(h)
    doc["bad_fraction"] = rat(frac)
    return doc, EXIT_OK


def cmd_enum_schreier(args, inputs):
    if args.count_only and not args.dedup:
        n = count_schreier_graphs(args.d, args.n)
        return {"d": args.d, "n": args.n, "dedup": False, "count": n}, EXIT_OK
    graphs = list(enumerate_schreier_graphs(args.d, args.n, args.dedup, args.cap_graphs))
    doc = {"d": args.d, "n": args.n, "dedup": args.dedup, "count": len(graphs)}
    if not args.count_only:
        doc["graphs"] = [[list(p) for p in g.perms] for g in graphs]
    return doc, EXIT_OK


def cmd_sofic_lb(args, inputs):
    t = _load_test(args, inputs)
    res = sofic_lower_search(t, args.nmax, args.cap_graphs)
    if val(t, res.witness) != res.value:
        raise AssertionError("witness value does not reproduce")
    doc = {
        "test": test_to_doc(t),
        "lower_bound": rat(res.value),
        "witness": graph_to_doc(res.witness),
        "graphs_searched": res.graphs_searched,
        "n_max": args.nmax,
    }
    return doc, EXIT_OK


def cmd_pirs_upper(args, inputs):
    t = _load_test(args, inputs)
    k = args.k if args.k is not None else max(t.k, 1)
    ub = irs_upper_bound(t, k, args.cap_subgroups)
    doc = {"test": test_to_doc(t), "k": k, "upper_bound": rat(ub)}
    status = EXIT_OK
    if args.nmax:
        lb = sofic_lower_search(t, args.nmax, args.cap_graphs)
        doc["lower_bound"] = rat(lb.value)
        doc["witness"] = graph_to_doc(lb.witness)
        if lb.value > ub:
            status = EXIT_VIOLATION
    return doc, status


def cmd_pirs_check(args, inputs):
    s = region_from_doc(_read_json(args.region, inputs))
    if tuple(s.catalog) != (SCHREIER, (args.d, args.r)):
        raise UsageError(f"region catalog {s.catalog} does not match schreier ({args.d}, {args.r})")
    res = m_machine(args.d, args.r, s, args.kmax, args.cap_branches)
    doc = {
        "halted": res.halted,
        "k": res.k,
        "trace": [{"k": k, "contained": c} for k, c in res.trace],
        "witness": stats_to_doc(res.witness) if res.witness else None,
    }
    return doc, EXIT_OK if res.halted else EXIT_VIOLATION


def _net_doc(net, n_bound=None):
    return {
        "delta": net.delta,
        "eps": rat(net.eps),
        "r": net.r,
        "provenance": net.provenance,
        "size": len(net.graphs),
        "N": net.max_size if n_bound is None else n_bound,
        "members": [graph_to_doc(g) for g in net.graphs],
    }


def _eps(text: str) -> Fraction:
    eps = parse_rat(text)
    if eps <= 0:
        raise UsageError(f"--eps must be positive, got {text}")
    return eps


def cmd_net(args, inputs):
    eps = _eps(args.eps)
    if args.mode == "greedy":
        net = greedy_net(args.delta, eps, args.r, args.size_cap)
        doc = _net_doc(net)
    else:
        brute = greedy_net(args.delta, eps, args.r, args.size_cap)
        oracle = oracle_from_net(brute)
        net, n_bound = net_from_lsdf(
            args.delta, eps, args.r, lambda e, r, s: lsdf_from_bound(args.delta, e, r, s, oracle, args.cap_graphs)
        )
        doc = _net_doc(net, n_bound)
        doc["oracle"] = {"value": oracle(eps, args.r), "trust": oracle.trust}
    status = EXIT_OK
    if args.audit:
        rng = random.Random(args.seed)
        stats = net.stats()
        worst = Fraction(0)
        for _ in range(args.audit):
            g = random_graph(rng, rng.randint(1, args.audit_max_n), args.delta, rng.choice([0.2, 0.5, 0.9]))
            x = neighborhood_stats(g, args.r)
            worst = max(worst, min(stat_distance(x, y) for y in stats))
        doc["audit"] = {"samples": args.audit, "seed": args.seed, "worst_distance": rat(worst), "covered": worst <= eps}
        if worst > eps:
            status = EXIT_VIOLATION
    return doc, status


def cmd_lsdf(args, inputs):
    s = region_from_doc(_read_json(args.region, inputs))
    eps = _eps(args.eps)
    if args.oracle_value:
        ans = lsdf_from_bound(args.delta, eps, args.r, s, BoundOracle.constant(args.oracle_value), args.cap_graphs)
    else:
        ans = capped_lsdf(args.delta, eps, args.r, s, args.size_cap, args.trusted_n, args.cap_graphs)
    doc = {"answer": ans.status, "graphs_scanned": ans.graphs_scanned}
    if ans.witness is not None:
        x = neighborhood_stats(ans.witness, args.r)
        if not s.contains(x):
            raise AssertionError("witness statistics are outside the region")
        doc["witness"] = graph_to_doc(ans.witness)
        doc["witness_stats"] = stats_to_doc(x)
    if ans.cap is not None:
        doc["cap"] = ans.cap
    return doc, EXIT_CAP if ans.status == "unknown" else EXIT_OK


def cmd_reduce(args, inputs):
    eps = _eps(args.eps)
    if args.direction == "sparse-from-schreier":
        if args.delta is None:
            raise UsageError("sparse-from-schreier needs --delta")
        oracle = BoundOracle.constant(args.oracle_value, SCHREIER, args.trust, 2)
        res = sparse_bound_from_schreier(oracle, args.delta, eps, args.r, args.cap_graphs)
    else:
        oracle = BoundOracle.constant(args.oracle_value, "sparse", args.trust, 3)
        res = schreier_bound_from_sparse(oracle, args.d or 2, eps, args.r, args.cap_graphs)
    doc = {
        "direction": args.direction,
        "N": res.n,
        "eps0": rat(res.eps0),
        "r0": res.r0,
        "oracle_value": res.oracle_value,
        "method": res.method,
        "sentinel": res.sentinel,
        "trust": res.trust,
        "decoded_max": res.decoded_max,
        "note": "dilation constants are conservative policies validated by audits",
    }
    return doc, EXIT_OK


def cmd_selftest(args, inputs):
    from .acceptance import run_all

    results = run_all(quick=args.quick, seed=args.seed)
    doc = {
        "quick": args.quick,
        "criteria": [{"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail} for r in results],
    }
    for r in results:
        print(r.line(), file=sys.stderr)
    return doc, EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATION


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="localstats", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        sp.add_argument("--out", help="write the document here instead of stdout")
        sp.add_argument("--format", choices=["json", "table"], default="json")
        return sp

    def caps(sp, *which):
        if "graphs" in which:
            sp.add_argument("--cap-graphs", type=int, default=5_000_000, help="max graphs enumerated")
        if "subgroups" in which:
            sp.add_argument("--cap-subgroups", type=int, default=200_000, help="max pseudo-subgroup search nodes")
        if "branches" in which:
            sp.add_argument("--cap-branches", type=int, default=100_000, help="max DNF branches per containment check")
        if "balls" in which:
            sp.add_argument("--cap-balls", type=int, default=None, help="max vertices per catalog ball")

    sp = add("stats", cmd_stats, "neighborhood statistics of a graph or Schreier graph")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--delta", type=int, help="override the degree cap of a graph file")

    sp = add("ballcat", cmd_ballcat, "catalog of rooted ball types")
    sp.add_argument("--kind", choices=["graph", "schreier"], required=True)
    sp.add_argument("--delta", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--count-only", action="store_true")
    sp.add_argument("--cache-dir", default=os.environ.get("LOCALSTATS_CACHE"))
    caps(sp, "balls", "subgroups")

    sp = add("encode", cmd_encode, "graph -> F_2 action, or F_d action -> cubic graph")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--pendants", type=int, nargs="+", help="pendant length per generator")

    sp = add("decode", cmd_decode, "inverse of encode, with the bad fraction")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--delta", type=int, help="degree cap when decoding an F_2 action")
    sp.add_argument("--d", type=int, help="generator count when decoding a graph (default 2)")

    sp = add("enum-schreier", cmd_enum_schreier, "all F_d actions on n points")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--dedup", action="store_true", help="one action per conjugacy class")
    sp.add_argument("--count-only", action="store_true")
    caps(sp, "graphs")

    for name, func, help in (
        ("sofic-lb", cmd_sofic_lb, "brute-force lower bound on the sofic value of a local test"),
        ("pirs-upper", cmd_pirs_upper, "LP upper bound over pseudo-IRS"),
    ):
        sp = add(name, func, help)
        sp.add_argument("--test", help="local test JSON file")
        sp.add_argument("--pattern", help='indicator pattern such as "a1; !a1^2"')
        sp.add_argument("--d", type=int)
        if name == "sofic-lb":
            sp.add_argument("--nmax", type=int, required=True)
        else:
            sp.add_argument("--k", type=int)
            sp.add_argument("--nmax", type=int, help="also search graphs up to this size")
        caps(sp, "graphs", "subgroups")

    sp = add("pirs-check", cmd_pirs_check, "run the containment machine up to kmax")
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--region", required=True)
    sp.add_argument("--kmax", type=int, required=True)
    caps(sp, "branches")

    sp = add("net", cmd_net, "epsilon-net of graph statistics")
    sp.add_argument("--delta", type=int, required=True)
    sp.add_argument("--eps", required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--size-cap", type=int, required=True)
    sp.add_argument("--mode", choices=["greedy", "lsdf"], default="greedy")
    sp.add_argument("--audit", type=int, default=0, help="random graphs to check coverage on")
    sp.add_argument("--audit-max-n", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)
    caps(sp, "graphs")

    sp = add("lsdf", cmd_lsdf, "decide whether some small graph has statistics in a region")
    sp.add_argument("--delta", type=int, required=True)
    sp.add_argument("--eps", required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--region", required=True)
    sp.add_argument("--size-cap", type=int, default=6)
    sp.add_argument("--trusted-n", type=int, help="a trusted regularity bound, enabling 'no'")
    sp.add_argument("--oracle-value", type=int, help="scan exactly up to this bound")
    caps(sp, "graphs")

    sp = add("reduce", cmd_reduce, "transfer a regularity bound between the two settings")
    sp.add_argument("--direction", choices=["sparse-from-schreier", "schreier-from-sparse"], required=True)
    sp.add_argument("--oracle-value", type=int, required=True)
    sp.add_argument("--trust", default="stub")
    sp.add_argument("--delta", type=int)
    sp.add_argument("--d", type=int)
    sp.add_argument("--eps", required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--cap-graphs", type=int, default=200_000)

    sp = add("selftest", cmd_selftest, "run the acceptance checks")
    sp.add_argument("--quick", action="store_true", help="smaller corpora")
    sp.add_argument("--seed", type=int, help="shift every corpus seed")
    return p


def _table(doc, indent=0) -> list[str]:
    color = sys.stdout.isatty() and "NO_COLOR" not in os.environ
    bold, reset = ("\033[1m", "\033[0m") if color else ("", "")
    lines = []
    pad = "  " * indent
    for k in sorted(doc):
        v = doc[k]
        if isinstance(v, dict):
            lines.append(f"{pad}{bold}{k}{reset}")
            lines.extend(_table(v, indent + 1))
        elif isinstance(v, list) and len(v) > 8:
            lines.append(f"{pad}{bold}{k}{reset}: [{len(v)} items]")
        else:
            lines.append(f"{pad}{bold}{k}{reset}: {json.dumps(v)}")
    return lines


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    inputs: dict[str, str] = {}
    try:
        doc, status = args.func(args, inputs)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceCapExceeded as e:
        print(f"resource cap: {e}", file=sys.stderr)
        return EXIT_CAP
    except (GraphError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    doc["manifest"] = _manifest(args, inputs)
    text = dumps(doc) if args.format == "json" else "\n".join(_table(doc)) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
