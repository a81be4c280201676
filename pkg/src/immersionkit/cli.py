"""Batch command-line interface.

Every command prints a JSON report (or a graph document for ``gen``).
Exit codes: 0 verdict yes / success, 1 verdict no, 2 input error,
3 cap or budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any, Sequence

from . import serialize as ser
from .errors import BUDGET_EXCEEDED, CapExceededError, ImmersionKitError
from .immersion import find_immersion
from .multigraph import Multigraph, gen_P, gen_S, gen_random
from .spiders import find_spider, pack_spiders, spider_obstruction
from .structure import StructureBounds, hop_width_of_order, min_hop_width, search_structure_certificate, verify_structure_certificate
from .tangles import MinorModel, induced_tangle, is_free, is_tangle, tangle_minus
from .treecut import tcw_bounds

EXIT_YES, EXIT_NO, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _graph(path: str) -> Multigraph:
    return ser.canonical(ser.parse_graph(_read(path)))


def _json(path: str) -> Any:
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ser.DocumentError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None


def _ints(text: str) -> list[int]:
    text = text.strip()
    return [int(t) for t in text.split(",")] if text else []


def _model(text: str) -> MinorModel:
    return MinorModel(tuple(frozenset(_ints(part)) for part in text.split(";")))


def _report(verdict: str, result: dict | None = None, certificate: dict | None = None) -> dict[str, Any]:
    # no analysis command draws random numbers, so the seed is recorded as null
    return {"verdict": verdict, "result": result or {}, "certificate": certificate, "seed": None}


# -- commands ----------------------------------------------------------------------

def cmd_gen(a) -> tuple[int, Any]:
    if a.family == "P":
        k, n = a.params
        g = gen_P(k, n)
    elif a.family == "S":
        l, m = a.params
        g = gen_S(l, m)
    else:
        seed, n, m, mult = a.params
        g = gen_random(seed, n, m, mult)
    return EXIT_YES, ser.emit_dot(g) if a.dot else ser.emit_graph(g)


def cmd_immerse(a):
    g, h = _graph(a.host), _graph(a.pattern)
    got = find_immersion(g, h, a.mode, budget=a.budget)
    if got is BUDGET_EXCEEDED:
        return EXIT_CAP, _report("budget_exceeded")
    if got is None:
        return EXIT_NO, _report("no", {"mode": a.mode})
    return EXIT_YES, _report("yes", {"mode": a.mode}, ser.immersion_cert(g, h, got))


def cmd_spider(a):
    g = _graph(a.graph)
    x = _ints(a.x)
    s = find_spider(g, x, a.k)
    if s is not None:
        return EXIT_YES, _report("yes", {"body": s.body}, ser.spider_cert(g, x, a.k, s))
    cert = ser.obstruction_cert(g, x, spider_obstruction(g, x, a.k)) if a.certify else None
    return EXIT_NO, _report("no", {}, cert)


def cmd_pack(a):
    g = _graph(a.graph)
    x = _ints(a.x)
    p = pack_spiders(g, x, a.k, a.t)
    verdict = "packing" if p.hitting_set is None else "hitting_set"
    result = {"spiders": len(p.spiders), "hitting_set_size": None if p.hitting_set is None else len(p.hitting_set)}
    return EXIT_YES, _report(verdict, result, ser.packing_cert(g, x, a.k, a.t, p))


def cmd_tcw(a):
    g = _graph(a.graph)
    b = tcw_bounds(g, exact_cap=a.exact_cap)
    result = {"lower": b.lower, "upper": b.upper, "exact": b.exact}
    return EXIT_YES, _report("yes", result, ser.tree_cut_cert(g, b.witness, b.lower, b.upper))


def cmd_hopwidth(a):
    g = _graph(a.graph)
    if a.order is not None:
        order = _ints(a.order)
        w, exact = hop_width_of_order(g, order), False
    else:
        w, order, exact = min_hop_width(g)
    result = {"width": w, "minimum": exact}
    return EXIT_YES, _report("yes", result, ser.hop_width_cert(g, order, w, exact))


def _certificate(path: str) -> Any:
    doc = _json(path)
    if isinstance(doc, dict) and "kind" not in doc and isinstance(doc.get("certificate"), dict):
        doc = doc["certificate"]  # a whole report was given
    return doc


def _tangle_from(path: str):
    doc = _certificate(path)
    if doc.get("kind") != "tangle":
        raise ser.DocumentError("expected a tangle certificate")
    g = ser.doc_to_graph(doc["graph"])
    return g, doc, ser.doc_to_tangle(g, doc)


def cmd_tangle(a):
    if a.tangle_cmd == "induce":
        g = _graph(a.graph)
        model = _model(a.model)
        t = induced_tangle(g, model, a.k, edge_cap=a.edge_cap)
        if t.members is None:
            raise CapExceededError("tangle is too large to materialize")
        return EXIT_YES, _report("yes", {"order": t.order, "members": len(t.members)}, ser.tangle_cert(g, t, model))
    g, doc, t = _tangle_from(a.cert)
    if a.tangle_cmd == "check":
        chk = is_tangle(g, t.members, t.order, edge_cap=a.edge_cap)
        return (EXIT_YES if chk else EXIT_NO), _report("yes" if chk else "no", {"axiom": chk.axiom})
    if a.tangle_cmd == "minus":
        h, tm = tangle_minus(g, t, _ints(a.z), edge_cap=a.edge_cap)
        return EXIT_YES, _report("yes", {"order": tm.order, "members": len(tm.members)}, ser.tangle_cert(h, tm))
    x = _ints(a.x)
    free, witness = is_free(g, t, x)
    cert = ser.free_cert(g, doc, x, free, witness)
    return (EXIT_YES if free else EXIT_NO), _report("yes" if free else "no", {"free": free}, cert)


def _bounds(text: str) -> StructureBounds:
    vals = _ints(text)
    if len(vals) != 4:
        raise ser.DocumentError("bounds need four integers: a_max,z_max,comp_max,hop_max")
    return StructureBounds(*vals)


def cmd_structure(a):
    if a.structure_cmd == "verify":
        doc = _certificate(a.cert)
        g = ser.doc_to_graph(doc["graph"])
        v = verify_structure_certificate(g, ser.doc_to_structure(doc))
        return (EXIT_YES if v.ok else EXIT_NO), _report("yes" if v.ok else "no", {"first_violation": v.violation})
    g = _graph(a.graph)
    got = search_structure_certificate(g, a.threshold, _bounds(a.bounds), l=a.l)
    if got is BUDGET_EXCEEDED:
        return EXIT_CAP, _report("budget_exceeded")
    if got is None:
        return EXIT_NO, _report("no")
    result = {"a_size": len(got.a_set), "z_size": len(got.z_set), "components": len(got.component_orders)}
    return EXIT_YES, _report("yes", result, ser.structure_cert(g, got))


def cmd_verify(a):
    doc = _certificate(a.cert)
    graph = _graph(a.graph) if a.graph else None
    why = ser.verify_certificate(doc, graph)
    kind = doc.get("kind")
    return (EXIT_YES if why is None else EXIT_NO), _report(
        "accepted" if why is None else "rejected", {"kind": kind, "reason": why}
    )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="immersionkit", description="Immersion, spider, tangle and tree-cut tools for multigraphs.")
    p.add_argument("--no-timing", action="store_true", help="omit the timing field from reports")
    p.add_argument("--out", help="write output to this file instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a graph document")
    g.add_argument("family", choices=["P", "S", "random"])
    g.add_argument("params", type=int, nargs="+")
    g.add_argument("--dot", action="store_true", help="emit DOT instead of JSON")
    g.set_defaults(func=cmd_gen)

    i = sub.add_parser("immerse", help="search for an immersion of a pattern")
    i.add_argument("--host", required=True)
    i.add_argument("--pattern", required=True)
    i.add_argument("--mode", choices=["weak", "strong"], default="weak")
    i.add_argument("--budget", type=int, default=10_000_000)
    i.set_defaults(func=cmd_immerse)

    s = sub.add_parser("spider", help="find an X-spider or a cut partition")
    s.add_argument("--graph", required=True)
    s.add_argument("--x", required=True, help="comma-separated vertex ids")
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--certify", action="store_true", help="emit an obstruction when no spider exists")
    s.set_defaults(func=cmd_spider)

    k = sub.add_parser("pack", help="greedy spider packing with a hitting set")
    k.add_argument("--graph", required=True)
    k.add_argument("--x", required=True)
    k.add_argument("--k", type=int, required=True)
    k.add_argument("--t", type=int, required=True)
    k.set_defaults(func=cmd_pack)

    t = sub.add_parser("tcw", help="tree-cut width bounds with a witness")
    t.add_argument("--graph", required=True)
    t.add_argument("--exact-cap", type=int, default=7)
    t.set_defaults(func=cmd_tcw)

    h = sub.add_parser("hopwidth", help="hop-width of an order, or the minimum")
    h.add_argument("--graph", required=True)
    h.add_argument("--order")
    h.set_defaults(func=cmd_hopwidth)

    tg = sub.add_parser("tangle", help="tangle operations on small graphs")
    tg.add_argument("--edge-cap", type=int, default=40)
    tsub = tg.add_subparsers(dest="tangle_cmd", required=True)
    tc = tsub.add_parser("check")
    tc.add_argument("--cert", required=True)
    ti = tsub.add_parser("induce")
    ti.add_argument("--graph", required=True)
    ti.add_argument("--model", required=True, help="branch sets as '0,1;2;3'")
    ti.add_argument("--k", type=int, required=True)
    tm = tsub.add_parser("minus")
    tm.add_argument("--cert", required=True)
    tm.add_argument("--z", required=True)
    tf = tsub.add_parser("free")
    tf.add_argument("--cert", required=True)
    tf.add_argument("--x", required=True)
    tg.set_defaults(func=cmd_tangle)

    st = sub.add_parser("structure", help="structure certificates")
    ssub = st.add_subparsers(dest="structure_cmd", required=True)
    sv = ssub.add_parser("verify")
    sv.add_argument("--cert", required=True)
    ss = ssub.add_parser("search")
    ss.add_argument("--graph", required=True)
    ss.add_argument("--threshold", type=int, required=True)
    ss.add_argument("--bounds", required=True, help="a_max,z_max,comp_max,hop_max")
    ss.add_argument("--l", type=int, default=4)
    st.set_defaults(func=cmd_structure)

    v = sub.add_parser("verify", help="re-check any certificate")
    v.add_argument("--cert", required=True)
    v.add_argument("--graph")
    v.set_defaults(func=cmd_verify)
    return p


def _echo(argv: list[str]) -> list[str]:
    """The command line minus ``--out``, which does not affect the result."""
    out, skip = [], False
    for arg in argv:
        if skip:
            skip = False
        elif arg == "--out":
            skip = True
        elif not arg.startswith("--out="):
            out.append(arg)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    a = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        code, out = a.func(a)
    except CapExceededError as exc:
        code, out = EXIT_CAP, _report("cap_exceeded", {"error": str(exc)})
    except (ImmersionKitError, ValueError, KeyError, OSError) as exc:
        code, out = EXIT_INPUT, _report("input_error", {"error": str(exc)})
    if isinstance(out, dict):
        out["command"] = _echo(argv)
        if not a.no_timing:
            out["timing"] = {"seconds": round(time.perf_counter() - start, 6)}
        text = ser.dumps(out)
    else:
        text = out
    if a.out:
        with open(a.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
