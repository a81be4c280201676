"""JSON documents for graphs and certificates, DOT export, and certificate verification.

Graph documents list edges as ``[u, v]`` pairs; the edge id is the list
index. Emission canonicalizes the order by (min endpoint, max endpoint,
original index), so certificates are always stated against canonical ids.
"""
from __future__ import annotations

import json
from typing import Any

from .errors import GraphError, InvalidCertificateError
from .flows import Path, PathBundle
from .immersion import ImmersionCertificate, immersion_violation
from .multigraph import Multigraph
from .spiders import (
    Spider,
    SpiderObstruction,
    SpiderPacking,
    obstruction_violation,
    packing_violation,
    spider_violation,
)
from .structure import StructureBounds, StructureCertificate, hop_width_of_order, min_hop_width, verify_structure_certificate
from .tangles import MinorModel, Separation, Tangle, induced_tangle, is_free, is_tangle, separation_violation
from .treecut import TreeCutDecomposition, decomposition_violation, exact_tree_cut_width, tcw_lower_bound, width

FORMAT = "immersionkit-graph"
VERSION = 1


class DocumentError(GraphError):
    """Malformed graph or certificate document; carries a source position when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line, self.column = line, column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


def _line_col(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def _edge_offsets(text: str) -> list[int]:
    """Character offset of each element of the top-level "edges" array."""
    dec = json.JSONDecoder()
    key = text.find('"edges"')
    if key < 0:
        return []
    i = text.find("[", text.find(":", key)) + 1
    out = []
    while True:
        while i < len(text) and text[i] in " \t\r\n,":
            i += 1
        if i >= len(text) or text[i] == "]":
            return out
        out.append(i)
        _, i = dec.raw_decode(text, i)


def canonical(g: Multigraph) -> Multigraph:
    keyed = sorted(range(g.edge_count), key=lambda e: (min(g.edges[e]), max(g.edges[e]), e))
    return Multigraph(g.vertex_count, tuple((min(g.edges[e]), max(g.edges[e])) for e in keyed), g.name)


def graph_to_doc(g: Multigraph) -> dict[str, Any]:
    c = canonical(g)
    doc: dict[str, Any] = {"format": FORMAT, "version": VERSION, "vertex_count": c.vertex_count}
    if c.name is not None:
        doc["name"] = c.name
    doc["edges"] = [list(e) for e in c.edges]
    return doc


def doc_to_graph(doc: Any, text: str | None = None) -> Multigraph:
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise DocumentError(f"not a {FORMAT} document")
    if doc.get("version") != VERSION:
        raise DocumentError(f"unsupported version {doc.get('version')!r}")
    n = doc.get("vertex_count")
    edges = doc.get("edges")
    if not isinstance(n, int) or n < 0 or not isinstance(edges, list):
        raise DocumentError("vertex_count must be a non-negative integer and edges a list")
    offsets = _edge_offsets(text) if text is not None else []
    for i, e in enumerate(edges):
        pos = _line_col(text, offsets[i]) if i < len(offsets) else (None, None)
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(v, int) for v in e)):
            raise DocumentError(f"edge {i} must be a pair of integers", *pos)
        if e[0] == e[1]:
            raise DocumentError(f"edge {i} is a loop at vertex {e[0]}", *pos)
        if not all(0 <= v < n for v in e):
            raise DocumentError(f"edge {i} references a vertex outside [0, {n})", *pos)
    return Multigraph(n, tuple(tuple(e) for e in edges), doc.get("name"))


def parse_graph(text: str) -> Multigraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return doc_to_graph(doc, text)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def emit_graph(g: Multigraph) -> str:
    return dumps(graph_to_doc(g))


def emit_dot(g: Multigraph) -> str:
    c = canonical(g)
    name = (c.name or "G").replace('"', "")
    lines = [f'graph "{name}" {{']
    lines += [f"  {v};" for v in c.vertices]
    lines += [f"  {u} -- {v};" for u, v in c.edges]
    return "\n".join(lines) + "\n}\n"


# -- certificates -------------------------------------------------------------------

def _sorted(xs) -> list[int]:
    return sorted(int(x) for x in xs)


def path_to_doc(p: Path) -> dict[str, Any]:
    return {"vertices": list(p.vertices), "edges": list(p.edges)}


def spider_to_doc(s: Spider) -> dict[str, Any]:
    return {"body": s.body, "order": s.order, "legs": [path_to_doc(p) for p in s.legs]}


def doc_to_spider(d: dict) -> Spider:
    legs = tuple(Path(tuple(p["vertices"]), tuple(p["edges"])) for p in d["legs"])
    return Spider(int(d["body"]), int(d["order"]), PathBundle(legs))


def separation_to_doc(s: Separation) -> dict[str, Any]:
    return {
        "a_edges": _sorted(s.a_edges),
        "a_vertices": _sorted(s.a_vertices),
        "b_vertices": _sorted(s.b_vertices),
    }


def doc_to_separation(g: Multigraph, d: dict) -> Separation:
    a = frozenset(d["a_edges"])
    return Separation(a, frozenset(g.edge_ids) - a, frozenset(d["a_vertices"]), frozenset(d["b_vertices"]))


def immersion_cert(host: Multigraph, pattern: Multigraph, c: ImmersionCertificate) -> dict[str, Any]:
    return {
        "kind": "immersion",
        "graph": graph_to_doc(host),
        "pattern": graph_to_doc(pattern),
        "mode": c.mode,
        "branch": {str(k): v for k, v in sorted(c.branch.items())},
        "composite": {str(k): list(v) for k, v in sorted(c.composite.items())},
    }


def spider_cert(g: Multigraph, x, k: int, s: Spider) -> dict[str, Any]:
    return {"kind": "spider", "graph": graph_to_doc(g), "x": _sorted(x), "k": k, "spider": spider_to_doc(s)}


def obstruction_cert(g: Multigraph, x, obs: SpiderObstruction) -> dict[str, Any]:
    return {
        "kind": "spider_obstruction",
        "graph": graph_to_doc(g),
        "x": _sorted(x),
        "k": obs.k,
        "parts": [_sorted(p) for p in obs.parts],
    }


def packing_cert(g: Multigraph, x, k: int, t: int, p: SpiderPacking) -> dict[str, Any]:
    return {
        "kind": "spider_packing",
        "graph": graph_to_doc(g),
        "x": _sorted(x),
        "k": k,
        "t": t,
        "spiders": [spider_to_doc(s) for s in p.spiders],
        "hitting_set": None if p.hitting_set is None else _sorted(p.hitting_set),
    }


def tree_cut_cert(g: Multigraph, d: TreeCutDecomposition, lower: int, upper: int) -> dict[str, Any]:
    return {
        "kind": "tree_cut",
        "graph": graph_to_doc(g),
        "tree_edges": [list(e) for e in d.tree_edges],
        "bags": [_sorted(b) for b in d.bags],
        "lower": lower,
        "upper": upper,
    }


def hop_width_cert(g: Multigraph, order, w: int, exact: bool) -> dict[str, Any]:
    return {"kind": "hop_width", "graph": graph_to_doc(g), "order": list(order), "width": w, "minimum": exact}


def tangle_cert(g: Multigraph, t: Tangle, model: MinorModel | None = None) -> dict[str, Any]:
    if t.members is None:
        raise InvalidCertificateError("only materialized tangles can be written out")
    mem = sorted((separation_to_doc(s) for s in t.members), key=lambda d: json.dumps(d, sort_keys=True))
    doc = {"kind": "tangle", "graph": graph_to_doc(g), "order": t.order, "members": mem}
    if model is not None:
        doc["model"] = [_sorted(b) for b in model.branch_sets]
    return doc


def doc_to_tangle(g: Multigraph, doc: dict) -> Tangle:
    return Tangle.from_members(int(doc["order"]), (doc_to_separation(g, m) for m in doc["members"]))


def free_cert(g: Multigraph, tangle_doc: dict, x, free: bool, witness: Separation | None) -> dict[str, Any]:
    return {
        "kind": "free_check",
        "graph": graph_to_doc(g),
        "tangle": tangle_doc,
        "x": _sorted(x),
        "free": free,
        "witness": None if witness is None else separation_to_doc(witness),
    }


def structure_cert(g: Multigraph, c: StructureCertificate) -> dict[str, Any]:
    b = c.bounds
    return {
        "kind": "structure",
        "graph": graph_to_doc(g),
        "a_set": _sorted(c.a_set),
        "z_set": _sorted(c.z_set),
        "component_orders": [list(o) for o in c.component_orders],
        "bounds": {"a_max": b.a_max, "z_max": b.z_max, "comp_max": b.comp_max, "hop_max": b.hop_max},
    }


def doc_to_structure(doc: dict) -> StructureCertificate:
    return StructureCertificate(
        frozenset(doc["a_set"]),
        frozenset(doc["z_set"]),
        tuple(tuple(o) for o in doc["component_orders"]),
        StructureBounds(**doc["bounds"]),
    )


def _verify(kind: str, g: Multigraph, doc: dict) -> str | None:
    if kind == "immersion":
        h = doc_to_graph(doc["pattern"])
        c = ImmersionCertificate(doc["branch"], doc["composite"], doc["mode"])
        return immersion_violation(g, h, c)
    if kind == "spider":
        s = doc_to_spider(doc["spider"])
        if s.order != doc["k"]:
            return "spider order differs from k"
        return spider_violation(g, doc["x"], s)
    if kind == "spider_obstruction":
        obs = SpiderObstruction(tuple(frozenset(p) for p in doc["parts"]), int(doc["k"]))
        return obstruction_violation(g, doc["x"], obs)
    if kind == "spider_packing":
        hs = doc["hitting_set"]
        p = SpiderPacking(
            tuple(doc_to_spider(s) for s in doc["spiders"]), None if hs is None else frozenset(hs)
        )
        return packing_violation(g, doc["x"], int(doc["k"]), int(doc["t"]), p)
    if kind == "tree_cut":
        d = TreeCutDecomposition(len(doc["bags"]), tuple(map(tuple, doc["tree_edges"])), tuple(map(frozenset, doc["bags"])))
        why = decomposition_violation(g, d)
        if why:
            return why
        got = width(g, d, warn=False)
        if got != doc["upper"]:
            return f"decomposition has width {got}, claimed {doc['upper']}"
        if doc["lower"] > tcw_lower_bound(g) and doc["lower"] != exact_tree_cut_width(g)[0]:
            return "claimed lower bound is not justified"
        return None
    if kind == "hop_width":
        got = hop_width_of_order(g, doc["order"])
        if got != doc["width"]:
            return f"order has hop-width {got}, claimed {doc['width']}"
        if doc["minimum"] and min_hop_width(g).width != got:
            return "order is not optimal"
        return None
    if kind == "tangle":
        t = doc_to_tangle(g, doc)
        for s in t.members:
            why = separation_violation(g, s)
            if why:
                return why
        chk = is_tangle(g, t.members, t.order, edge_cap=max(g.edge_count, 18))
        if not chk:
            return f"tangle axiom {chk.axiom} fails"
        if "model" in doc:
            ind = induced_tangle(g, MinorModel(tuple(map(frozenset, doc["model"]))), t.order, edge_cap=max(g.edge_count, 18))
            if ind.members != t.members:
                return "members differ from the tangle induced by the model"
        return None
    if kind == "free_check":
        tdoc = doc["tangle"]
        why = _verify("tangle", g, tdoc)
        if why:
            return why
        t = doc_to_tangle(g, tdoc)
        x = frozenset(doc["x"])
        if doc["witness"] is None:
            if not doc["free"]:
                return "non-free verdict without a witness"
            free, _ = is_free(g, t, x)
            return None if free else "set is not free"
        w = doc_to_separation(g, doc["witness"])
        if doc["free"] or w not in t or w.order >= len(x) or not x <= w.a_vertices:
            return "witness does not show the set is not free"
        return None
    if kind == "structure":
        v = verify_structure_certificate(g, doc_to_structure(doc))
        return None if v.ok else f"condition {v.violation} fails"
    raise InvalidCertificateError(f"unknown certificate kind {kind!r}")


def verify_certificate(doc: Any, graph: Multigraph | None = None) -> str | None:
    """Re-check a certificate document; None when it is accepted."""
    if not isinstance(doc, dict) or "kind" not in doc or "graph" not in doc:
        raise DocumentError("certificate must be an object with kind and graph")
    g = doc_to_graph(doc["graph"])
    if graph is not None and canonical(graph) != g:
        raise InvalidCertificateError("certificate was issued for a different graph")
    try:
        return _verify(doc["kind"], g, doc)
    except (KeyError, TypeError) as exc:
        raise DocumentError(f"malformed {doc['kind']} certificate: {exc}") from None
