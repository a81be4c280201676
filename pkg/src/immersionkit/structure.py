"""Hop-width, the parallel-edge graph R, clumps, path structure of graphs
without a K_{1,l} minor, and structure certificates for graphs excluding a
strong clique immersion.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import BUDGET_EXCEEDED, BoundViolationError, BudgetExceeded, GraphError, InvalidCertificateError
from .flows import is_k_edge_connected
from .multigraph import Multigraph, delete_edges, induced_subgraph, neighborhood

EXACT_HOP_CAP = 18


def _positions(g: Multigraph, order: Sequence[int]) -> list[int]:
    if sorted(order) != list(g.vertices):
        raise GraphError("order must list every vertex exactly once")
    pos = [0] * g.vertex_count
    for i, v in enumerate(order):
        pos[v] = i
    return pos


def hop_width_of_order(g: Multigraph, order: Sequence[int]) -> int:
    """Most edges jumping strictly over a single position of ``order``."""
    pos = _positions(g, order)
    n = g.vertex_count
    if n <= 2:
        return 0
    diff = [0] * (n + 1)
    for u, v in g.edges:
        a, b = sorted((pos[u], pos[v]))
        diff[a + 1] += 1
        diff[b] -= 1
    best = run = 0
    for i in range(n):
        run += diff[i]
        best = max(best, run)
    return best


def cut_width_of_order(g: Multigraph, order: Sequence[int]) -> int:
    """Most edges crossing a gap between consecutive positions."""
    pos = _positions(g, order)
    n = g.vertex_count
    diff = [0] * (n + 1)
    for u, v in g.edges:
        a, b = sorted((pos[u], pos[v]))
        diff[a] += 1
        diff[b] -= 1
    best = run = 0
    for i in range(max(n - 1, 0)):
        run += diff[i]
        best = max(best, run)
    return best


class HopWidth(NamedTuple):
    width: int
    order: tuple[int, ...]
    exact: bool


def _greedy_order(g: Multigraph) -> tuple[int, ...]:
    n = g.vertex_count
    best_order, best_w = tuple(range(n)), hop_width_of_order(g, range(n))
    for start in range(n):
        placed = {start}
        order = [start]
        cut = {v: g.multiplicity(start, v) for v in g.vertices if v != start}
        boundary = g.degree(start)
        while len(order) < n:
            # cost of placing v next is |delta(S)| - e(S, v)
            v = min((x for x in g.vertices if x not in placed), key=lambda x: (boundary - cut[x], x))
            boundary += g.degree(v) - 2 * cut[v]
            placed.add(v)
            order.append(v)
            for e in g.incidence[v]:
                w = g.other_end(e, v)
                if w not in placed:
                    cut[w] += 1
        w = hop_width_of_order(g, order)
        if w < best_w:
            best_order, best_w = tuple(order), w
    return best_order


def min_hop_width(g: Multigraph, exact_cap: int = EXACT_HOP_CAP) -> HopWidth:
    """Minimum hop-width over all linear orders (subset DP up to ``exact_cap`` vertices)."""
    n = g.vertex_count
    if n <= 2:
        return HopWidth(0, tuple(range(n)), True)
    if n > exact_cap:
        order = _greedy_order(g)
        return HopWidth(hop_width_of_order(g, order), order, False)
    size = 1 << n
    masks = np.arange(size, dtype=np.int64)
    bits = [((masks >> v) & 1).astype(np.int32) for v in range(n)]
    cut = np.zeros(size, dtype=np.int32)
    to_v = [np.zeros(size, dtype=np.int32) for _ in range(n)]
    for u, v in g.edges:
        cut += bits[u] ^ bits[v]
        to_v[v] += bits[u]
        to_v[u] += bits[v]
    big = np.int32(1 << 30)
    best = np.full(size, big, dtype=np.int32)
    best[0] = 0
    pop = np.zeros(size, dtype=np.int32)
    for v in range(n):
        pop += bits[v]
    layers = [masks[pop == k] for k in range(n)]
    for layer in layers:
        for v in range(n):
            sel = layer[bits[v][layer] == 0]
            if sel.size == 0:
                continue
            cand = np.maximum(best[sel], cut[sel] - to_v[v][sel])
            tgt = sel | (1 << v)
            best[tgt] = np.minimum(best[tgt], cand)
    full = size - 1
    order: list[int] = []
    s = full
    while s:
        for v in range(n):
            if s >> v & 1:
                p = s & ~(1 << v)
                if max(int(best[p]), int(cut[p] - to_v[v][p])) == int(best[s]):
                    order.append(v)
                    s = p
                    break
    order.reverse()
    w = int(best[full])
    if hop_width_of_order(g, order) != w:
        raise BoundViolationError("reconstructed order does not attain the optimum")
    return HopWidth(w, tuple(order), True)


def parallel_graph_R(g: Multigraph, p: int) -> Multigraph:
    """Simple graph joining pairs with at least ``p`` parallel edges."""
    if p < 1:
        raise GraphError("threshold must be at least 1")
    return Multigraph(g.vertex_count, tuple(sorted(k for k, c in g.multiplicities.items() if c >= p)))


# -- clumps ----------------------------------------------------------------------

@dataclass(frozen=True)
class Clump:
    j_vertices: frozenset[int]
    x_subset: frozenset[int]
    threshold: int

    def __post_init__(self):
        object.__setattr__(self, "j_vertices", frozenset(self.j_vertices))
        object.__setattr__(self, "x_subset", frozenset(self.x_subset))


class Verdict(NamedTuple):
    ok: bool
    violation: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def _connected_enough(g: Multigraph, vs: Iterable[int], k: int) -> bool:
    sub = induced_subgraph(g, vs).graph
    return sub.vertex_count < 2 or is_k_edge_connected(sub, k)


def check_clump(g: Multigraph, r: Multigraph, c: Clump) -> Verdict:
    """Evaluate the clump conditions in order and report the first that fails."""
    if r != parallel_graph_R(g, c.threshold):
        raise GraphError("R does not match the clump threshold")
    j, x, p = c.j_vertices, c.x_subset, c.threshold
    if not x or not x <= j:
        return Verdict(False, "X")
    rest = j - x
    if len(j) != 1 and not _connected_enough(g, j, p):
        return Verdict(False, "a")
    comps = r.components()
    if any(comp & j and not comp <= j for comp in comps):
        return Verdict(False, "b")
    if rest:
        for v in x:
            if sum(1 for e in g.incidence[v] if g.other_end(e, v) in rest) < p:
                return Verdict(False, "c")
    if len(rest) >= 2 and (not _connected_enough(g, rest, p) or len(x) < 2):
        return Verdict(False, "d")
    if not rest and not (len(j) == 1 and len(x) == 1):
        return Verdict(False, "e")
    if len(j) >= 3 and len(x) < sum(1 for comp in comps if comp <= j) + 1:
        return Verdict(False, "f")
    return Verdict(True)


# -- K_{1,l}-free path structure -----------------------------------------------

@dataclass(frozen=True)
class StarMinor:
    center: frozenset[int]
    leaves: tuple[frozenset[int], ...]


@dataclass(frozen=True)
class PathStructure:
    x_set: frozenset[int]
    paths: tuple[tuple[int, ...], ...]


def star_minor_violation(r: Multigraph, m: StarMinor, l: int) -> str | None:
    sets = (m.center,) + m.leaves
    if len(m.leaves) != l:
        return f"model has {len(m.leaves)} leaves, expected {l}"
    seen: set[int] = set()
    for s in sets:
        if not s or s & seen or not r.is_connected(s):
            return "branch sets must be nonempty, disjoint and connected"
        seen |= s
    for leaf in m.leaves:
        if not any(w in leaf for v in m.center for w in r.adjacency[v]):
            return "a leaf set is not adjacent to the center"
    return None


def path_structure_violation(r: Multigraph, ps: PathStructure, l: int) -> str | None:
    x = ps.x_set
    if len(x) >= 4 * l:
        return f"|X| = {len(x)} is not below 4l"
    comps = r.components(set(r.vertices) - x)
    if len(comps) > 2 * l:
        return f"{len(comps)} components exceed 2l"
    if sorted(map(frozenset, ps.paths), key=min) != sorted(comps, key=min):
        return "listed paths are not the components of G - X"
    for p in ps.paths:
        if len(set(p)) != len(p):
            return "path repeats a vertex"
        inner = sum(1 for u, v in r.edges if u in p and v in p)
        if inner != len(p) - 1 or any(p[i + 1] not in r.adjacency[p[i]] for i in range(len(p) - 1)):
            return f"component {list(p)} is not a path in the given order"
        for v in p[1:-1]:
            if r.adjacency[v] & x:
                return f"internal vertex {v} has a neighbor in X"
    return None


def _leaf_count(adj: dict[int, set[int]]) -> int:
    return sum(1 for v in adj if len(adj[v]) == 1)


def _tree_path(adj: dict[int, set[int]], s: int, t: int) -> list[tuple[int, int]]:
    parent = {s: None}
    stack = [s]
    while stack:
        a = stack.pop()
        for b in adj[a]:
            if b not in parent:
                parent[b] = a
                stack.append(b)
    out = []
    while t != s:
        out.append((parent[t], t))
        t = parent[t]
    return out


def max_leaf_spanning_tree(r: Multigraph) -> dict[int, set[int]]:
    """Spanning tree improved by single edge swaps until no swap adds a leaf."""
    n = r.vertex_count
    root = max(r.vertices, key=lambda v: (len(r.adjacency[v]), -v))
    tree: dict[int, set[int]] = {v: set() for v in r.vertices}
    seen = {root}
    frontier = [root]
    while frontier:
        nxt = []
        for a in frontier:
            for b in sorted(r.adjacency[a]):
                if b not in seen:
                    seen.add(b)
                    tree[a].add(b)
                    tree[b].add(a)
                    nxt.append(b)
        frontier = nxt
    if len(seen) != n:
        raise GraphError("graph is not connected")
    improved = True
    while improved:
        improved = False
        leaves = _leaf_count(tree)
        for u, v in r.edges:
            if v in tree[u]:
                continue
            for a, b in _tree_path(tree, u, v):
                tree[a].discard(b)
                tree[b].discard(a)
                tree[u].add(v)
                tree[v].add(u)
                if _leaf_count(tree) > leaves:
                    improved = True
                    break
                tree[u].discard(v)
                tree[v].discard(u)
                tree[a].add(b)
                tree[b].add(a)
            if improved:
                break
    return tree


def _path_order(r: Multigraph, comp: frozenset[int]) -> tuple[int, ...] | None:
    inner = [(u, v) for u, v in r.edges if u in comp and v in comp]
    if len(inner) != len(comp) - 1:
        return None
    deg = {v: sum(1 for w in r.adjacency[v] if w in comp) for v in comp}
    if any(d > 2 for d in deg.values()):
        return None
    start = min((v for v in comp if deg[v] <= 1))
    order = [start]
    while len(order) < len(comp):
        order.append(min(w for w in r.adjacency[order[-1]] if w in comp and w not in order))
    return tuple(order)


def _star_minor_search(r: Multigraph, l: int, cap: int = 16) -> StarMinor | None:
    """Some connected set with at least ``l`` outside neighbours, by brute force."""
    if r.vertex_count > cap:
        return None
    for size in range(1, r.vertex_count):
        for c in combinations(r.vertices, size):
            cs = frozenset(c)
            nb = neighborhood(r, cs)
            if len(nb) >= l and r.is_connected(cs):
                return StarMinor(cs, tuple(frozenset([v]) for v in sorted(nb)[:l]))
    return None


def k1l_path_structure(r: Multigraph, l: int) -> StarMinor | PathStructure:
    """A K_{1,l} minor of ``r`` or a small set X leaving few paths attached only at their ends."""
    if l < 2:
        raise GraphError("l must be at least 2")
    if not r.is_simple():
        raise GraphError("r must be simple")
    if not r.is_connected() or r.vertex_count == 0:
        raise GraphError("r must be connected and nonempty")
    tree = max_leaf_spanning_tree(r)
    leaves = sorted(v for v in tree if len(tree[v]) == 1)
    internal = frozenset(v for v in tree if len(tree[v]) >= 2)
    if len(leaves) >= l and internal:
        return StarMinor(internal, tuple(frozenset([v]) for v in leaves[:l]))
    y = {v for v in tree if len(tree[v]) >= 3}
    x = set(y) | {w for v in y for w in tree[v]}
    while True:
        changed = False
        for comp in r.components(set(r.vertices) - x):
            order = _path_order(r, comp)
            if order is None:
                # not a path: cut at a vertex of largest degree inside the component
                x.add(max(sorted(comp), key=lambda v: len(r.adjacency[v] & comp)))
                changed = True
                break
            bad = [v for v in order[1:-1] if r.adjacency[v] & x]
            if bad:
                x.add(bad[0])
                changed = True
                break
        if not changed:
            break
    paths = tuple(_path_order(r, c) for c in r.components(set(r.vertices) - x))
    ps = PathStructure(frozenset(x), paths)
    if path_structure_violation(r, ps, l) is None:
        return ps
    minor = _star_minor_search(r, l)
    if minor is not None:
        return minor
    raise BoundViolationError("neither a star minor nor a path structure was found")


# -- structure certificates -------------------------------------------------------

@dataclass(frozen=True)
class StructureBounds:
    a_max: int
    z_max: int
    comp_max: int
    hop_max: int

    @classmethod
    def for_t(cls, t: int) -> "StructureBounds":
        return cls(4 * t**2, 6 * t**10, 2 * t**2, 2 * t**6)


@dataclass(frozen=True)
class StructureCertificate:
    a_set: frozenset[int]
    z_set: frozenset[int]
    component_orders: tuple[tuple[int, ...], ...]
    bounds: StructureBounds

    def __post_init__(self):
        object.__setattr__(self, "a_set", frozenset(self.a_set))
        object.__setattr__(self, "z_set", frozenset(self.z_set))
        object.__setattr__(self, "component_orders", tuple(tuple(o) for o in self.component_orders))


def verify_structure_certificate(g: Multigraph, cert: StructureCertificate) -> Verdict:
    """Check the four certificate conditions; violations are named "1".."4" or "orders"."""
    if any(not 0 <= v < g.vertex_count for v in cert.a_set):
        raise InvalidCertificateError("A names vertices outside the graph")
    if any(not 0 <= e < g.edge_count for e in cert.z_set):
        raise InvalidCertificateError("Z names unknown edges")
    b = cert.bounds
    if len(cert.a_set) > b.a_max or len(cert.z_set) > b.z_max:
        return Verdict(False, "1")
    gz = delete_edges(g, cert.z_set).graph
    comps = gz.components(set(g.vertices) - cert.a_set)
    if len(comps) > b.comp_max:
        return Verdict(False, "2")
    listed = sorted((frozenset(o) for o in cert.component_orders), key=min)
    if listed != sorted(comps, key=min) or any(len(set(o)) != len(o) for o in cert.component_orders):
        return Verdict(False, "orders")
    for order in cert.component_orders:
        for v in order[1:-1]:
            if gz.adjacency[v] & cert.a_set:
                return Verdict(False, "3")
    for order in cert.component_orders:
        d = induced_subgraph(gz, order)
        local = [d.vertex_map[v] for v in order]
        if hop_width_of_order(d.graph, local) > b.hop_max:
            return Verdict(False, "4")
    return Verdict(True)


def search_structure_certificate(
    g: Multigraph,
    threshold: int,
    bounds: StructureBounds,
    l: int = 4,
    vertex_cap: int = 64,
) -> StructureCertificate | None | BudgetExceeded:
    """Build A and Z from the R graph and its path structure, then verify."""
    if g.vertex_count > vertex_cap:
        return BUDGET_EXCEEDED
    r = parallel_graph_R(g, threshold)
    a: set[int] = set()
    for comp in r.components():
        if len(comp) < 3:
            continue
        d = induced_subgraph(r, comp)
        got = k1l_path_structure(d.graph, l)
        if isinstance(got, StarMinor):
            return None
        back = sorted(comp)
        a |= {back[v] for v in got.x_set}
    paths = []
    for comp in r.components(set(g.vertices) - a):
        order = _path_order(r, comp)
        if order is None:
            return None
        paths.append(order)
    where = {v: i for i, p in enumerate(paths) for v in p}
    inner = {v for p in paths for v in p[1:-1]}
    z = set()
    for e, (u, v) in enumerate(g.edges):
        if u in where and v in where and where[u] != where[v]:
            z.add(e)
        elif (u in a and v in inner) or (v in a and u in inner):
            z.add(e)
    cert = StructureCertificate(frozenset(a), frozenset(z), tuple(paths), bounds)
    return cert if verify_structure_certificate(g, cert) else None
