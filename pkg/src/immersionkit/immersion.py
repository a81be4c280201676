"""Weak and strong immersions with explicit certificates.

A certificate maps every pattern vertex to a distinct host vertex (the
branch vertices) and every pattern edge to a vertex-simple host path,
given as a sequence of host edge ids starting at the image of the pattern
edge's first endpoint. Composite paths must be pairwise edge-disjoint; in
strong mode no branch vertex may be internal to a composite path.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Literal, Mapping, Sequence

from .errors import BUDGET_EXCEEDED, BudgetExceeded, GraphError, InvalidCertificateError, PreconditionError
from .flows import is_k_edge_connected, multi_target_paths
from .multigraph import (
    Multigraph,
    complete_graph,
    consolidate,
    contract,
    gen_S,
    induced_subgraph,
    underlying_simple,
)

Mode = Literal["weak", "strong"]
MODES = ("weak", "strong")


@dataclass(frozen=True)
class ImmersionCertificate:
    branch: Mapping[int, int]
    composite: Mapping[int, tuple[int, ...]]
    mode: Mode = "weak"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        object.__setattr__(self, "branch", {int(k): int(v) for k, v in dict(self.branch).items()})
        object.__setattr__(
            self, "composite", {int(k): tuple(int(e) for e in v) for k, v in dict(self.composite).items()}
        )

    def with_mode(self, mode: Mode) -> "ImmersionCertificate":
        return ImmersionCertificate(self.branch, self.composite, mode)

    @property
    def used_edges(self) -> frozenset[int]:
        return frozenset(e for p in self.composite.values() for e in p)


def _validate_ids(g: Multigraph, h: Multigraph, cert: ImmersionCertificate) -> None:
    if set(cert.branch) != set(h.vertices):
        raise InvalidCertificateError("branch map must cover exactly the pattern vertices")
    if set(cert.composite) != set(h.edge_ids):
        raise InvalidCertificateError("composite map must cover exactly the pattern edges")
    for v in cert.branch.values():
        if not 0 <= v < g.vertex_count:
            raise InvalidCertificateError(f"branch vertex {v} is not a host vertex")
    for f, p in cert.composite.items():
        for e in p:
            if not 0 <= e < g.edge_count:
                raise InvalidCertificateError(f"composite path of pattern edge {f} uses unknown edge {e}")


def _walk(g: Multigraph, start: int, edges: Sequence[int]) -> list[int] | None:
    verts = [start]
    for e in edges:
        a, b = g.edges[e]
        if verts[-1] == a:
            verts.append(b)
        elif verts[-1] == b:
            verts.append(a)
        else:
            return None
    return verts


def oriented_composite(
    g: Multigraph, h: Multigraph, cert: ImmersionCertificate, f: int
) -> tuple[list[int], list[int]] | None:
    """Vertices and edges of the composite path for ``f`` read from the first endpoint's image."""
    x, y = h.edges[f]
    bx, by = cert.branch[x], cert.branch[y]
    path = list(cert.composite[f])
    verts = _walk(g, bx, path)
    if verts is not None and verts[-1] == by:
        return verts, path
    verts = _walk(g, by, path)
    if verts is not None and verts[-1] == bx:
        return verts[::-1], path[::-1]
    return None


def composite_vertices(g: Multigraph, h: Multigraph, cert: ImmersionCertificate, f: int) -> list[int] | None:
    """Vertex sequence of the composite path for pattern edge ``f``, or None if it is not a path."""
    got = oriented_composite(g, h, cert, f)
    return None if got is None else got[0]


def immersion_violation(
    g: Multigraph, h: Multigraph, cert: ImmersionCertificate, mode: Mode | None = None
) -> str | None:
    """First violated condition of ``cert`` as a message, or None when valid.

    Raises InvalidCertificateError when the certificate refers to ids that
    do not exist.
    """
    mode = mode or cert.mode
    _validate_ids(g, h, cert)
    images = list(cert.branch.values())
    if len(set(images)) != len(images):
        return "branch map is not injective"
    branch_set = set(images)
    used: dict[int, int] = {}
    for f in h.edge_ids:
        verts = composite_vertices(g, h, cert, f)
        if verts is None:
            return f"composite path of pattern edge {f} does not join its branch vertices"
        if len(set(verts)) != len(verts):
            return f"composite path of pattern edge {f} repeats a vertex"
        for e in cert.composite[f]:
            if e in used:
                return f"pattern edges {used[e]} and {f} share host edge {e}"
            used[e] = f
        if mode == "strong":
            inner = branch_set.intersection(verts[1:-1])
            if inner:
                return f"branch vertex {min(inner)} is internal to the composite path of pattern edge {f}"
    return None


def check_immersion(g: Multigraph, h: Multigraph, cert: ImmersionCertificate, mode: Mode | None = None) -> bool:
    return immersion_violation(g, h, cert, mode) is None


# -- exhaustive search ---------------------------------------------------------

def _automorphisms(h: Multigraph, cap: int = 8) -> list[tuple[int, ...]]:
    """Vertex permutations preserving edge multiplicities; identity only above ``cap`` vertices."""
    n = h.vertex_count
    ident = tuple(range(n))
    if n > cap:
        return [ident]
    mult = h.multiplicities
    degs = [h.degree(v) for v in range(n)]
    out = []
    for perm in permutations(range(n)):
        if any(degs[perm[v]] != degs[v] for v in range(n)):
            continue
        if all(h.multiplicity(perm[a], perm[b]) == c for (a, b), c in mult.items()):
            out.append(perm)
    return out


class _Router:
    def __init__(self, g: Multigraph, h: Multigraph, mode: Mode, budget: int):
        self.g, self.h, self.mode = g, h, mode
        self.budget = budget
        self.steps = 0
        self.used = [False] * g.edge_count
        self.neighbors = [sorted(a) for a in g.adjacency]
        # parallel classes in id order; a route always takes the lowest unused member
        self.between: dict[tuple[int, int], list[int]] = {}
        for e, (u, v) in enumerate(g.edges):
            self.between.setdefault((u, v), []).append(e)
            self.between.setdefault((v, u), []).append(e)
        hdeg = [h.degree(v) for v in h.vertices]
        self.demands = sorted(h.edge_ids, key=lambda f: (-(hdeg[h.edges[f][0]] + hdeg[h.edges[f][1]]), f))

    class OutOfBudget(Exception):
        pass

    def _tick(self):
        self.steps += 1
        if self.steps > self.budget:
            raise _Router.OutOfBudget

    def _free_edge(self, a: int, b: int) -> int | None:
        for e in self.between[(a, b)]:
            if not self.used[e]:
                return e
        return None

    def _paths(self, s: int, t: int, forbidden: set[int]):
        """Vertex-simple s-t paths over unused edges, one edge per parallel class."""
        on_path = {s}
        edges: list[int] = []

        def extend(a):
            self._tick()
            if a == t:
                yield list(edges)
                return
            for b in self.neighbors[a]:
                if b in on_path or (b != t and b in forbidden):
                    continue
                e = self._free_edge(a, b)
                if e is None:
                    continue
                self.used[e] = True
                on_path.add(b)
                edges.append(e)
                yield from extend(b)
                edges.pop()
                on_path.discard(b)
                self.used[e] = False

        yield from extend(s)

    def _degree_ok(self, phi: Sequence[int], remaining: Sequence[int]) -> bool:
        need: dict[int, int] = {}
        for f in remaining:
            x, y = self.h.edges[f]
            need[phi[x]] = need.get(phi[x], 0) + 1
            need[phi[y]] = need.get(phi[y], 0) + 1
        for v, c in need.items():
            free = sum(1 for e in self.g.incidence[v] if not self.used[e])
            if free < c:
                return False
        return True

    def route(self, phi: Sequence[int]) -> dict[int, tuple[int, ...]] | None:
        self.used = [False] * self.g.edge_count
        forbidden = set(phi) if self.mode == "strong" else set()
        chosen: dict[int, tuple[int, ...]] = {}

        def rec(i: int) -> bool:
            if i == len(self.demands):
                return True
            if not self._degree_ok(phi, self.demands[i:]):
                return False
            f = self.demands[i]
            x, y = self.h.edges[f]
            # the generator keeps the yielded path's edges marked while suspended
            for path in self._paths(phi[x], phi[y], forbidden):
                chosen[f] = tuple(path)
                if rec(i + 1):
                    return True
                del chosen[f]
            return False

        return dict(chosen) if rec(0) else None


def find_immersion(
    g: Multigraph, h: Multigraph, mode: Mode = "weak", budget: int = 10_000_000
) -> ImmersionCertificate | None | BudgetExceeded:
    """Exhaustively search for an immersion of ``h`` in ``g``.

    Returns a certificate, ``None`` when the search proved that none exists,
    or ``BUDGET_EXCEEDED`` once more than ``budget`` router steps were spent.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    n = h.vertex_count
    if n > g.vertex_count:
        return None
    if n == 0:
        return ImmersionCertificate({}, {}, mode)
    hdeg = [h.degree(v) for v in h.vertices]
    gdeg = [g.degree(v) for v in g.vertices]
    order = sorted(h.vertices, key=lambda v: (-hdeg[v], v))
    candidates = {v: [w for w in g.vertices if gdeg[w] >= hdeg[v]] for v in h.vertices}
    autos = _automorphisms(h)
    router = _Router(g, h, mode, budget)

    phi = [-1] * n
    taken: set[int] = set()

    def canonical() -> bool:
        key = tuple(phi)
        return all(key <= tuple(phi[s[v]] for v in range(n)) for s in autos)

    def assign(i: int):
        if i == n:
            if len(autos) > 1 and not canonical():
                return None
            routes = router.route(phi)
            if routes is None:
                return None
            return ImmersionCertificate({v: phi[v] for v in range(n)}, routes, mode)
        v = order[i]
        for w in candidates[v]:
            if w in taken:
                continue
            phi[v] = w
            taken.add(w)
            found = assign(i + 1)
            taken.discard(w)
            phi[v] = -1
            if found is not None:
                return found
        return None

    try:
        return assign(0)
    except _Router.OutOfBudget:
        return BUDGET_EXCEEDED


# -- constructions -----------------------------------------------------------

def immerse_universal_into_S(h: Multigraph, g: Multigraph) -> ImmersionCertificate:
    """Strong immersion of ``h`` into ``g = gen_S(l, m)`` with ``Delta(h) <= l`` and ``|V(h)| <= m``.

    Pattern vertex ``i`` goes to ``x_i``; each pattern edge uses one fresh
    spoke out of each endpoint and turns at the hub.
    """
    m = g.vertex_count - 1
    if m < 1:
        raise PreconditionError("host is not of the form S_{l,m}")
    l = g.multiplicity(0, m)
    if l < 1 or g != gen_S(l, m):
        raise PreconditionError("host is not of the form S_{l,m} in generator labelling")
    if h.vertex_count > m:
        raise PreconditionError(f"pattern has {h.vertex_count} vertices, host offers {m}")
    if h.max_degree() > l:
        raise PreconditionError(f"pattern max degree {h.max_degree()} exceeds spoke multiplicity {l}")
    spokes = {i: list(g.incidence[i]) for i in range(m)}
    composite = {}
    for f, (a, b) in enumerate(h.edges):
        composite[f] = (spokes[a].pop(0), spokes[b].pop(0))
    return ImmersionCertificate({v: v for v in h.vertices}, composite, "strong")


def lift_through_consolidation(
    g: Multigraph, u: int, v: int, h: Multigraph, cert: ImmersionCertificate
) -> ImmersionCertificate:
    """Turn a certificate on ``g`` with ``{u, v}`` consolidated into one on ``g``.

    Each composite path crosses the merged vertex at most once, so at most
    ``|E(h)|`` of the u-v parallel edges are needed to re-join the halves.
    A branch vertex at the merged vertex is placed on ``u``.
    """
    spare = g.edges_between(u, v)
    if len(spare) < h.edge_count:
        raise PreconditionError(f"need {h.edge_count} parallel u-v edges, found {len(spare)}")
    con = consolidate(g, {u, v})
    gp, x = con.graph, con.vertex
    if not check_immersion(gp, h, cert):
        raise PreconditionError("certificate is not valid on the consolidated graph")
    back = {nv: old for old, nv in enumerate(con.vertex_map) if nv is not None and nv != x}
    back[x] = u
    branch = {hv: back[gv] for hv, gv in cert.branch.items()}
    spare = iter(spare)
    composite = {}
    for f in h.edge_ids:
        _, ordered = oriented_composite(gp, h, cert, f)
        start = branch[h.edges[f][0]]
        out: list[int] = []
        here = start
        for e in ordered:
            old = con.edge_map[e]
            a, b = g.edges[old]
            if here not in (a, b):
                # at the merged vertex on the wrong side: hop across
                out.append(next(spare))
                here = v if here == u else u
            out.append(old)
            here = b if here == a else a
        end = branch[h.edges[f][1]]
        if here != end:
            out.append(next(spare))
            here = end
        composite[f] = tuple(out)
    lifted = ImmersionCertificate(branch, composite, cert.mode)
    if not check_immersion(g, h, lifted):
        raise AssertionError(immersion_violation(g, h, lifted))
    return lifted


def immerse_into_dense(h: Multigraph, g: Multigraph) -> ImmersionCertificate:
    """Weak immersion when every adjacent pair of ``g`` has ``>= |E(h)|`` parallel edges.

    Routes pattern edges one at a time along shortest paths, each hop taking
    the lowest unused parallel edge; a route visits each pair once, so no
    pair is exhausted.
    """
    m = h.edge_count
    if g.vertex_count < h.vertex_count:
        raise PreconditionError("host has fewer vertices than the pattern")
    if g.vertex_count and not g.is_connected():
        raise PreconditionError("host must be connected")
    thin = [p for p, c in g.multiplicities.items() if c < m]
    if thin:
        raise PreconditionError(f"adjacent pair {thin[0]} has fewer than {m} parallel edges")
    simple = underlying_simple(g)
    used: set[int] = set()
    composite = {}
    for f, (a, b) in enumerate(h.edges):
        hops = _shortest_vertex_path(simple, a, b)
        route = []
        for p, q in zip(hops, hops[1:]):
            e = next(e for e in g.edges_between(p, q) if e not in used)
            used.add(e)
            route.append(e)
        composite[f] = tuple(route)
    return ImmersionCertificate({v: v for v in h.vertices}, composite, "weak")


def _shortest_vertex_path(g: Multigraph, s: int, t: int) -> list[int]:
    parent = {s: None}
    frontier = [s]
    while t not in parent:
        nxt = []
        for a in frontier:
            for b in sorted(g.adjacency[a]):
                if b not in parent:
                    parent[b] = a
                    nxt.append(b)
        if not nxt:
            raise GraphError(f"no path from {s} to {t}")
        frontier = nxt
    out = [t]
    while out[-1] != s:
        out.append(parent[out[-1]])
    return out[::-1]


def clique(k: int) -> Multigraph:
    return complete_graph(k)


def immerse_from_path_plus_hub(g: Multigraph, path_vertices: Sequence[int], hub: int, k: int) -> ImmersionCertificate:
    """Strong ``K_k`` immersion from a thick path plus a hub seeing ``k^2`` path vertices.

    The hub's path neighbours are cut into ``k`` consecutive groups of ``k``;
    the first vertex of each group is a branch vertex with legs running along
    the path to the group's other members and then to the hub. Two legs of
    different groups meet only at the hub.
    """
    path_vertices = list(path_vertices)
    if k < 1:
        raise PreconditionError("k must be positive")
    if hub in path_vertices or len(set(path_vertices)) != len(path_vertices):
        raise PreconditionError("path vertices must be distinct and avoid the hub")
    for a, b in zip(path_vertices, path_vertices[1:]):
        if g.multiplicity(a, b) < k:
            raise PreconditionError(f"consecutive path vertices {a}, {b} have fewer than {k} parallel edges")
    hits = [i for i, p in enumerate(path_vertices) if g.multiplicity(p, hub) > 0]
    if len(hits) < k * k:
        raise PreconditionError(f"hub has {len(hits)} path neighbours, needs {k * k}")
    groups = [hits[j * k:(j + 1) * k] for j in range(k)]
    link_use: dict[tuple[int, int], int] = {}

    def link(i: int) -> int:
        a, b = path_vertices[i], path_vertices[i + 1]
        c = link_use.get((a, b), 0)
        link_use[(a, b)] = c + 1
        return g.edges_between(a, b)[c]

    legs: list[list[list[int]]] = []
    for grp in groups:
        start = grp[0]
        mine = []
        for idx in grp:
            leg = [link(i) for i in range(start, idx)]
            leg.append(g.edges_between(path_vertices[idx], hub)[0])
            mine.append(leg)
        legs.append(mine)
    branch = {j: path_vertices[groups[j][0]] for j in range(k)}
    composite = {}
    kk = clique(k)
    next_leg = [0] * k
    for f, (a, b) in enumerate(kk.edges):
        la = legs[a][next_leg[a]]
        lb = legs[b][next_leg[b]]
        next_leg[a] += 1
        next_leg[b] += 1
        composite[f] = tuple(la + lb[::-1])
    cert = ImmersionCertificate(branch, composite, "strong")
    if not check_immersion(g, kk, cert):
        raise AssertionError(immersion_violation(g, kk, cert))
    return cert


def _loop_erase(g: Multigraph, start: int, edges: Sequence[int]) -> list[int]:
    """Shortcut a trail to a vertex-simple path on a subset of its edges."""
    verts = [start]
    out: list[int] = []
    pos = {start: 0}
    for e in edges:
        b = g.other_end(e, verts[-1])
        if b in pos:
            cut = pos[b]
            for w in verts[cut + 1:]:
                del pos[w]
            del verts[cut + 1:]
            del out[cut:]
        else:
            pos[b] = len(verts)
            verts.append(b)
            out.append(e)
    return out


def lift_through_contraction(
    g: Multigraph, j: Iterable[int], h: Multigraph, cert: ImmersionCertificate
) -> ImmersionCertificate:
    """Lift a strong immersion from ``g`` with ``j`` contracted back into ``g``.

    ``g[j]`` must be ``2|E(h)|``-edge-connected; paths through the contracted
    vertex are re-joined inside ``j`` via edge-disjoint paths from one hub
    vertex of ``j`` to the boundary edges in use.
    """
    js = sorted(set(j))
    if not js:
        raise PreconditionError("contracted set must be nonempty")
    sub = induced_subgraph(g, js)
    if len(js) > 1 and not is_k_edge_connected(sub.graph, 2 * h.edge_count):
        raise PreconditionError(f"g[j] is not {2 * h.edge_count}-edge-connected")
    con = contract(g, js)
    gp, x = con.graph, con.vertex
    if not check_immersion(gp, h, cert, "strong"):
        raise PreconditionError("certificate is not a valid strong immersion on the contracted graph")
    hub = js[0]
    back = {nv: old for old, nv in enumerate(con.vertex_map) if nv is not None and nv != x}
    back[x] = hub
    jset = set(js)

    # oriented routes in g ids, remembering which boundary edges touch j
    routes: dict[int, list[int]] = {}
    boundary_ends: list[int] = []
    for f in h.edge_ids:
        _, ordered = oriented_composite(gp, h, cert, f)
        routes[f] = [con.edge_map[e] for e in ordered]
        for e in routes[f]:
            a, b = g.edges[e]
            if (a in jset) != (b in jset):
                boundary_ends.append(a if a in jset else b)
    legs_bundle = multi_target_paths(sub.graph, sub.vertex_map[hub], [sub.vertex_map[w] for w in boundary_ends])
    if legs_bundle is None:
        raise AssertionError("reconnection flow inside j is infeasible")
    legs = iter([[sub.edge_map[e] for e in p.edges] for p in legs_bundle.paths])

    branch = {hv: back[gv] for hv, gv in cert.branch.items()}
    composite = {}
    for f in h.edge_ids:
        start = branch[h.edges[f][0]]
        here = start
        trail: list[int] = []
        for e in routes[f]:
            a, b = g.edges[e]
            if (a in jset) == (b in jset):
                trail.append(e)
                here = b if here == a else a
                continue
            inner, outer = (a, b) if a in jset else (b, a)
            leg = next(legs)
            if here in jset:
                # leaving j: walk from the hub to this edge's inner end first
                trail.extend(leg)
                trail.append(e)
                here = outer
            else:
                trail.append(e)
                trail.extend(reversed(leg))
                here = hub
        end = branch[h.edges[f][1]]
        if here != end:
            raise AssertionError("lifted route does not end at its branch vertex")
        composite[f] = tuple(_loop_erase(g, start, trail))
    lifted = ImmersionCertificate(branch, composite, "strong")
    if not check_immersion(g, h, lifted):
        raise AssertionError(immersion_violation(g, h, lifted))
    return lifted
