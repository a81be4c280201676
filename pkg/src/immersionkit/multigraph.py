"""Loop-free multigraphs with identified parallel edges.

Vertices are ``0..vertex_count-1`` and edge ids are the positions in
``Multigraph.edges``. Every operation is pure: derived graphs are new
objects and come with explicit id maps back to their source.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .errors import GraphError

Edge = tuple[int, int]


@dataclass(frozen=True)
class Multigraph:
    vertex_count: int
    edges: tuple[Edge, ...] = ()
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.vertex_count < 0:
            raise GraphError("vertex_count must be non-negative")
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        n = self.vertex_count
        for eid, (u, v) in enumerate(edges):
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {eid} = ({u}, {v}) references a vertex outside [0, {n})")
            if u == v:
                raise GraphError(f"edge {eid} is a loop at vertex {u}")

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def vertices(self) -> range:
        return range(self.vertex_count)

    @property
    def edge_ids(self) -> range:
        return range(len(self.edges))

    @cached_property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        """Edge ids incident to each vertex, in increasing id order."""
        inc: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for eid, (u, v) in enumerate(self.edges):
            inc[u].append(eid)
            inc[v].append(eid)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def multiplicities(self) -> Counter:
        return Counter((min(u, v), max(u, v)) for u, v in self.edges)

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        adj: list[set[int]] = [set() for _ in range(self.vertex_count)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    def max_degree(self) -> int:
        return max((len(i) for i in self.incidence), default=0)

    def multiplicity(self, u: int, v: int) -> int:
        return self.multiplicities.get((min(u, v), max(u, v)), 0)

    def other_end(self, eid: int, v: int) -> int:
        a, b = self.edges[eid]
        if v == a:
            return b
        if v == b:
            return a
        raise GraphError(f"vertex {v} is not an endpoint of edge {eid}")

    def edges_between(self, u: int, v: int) -> list[int]:
        return [e for e in self.incidence[u] if self.other_end(e, u) == v]

    def is_simple(self) -> bool:
        return all(c == 1 for c in self.multiplicities.values())

    def components(self, vertices: Iterable[int] | None = None) -> list[frozenset[int]]:
        """Connected components of the subgraph induced on ``vertices`` (default all)."""
        allowed = set(self.vertices if vertices is None else vertices)
        seen: set[int] = set()
        out = []
        for s in sorted(allowed):
            if s in seen:
                continue
            comp = {s}
            stack = [s]
            while stack:
                a = stack.pop()
                for b in self.adjacency[a]:
                    if b in allowed and b not in comp:
                        comp.add(b)
                        stack.append(b)
            seen |= comp
            out.append(frozenset(comp))
        return out

    def is_connected(self, vertices: Iterable[int] | None = None) -> bool:
        return len(self.components(vertices)) <= 1

    def renamed(self, name: str | None) -> "Multigraph":
        return Multigraph(self.vertex_count, self.edges, name)


def _vertex_set(g: Multigraph, x: Iterable[int]) -> frozenset[int]:
    xs = frozenset(int(v) for v in x)
    bad = [v for v in xs if not 0 <= v < g.vertex_count]
    if bad:
        raise GraphError(f"vertices {sorted(bad)} are not in the graph")
    return xs


def delta(g: Multigraph, x: Iterable[int]) -> frozenset[int]:
    """Edges with exactly one endpoint in ``x``."""
    xs = _vertex_set(g, x)
    return frozenset(e for e, (u, v) in enumerate(g.edges) if (u in xs) != (v in xs))


def neighborhood(g: Multigraph, x: Iterable[int]) -> frozenset[int]:
    xs = _vertex_set(g, x)
    return frozenset(w for v in xs for w in g.adjacency[v] if w not in xs)


def induced_edges(g: Multigraph, x: Iterable[int]) -> frozenset[int]:
    xs = _vertex_set(g, x)
    return frozenset(e for e, (u, v) in enumerate(g.edges) if u in xs and v in xs)


@dataclass(frozen=True)
class Derived:
    """A graph obtained from another, with maps between the two id spaces.

    ``vertex_map[old] = new`` (``None`` when the vertex was deleted) and
    ``edge_map[new] = old``.
    """

    graph: Multigraph
    vertex_map: tuple[int | None, ...]
    edge_map: tuple[int, ...]

    def vertex_preimage(self, new: int) -> list[int]:
        return [old for old, nv in enumerate(self.vertex_map) if nv == new]


@dataclass(frozen=True)
class Consolidation(Derived):
    vertex: int = -1


def _relabel(g: Multigraph, groups: Sequence[Iterable[int]], drop_vertices=frozenset(), drop_edges=frozenset()) -> Derived:
    """Identify each group to one vertex, delete edges that become loops.

    New vertex ids follow the order of each class's smallest member.
    """
    rep = list(range(g.vertex_count))
    for grp in groups:
        grp = sorted(grp)
        for v in grp:
            rep[v] = grp[0]
    live = sorted({rep[v] for v in g.vertices if v not in drop_vertices})
    new_id = {r: i for i, r in enumerate(live)}
    vmap = tuple(None if v in drop_vertices else new_id[rep[v]] for v in g.vertices)
    new_edges = []
    emap = []
    for eid, (u, v) in enumerate(g.edges):
        if eid in drop_edges or u in drop_vertices or v in drop_vertices:
            continue
        a, b = vmap[u], vmap[v]
        if a == b:
            continue
        new_edges.append((a, b))
        emap.append(eid)
    return Derived(Multigraph(len(live), tuple(new_edges)), vmap, tuple(emap))


def consolidate(g: Multigraph, x: Iterable[int]) -> Consolidation:
    """Delete edges inside ``x`` and identify ``x`` to a single vertex."""
    xs = _vertex_set(g, x)
    if not xs:
        raise GraphError("cannot consolidate an empty vertex set")
    d = _relabel(g, [xs])
    return Consolidation(d.graph, d.vertex_map, d.edge_map, d.vertex_map[min(xs)])


def contract(g: Multigraph, x: Iterable[int]) -> Consolidation:
    xs = _vertex_set(g, x)
    if not xs:
        raise GraphError("cannot contract an empty vertex set")
    if not g.is_connected(xs):
        raise GraphError(f"vertex set {sorted(xs)} does not induce a connected subgraph")
    return consolidate(g, xs)


def delete_edges(g: Multigraph, f: Iterable[int]) -> Derived:
    """``G - F``; vertex ids are kept, surviving edges are renumbered."""
    fs = frozenset(f)
    return _relabel(g, [], drop_edges=fs)


def delete_vertices(g: Multigraph, z: Iterable[int]) -> Derived:
    """``G - Z``; remaining vertices are renumbered in increasing order."""
    return _relabel(g, [], drop_vertices=_vertex_set(g, z))


def induced_subgraph(g: Multigraph, x: Iterable[int]) -> Derived:
    xs = _vertex_set(g, x)
    return delete_vertices(g, set(g.vertices) - xs)


def line_graph(g: Multigraph) -> tuple[Multigraph, tuple[int, ...]]:
    """Simple line graph; vertex ``i`` of the result is edge ``i`` of ``g``."""
    pairs = set()
    for inc in g.incidence:
        for a, b in combinations(inc, 2):
            pairs.add((a, b) if a < b else (b, a))
    return Multigraph(g.edge_count, tuple(sorted(pairs))), tuple(g.edge_ids)


def underlying_simple(g: Multigraph) -> Multigraph:
    return Multigraph(g.vertex_count, tuple(sorted(g.multiplicities)))


def disjoint_union(*graphs: Multigraph) -> Multigraph:
    edges = []
    offset = 0
    for h in graphs:
        edges.extend((u + offset, v + offset) for u, v in h.edges)
        offset += h.vertex_count
    return Multigraph(offset, tuple(edges))


def add_edges(g: Multigraph, extra: Iterable[Edge], new_vertices: int = 0) -> Multigraph:
    return Multigraph(g.vertex_count + new_vertices, g.edges + tuple(extra))


# -- generators -------------------------------------------------------------

def gen_P(k: int, n: int) -> Multigraph:
    """Path ``x1..xn`` (vertices ``0..n-1``) with ``k`` parallel edges per link."""
    if k < 1:
        raise GraphError("k must be at least 1")
    if n < 2:
        raise GraphError("n must be at least 2")
    edges = tuple((i, i + 1) for i in range(n - 1) for _ in range(k))
    return Multigraph(n, edges, f"P_{k},{n}")


def gen_S(l: int, m: int) -> Multigraph:
    """Hub ``y = m`` joined to each of ``x1..xm`` (vertices ``0..m-1``) by ``l`` edges."""
    if l < 1 or m < 1:
        raise GraphError("l and m must be at least 1")
    edges = tuple((i, m) for i in range(m) for _ in range(l))
    return Multigraph(m + 1, edges, f"S_{l},{m}")


def gen_random(seed: int, n: int, edge_budget: int, max_multiplicity: int) -> Multigraph:
    """Uniformly random loop-free multigraph with exactly ``edge_budget`` edges."""
    if n < 2:
        raise GraphError("n must be at least 2")
    if max_multiplicity < 1:
        raise GraphError("max_multiplicity must be at least 1")
    capacity = max_multiplicity * n * (n - 1) // 2
    if edge_budget < 0 or edge_budget > capacity:
        raise GraphError(f"edge_budget {edge_budget} exceeds capacity {capacity}")
    rng = random.Random(seed)
    slots = [p for p in combinations(range(n), 2) for _ in range(max_multiplicity)]
    chosen = rng.sample(slots, edge_budget)
    return Multigraph(n, tuple(sorted(chosen)), f"random_{seed}")


def complete_graph(n: int, multiplicity: int = 1) -> Multigraph:
    return Multigraph(n, tuple(p for p in combinations(range(n), 2) for _ in range(multiplicity)), f"K_{n}")


def cycle_graph(n: int) -> Multigraph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return Multigraph(n, tuple((i, (i + 1) % n) for i in range(n)), f"C_{n}")


def path_graph(n: int) -> Multigraph:
    return Multigraph(n, tuple((i, i + 1) for i in range(n - 1)), f"path_{n}")


def empty_graph(n: int) -> Multigraph:
    return Multigraph(n, (), f"empty_{n}")
