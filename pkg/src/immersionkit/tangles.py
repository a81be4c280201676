"""Separations and tangles on small graphs.

A separation (A, B) is stored as an edge bipartition plus the vertex sets
V(A) and V(B); a vertex may belong to a side without any incident edge on
that side. Enumeration is driven by the boundary S = V(A) & V(B): each
component of G - S goes wholly to one side and each edge inside S is free,
which yields every separation with boundary S exactly once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Iterable, Iterator, Sequence

from .errors import BoundViolationError, CapExceededError, GraphError, PreconditionError
from .multigraph import Multigraph, delete_vertices, delta, induced_edges, line_graph

EDGE_CAP = 18


@dataclass(frozen=True)
class Separation:
    a_edges: frozenset[int]
    b_edges: frozenset[int]
    a_vertices: frozenset[int]
    b_vertices: frozenset[int]

    @property
    def boundary(self) -> frozenset[int]:
        return self.a_vertices & self.b_vertices

    @property
    def order(self) -> int:
        return len(self.boundary)

    def flipped(self) -> "Separation":
        return Separation(self.b_edges, self.a_edges, self.b_vertices, self.a_vertices)


def make_separation(
    g: Multigraph,
    a_edges: Iterable[int],
    a_vertices: Iterable[int] = (),
    b_vertices: Iterable[int] = (),
) -> Separation:
    """Separation with the given A-edges; endpoints are added to each side automatically.

    Vertices left on neither side go to B.
    """
    a_e = frozenset(a_edges)
    if any(not 0 <= e < g.edge_count for e in a_e):
        raise GraphError("unknown edge id in separation")
    b_e = frozenset(g.edge_ids) - a_e
    va = set(a_vertices)
    vb = set(b_vertices)
    for e in a_e:
        va.update(g.edges[e])
    for e in b_e:
        vb.update(g.edges[e])
    vb |= set(g.vertices) - va - vb
    return Separation(a_e, b_e, frozenset(va), frozenset(vb))


def separation_violation(g: Multigraph, s: Separation) -> str | None:
    if s.a_edges & s.b_edges or (s.a_edges | s.b_edges) != frozenset(g.edge_ids):
        return "edge sets do not partition E(G)"
    if (s.a_vertices | s.b_vertices) != frozenset(g.vertices):
        return "vertex sets do not cover V(G)"
    for side, vs in ((s.a_edges, s.a_vertices), (s.b_edges, s.b_vertices)):
        for e in side:
            if not set(g.edges[e]) <= vs:
                return f"edge {e} has an endpoint outside its side"
    return None


def iter_separations(g: Multigraph, max_order: int) -> Iterator[Separation]:
    """All separations of order < ``max_order``, smallest boundaries first."""
    n = g.vertex_count
    all_v = frozenset(g.vertices)
    for size in range(0, min(max_order - 1, n) + 1):
        for s in combinations(range(n), size):
            sset = frozenset(s)
            comps = g.components(all_v - sset)
            comp_edges = [frozenset(e for v in c for e in g.incidence[v]) for c in comps]
            inner = sorted(induced_edges(g, sset))
            for sides in product((0, 1), repeat=len(comps)):
                a_e: set[int] = set()
                va = set(sset)
                vb = set(sset)
                for c, ce, side in zip(comps, comp_edges, sides):
                    if side == 0:
                        a_e |= ce
                        va |= c
                    else:
                        vb |= c
                for bits in product((0, 1), repeat=len(inner)):
                    extra = {e for e, b in zip(inner, bits) if b == 0}
                    ae = frozenset(a_e | extra)
                    yield Separation(ae, frozenset(g.edge_ids) - ae, frozenset(va), frozenset(vb))


def _check_cap(g: Multigraph, edge_cap: int) -> None:
    if g.edge_count > edge_cap:
        raise CapExceededError(f"{g.edge_count} edges exceeds the enumeration cap of {edge_cap}")


def enumerate_separations(g: Multigraph, max_order: int, edge_cap: int = EDGE_CAP) -> list[Separation]:
    """Every separation of ``g`` of order strictly below ``max_order``."""
    _check_cap(g, edge_cap)
    return list(iter_separations(g, max_order))


@dataclass(frozen=True)
class Tangle:
    """A tangle given by its order and a membership oracle, optionally materialized."""

    order: int
    contains: Callable[[Separation], bool] = field(compare=False)
    members: frozenset[Separation] | None = None

    def __contains__(self, s: Separation) -> bool:
        if s.order >= self.order:
            return False
        if self.members is not None:
            return s in self.members
        return self.contains(s)

    def materialize(self, g: Multigraph, edge_cap: int = EDGE_CAP) -> "Tangle":
        if self.members is not None:
            return self
        _check_cap(g, edge_cap)
        mem = frozenset(s for s in iter_separations(g, self.order) if self.contains(s))
        return Tangle(self.order, self.contains, mem)

    @classmethod
    def from_members(cls, order: int, members: Iterable[Separation]) -> "Tangle":
        mem = frozenset(members)
        return cls(order, mem.__contains__, mem)


@dataclass(frozen=True)
class TangleCheck:
    ok: bool
    axiom: str | None = None
    witness: tuple[Separation, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def _mask(g: Multigraph, s: Separation) -> int:
    m = 0
    for e in s.a_edges:
        m |= 1 << e
    for v in s.a_vertices:
        m |= 1 << (g.edge_count + v)
    return m


def is_tangle(g: Multigraph, candidate: Iterable[Separation], theta: int, edge_cap: int = EDGE_CAP) -> TangleCheck:
    """Check the three tangle axioms exhaustively."""
    _check_cap(g, edge_cap)
    cand = frozenset(candidate)
    for s in cand:
        if separation_violation(g, s) is not None or s.order >= theta:
            return TangleCheck(False, "i", (s,))
    for s in iter_separations(g, theta):
        if (s in cand) == (s.flipped() in cand):
            return TangleCheck(False, "i", (s,))
    full_v = frozenset(g.vertices)
    for s in cand:
        if s.a_vertices == full_v:
            return TangleCheck(False, "iii", (s,))
    full = (1 << (g.edge_count + g.vertex_count)) - 1
    masks = {}
    for s in cand:
        masks.setdefault(_mask(g, s), s)
    # only inclusion-maximal A-sides can complete a cover
    tops = [m for m in masks if not any(m != o and m & o == m for o in masks)]
    for i, a in enumerate(tops):
        for b in tops[i:]:
            need = full & ~(a | b)
            for c in tops:
                if need & ~c == 0:
                    return TangleCheck(False, "ii", (masks[a], masks[b], masks[c]))
    return TangleCheck(True)


@dataclass(frozen=True)
class MinorModel:
    branch_sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "branch_sets", tuple(frozenset(b) for b in self.branch_sets))

    @property
    def target(self) -> int:
        return len(self.branch_sets)


def model_violation(g: Multigraph, m: MinorModel) -> str | None:
    seen: set[int] = set()
    for i, b in enumerate(m.branch_sets):
        if not b:
            return f"branch set {i} is empty"
        if b & seen:
            return f"branch set {i} overlaps an earlier one"
        seen |= b
        if not g.is_connected(b):
            return f"branch set {i} is not connected"
    for i, j in combinations(range(m.target), 2):
        bi, bj = m.branch_sets[i], m.branch_sets[j]
        if not any((u in bi and v in bj) or (u in bj and v in bi) for u, v in g.edges):
            return f"branch sets {i} and {j} are not adjacent"
    return None


def induced_tangle(g: Multigraph, model: MinorModel, k: int, edge_cap: int = EDGE_CAP) -> Tangle:
    """Tangle of order ``k`` pointing every small separation away from the clique model."""
    why = model_violation(g, model)
    if why:
        raise GraphError(why)
    if 2 * model.target < 3 * k:
        raise PreconditionError(f"a K_{model.target} model induces tangles only up to order {2 * model.target // 3}")
    sets = model.branch_sets

    def contains(s: Separation) -> bool:
        if s.order >= k:
            return False
        big = s.b_vertices - s.a_vertices
        return any(b <= big for b in sets)

    t = Tangle(k, contains)
    if g.edge_count <= edge_cap:
        t = t.materialize(g, edge_cap)
    return t


def _restrict(g: Multigraph, s: Separation, z: frozenset[int], vmap, emap_inv) -> Separation:
    return Separation(
        frozenset(emap_inv[e] for e in s.a_edges if e in emap_inv),
        frozenset(emap_inv[e] for e in s.b_edges if e in emap_inv),
        frozenset(vmap[v] for v in s.a_vertices if v not in z),
        frozenset(vmap[v] for v in s.b_vertices if v not in z),
    )


def tangle_minus(g: Multigraph, t: Tangle, z: Iterable[int], edge_cap: int = EDGE_CAP) -> tuple[Multigraph, Tangle]:
    """``T - Z`` as a tangle of order ``order(T) - |Z|`` on ``g - z`` (vertices renumbered)."""
    zs = frozenset(z)
    if len(zs) >= t.order:
        raise PreconditionError(f"|Z| = {len(zs)} must be below the tangle order {t.order}")
    d = delete_vertices(g, zs)
    h = d.graph
    emap_inv = {old: new for new, old in enumerate(d.edge_map)}
    order = t.order - len(zs)
    if t.members is not None:
        mem = frozenset(_restrict(g, s, zs, d.vertex_map, emap_inv) for s in t.members if zs <= s.boundary)
        return h, Tangle.from_members(order, mem)

    back_v = [old for old, nv in enumerate(d.vertex_map) if nv is not None]
    z_edges = [e for e, (u, v) in enumerate(g.edges) if u in zs or v in zs]

    def contains(s: Separation) -> bool:
        if s.order >= order:
            return False
        va = {back_v[v] for v in s.a_vertices} | zs
        vb = {back_v[v] for v in s.b_vertices} | zs
        ae = {d.edge_map[e] for e in s.a_edges}
        fixed: set[int] = set()
        free = []
        for e in z_edges:
            ends = set(g.edges[e])
            if ends <= va and ends <= vb:
                free.append(e)
            elif ends <= va:
                fixed.add(e)
            elif not ends <= vb:
                return False
        if len(free) > 20:
            raise CapExceededError("too many flexible edges at Z")
        for bits in product((0, 1), repeat=len(free)):
            a = frozenset(ae | fixed | {e for e, b in zip(free, bits) if b == 0})
            cand = Separation(a, frozenset(g.edge_ids) - a, frozenset(va), frozenset(vb))
            if cand in t:
                return True
        return False

    out = Tangle(order, contains)
    if h.edge_count <= edge_cap:
        out = out.materialize(h, edge_cap)
    return h, out


def is_free(
    g: Multigraph, t: Tangle, x: Iterable[int], edge_cap: int = 40
) -> tuple[bool, Separation | None]:
    """Whether ``x`` is free in ``t``; otherwise a separation of ``t`` witnessing it is not."""
    xs = frozenset(x)
    if len(xs) > t.order:
        raise PreconditionError("|X| exceeds the tangle order")
    if not xs:
        return True, None
    if t.members is not None:
        pool: Iterable[Separation] = sorted(t.members, key=lambda s: s.order)
    else:
        _check_cap(g, edge_cap)
        pool = iter_separations(g, len(xs))
    for s in pool:
        if s.order < len(xs) and xs <= s.a_vertices and s in t:
            return False, s
    return True, None


def canonical_separation(g: Multigraph, u: Iterable[int]) -> Separation:
    """Separation of the line graph cut out by ``delta(u)``; its order is ``|delta(u)|``."""
    us = frozenset(u)
    if not us or len(us) >= g.vertex_count or any(not 0 <= v < g.vertex_count for v in us):
        raise GraphError("U must be a nonempty proper vertex subset")
    lg, _ = line_graph(g)
    cut = delta(g, us)
    inside = frozenset(e for e, (a, b) in enumerate(g.edges) if a in us and b in us)
    va = inside | cut
    vb = frozenset(g.edge_ids) - inside
    a_e = frozenset(i for i, (p, q) in enumerate(lg.edges) if p in va and q in va)
    return Separation(a_e, frozenset(lg.edge_ids) - a_e, va, vb)


def closure(g: Multigraph, s: Separation) -> Separation:
    """``(A + G[S], B - E(G[S]))`` for the boundary S of ``s``."""
    inner = induced_edges(g, s.boundary)
    return Separation(s.a_edges | inner, s.b_edges - inner, s.a_vertices, s.b_vertices)


@dataclass(frozen=True)
class KStar:
    center: int
    edges: frozenset[int]

    @property
    def k(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class StarVerdict:
    kind: str
    parts: tuple[frozenset[int], ...] = ()
    star: KStar | None = None


def star_verdict_violation(g: Multigraph, t: Tangle, u: Iterable[int], k: int, v: StarVerdict) -> str | None:
    """Check either certificate against ``g`` and ``t`` directly."""
    us = frozenset(u)
    lg, _ = line_graph(g)
    if v.kind == "free_star":
        st = v.star
        if st is None or st.k != k or st.center not in us:
            return "star has the wrong size or center"
        if any(st.center not in g.edges[e] for e in st.edges):
            return "star edge misses the center"
        free, _ = is_free(lg, t, st.edges)
        return None if free else "star is not free"
    if v.kind == "partition":
        seen: set[int] = set()
        for p in v.parts:
            if p & seen:
                return "parts overlap"
            seen |= p
            if len(delta(g, p)) >= k:
                return "part has a large boundary"
            if canonical_separation(g, p) not in t:
                return "canonical separation of a part is not in the tangle"
        return None if us <= seen else "parts do not cover U"
    return f"unknown verdict kind {v.kind!r}"


def verify_star_characterization(
    g: Multigraph, t: Tangle, u: Iterable[int], k: int, vertex_cap: int = 12
) -> StarVerdict:
    """A free k-star centred in ``u``, or disjoint small-cut parts covering ``u`` whose
    canonical separations all lie in ``t`` (``t`` is a tangle of the line graph)."""
    us = frozenset(u)
    if k >= t.order:
        raise PreconditionError("k must be below the tangle order")
    if g.vertex_count > vertex_cap:
        raise CapExceededError(f"more than {vertex_cap} vertices")
    lg, _ = line_graph(g)
    small = [s for s in iter_separations(lg, k) if s in t] if us else []
    for c in sorted(us):
        inc = g.incidence[c]
        if len(inc) < k:
            continue
        covers = {frozenset(s.a_vertices & set(inc)) for s in small}
        for f in combinations(inc, k):
            fs = frozenset(f)
            if not any(fs <= cv for cv in covers):
                return StarVerdict("free_star", star=KStar(c, fs))

    n = g.vertex_count
    cands = []
    for r in range(1, n):
        for w in combinations(range(n), r):
            ws = frozenset(w)
            if ws & us and len(delta(g, ws)) < k and canonical_separation(g, ws) in t:
                cands.append(ws)

    chosen: list[frozenset[int]] = []

    def cover(left: frozenset[int]) -> bool:
        if not left:
            return True
        v = min(left)
        for w in cands:
            if v in w and not any(w & c for c in chosen):
                chosen.append(w)
                if cover(left - w):
                    return True
                chosen.pop()
        return False

    if cover(us):
        return StarVerdict("partition", parts=tuple(chosen))
    raise BoundViolationError("neither a free star nor a covering partition exists")
