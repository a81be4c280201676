"""X-spiders: detection, cut-partition obstructions, and greedy packing.

An X-spider of order k is a body vertex outside X together with k
edge-disjoint paths from the body to X, none with an internal vertex in X.
When no such spider exists (and ``|delta(X)|`` is large enough) the vertices
outside X split into parts each bounded by fewer than k edges.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import BoundViolationError, GraphError, PreconditionError
from .flows import Path, PathBundle, check_path_bundle, max_edge_disjoint_paths, min_cut_side
from .multigraph import Multigraph, consolidate, delete_edges, delta


@dataclass(frozen=True)
class Spider:
    body: int
    order: int
    legs: PathBundle

    @property
    def edge_ids(self) -> frozenset[int]:
        return self.legs.edge_ids


@dataclass(frozen=True)
class SpiderObstruction:
    parts: tuple[frozenset[int], ...]
    k: int


@dataclass(frozen=True)
class SpiderPacking:
    spiders: tuple[Spider, ...]
    hitting_set: frozenset[int] | None = None


def _target_set(g: Multigraph, x: Iterable[int]) -> frozenset[int]:
    xs = frozenset(int(v) for v in x)
    if not xs:
        raise GraphError("X must be nonempty")
    if any(not 0 <= v < g.vertex_count for v in xs):
        raise GraphError("X contains vertices outside the graph")
    if len(xs) == g.vertex_count:
        raise GraphError("X must leave at least one vertex outside")
    return xs


def spider_violation(g: Multigraph, x: Iterable[int], s: Spider) -> str | None:
    """Reason ``s`` is not an X-spider of its order in ``g``, or None."""
    xs = frozenset(x)
    if s.body in xs:
        return "body lies in X"
    if len(s.legs) != s.order:
        return f"spider has {len(s.legs)} legs, expected {s.order}"
    if not check_path_bundle(g, s.legs):
        return "legs are not edge-disjoint walks"
    for i, leg in enumerate(s.legs):
        if leg.start != s.body:
            return f"leg {i} does not start at the body"
        if not leg.edges or leg.end not in xs:
            return f"leg {i} does not end in X"
        if xs.intersection(leg.vertices[:-1]):
            return f"leg {i} has an internal vertex in X"
    return None


def check_spider(g: Multigraph, x: Iterable[int], s: Spider) -> bool:
    return spider_violation(g, x, s) is None


def obstruction_violation(g: Multigraph, x: Iterable[int], obs: SpiderObstruction) -> str | None:
    xs = frozenset(x)
    seen: set[int] = set()
    for i, part in enumerate(obs.parts):
        if not part:
            return f"part {i} is empty"
        if part & xs:
            return f"part {i} meets X"
        if part & seen:
            return f"part {i} overlaps an earlier part"
        seen |= part
        cut = len(delta(g, part))
        if cut >= obs.k:
            return f"part {i} has boundary {cut} >= {obs.k}"
    missing = set(g.vertices) - xs - seen
    if missing:
        return f"vertices {sorted(missing)} are not covered"
    return None


def check_obstruction(g: Multigraph, x: Iterable[int], obs: SpiderObstruction) -> bool:
    return obstruction_violation(g, x, obs) is None


def find_spider(g: Multigraph, x: Iterable[int], k: int) -> Spider | None:
    """First X-spider of order ``k`` by increasing body id, or None."""
    xs = _target_set(g, x)
    if k < 1:
        raise GraphError("k must be at least 1")
    cons = consolidate(g, xs)
    h = cons.graph
    for v in g.vertices:
        if v in xs or g.degree(v) < k:
            continue
        bundle = max_edge_disjoint_paths(h, cons.vertex_map[v], cons.vertex, limit=k)
        if len(bundle) < k:
            continue
        # the merged vertex only ends each path, so legs enter X exactly once
        legs = tuple(Path.from_edges(g, v, [cons.edge_map[e] for e in p.edges]) for p in bundle)
        return Spider(v, k, PathBundle(legs))
    return None


def _uncross(g: Multigraph, sets: list[frozenset[int]], k: int) -> list[frozenset[int]]:
    """Make small-cut sets pairwise disjoint without shrinking their union."""
    sets = list(dict.fromkeys(sets))
    total = sum(map(len, sets))
    while True:
        sets = [s for s in sets if not any(s < o for o in sets)]
        pair = next(
            ((i, j) for i in range(len(sets)) for j in range(i + 1, len(sets)) if sets[i] & sets[j]),
            None,
        )
        if pair is None:
            return sets
        i, j = pair
        a, b = sets[i], sets[j]
        if len(delta(g, a - b)) < k:
            sets[i] = a - b
        elif len(delta(g, b - a)) < k:
            sets[j] = b - a
        else:
            raise BoundViolationError("neither difference of two crossing small cuts is small")
        sets = list(dict.fromkeys(sets))
        new_total = sum(map(len, sets))
        if new_total >= total:
            raise BoundViolationError("uncrossing did not shrink the family")
        total = new_total


def spider_obstruction(g: Multigraph, x: Iterable[int], k: int) -> SpiderObstruction:
    """Partition of V - X into parts with boundary < k; requires that no spider exists."""
    xs = _target_set(g, x)
    if find_spider(g, xs, k) is not None:
        raise PreconditionError(f"an X-spider of order {k} exists")
    cons = consolidate(g, xs)
    back = {nv: old for old, nv in enumerate(cons.vertex_map) if old not in xs}
    sides = []
    for v in g.vertices:
        if v in xs or g.degree(v) < k:
            continue
        cs = min_cut_side(cons.graph, cons.vertex_map[v], cons.vertex)
        if cs.size >= k:
            raise BoundViolationError(f"cut around {v} has size {cs.size}")
        sides.append(frozenset(back[w] for w in cs.side))
    parts = _uncross(g, sides, k)
    covered = set().union(*parts) if parts else set()
    parts += [frozenset([v]) for v in g.vertices if v not in xs and v not in covered]
    obs = SpiderObstruction(tuple(sorted(parts, key=min)), k)
    why = obstruction_violation(g, xs, obs)
    if why:
        raise BoundViolationError(why)
    return obs


def pack_spiders(g: Multigraph, x: Iterable[int], k: int, t: int) -> SpiderPacking:
    """Greedy edge-disjoint packing of ``t`` spiders, or the spiders found plus a hitting set."""
    xs = _target_set(g, x)
    if k < 1 or t < 0:
        raise GraphError("k must be positive and t non-negative")
    found: list[Spider] = []
    used: set[int] = set()
    while len(found) < t:
        res = delete_edges(g, used)
        s = find_spider(res.graph, xs, k)
        if s is None:
            break
        legs = tuple(
            Path(p.vertices, tuple(res.edge_map[e] for e in p.edges)) for p in s.legs
        )
        found.append(Spider(s.body, k, PathBundle(legs)))
        used |= found[-1].edge_ids
    if len(found) == t:
        return SpiderPacking(tuple(found))
    hitting = frozenset(used)
    if find_spider(delete_edges(g, hitting).graph, xs, k) is not None:
        raise BoundViolationError("hitting set misses a spider")
    return SpiderPacking(tuple(found), hitting)


def packing_violation(g: Multigraph, x: Iterable[int], k: int, t: int, p: SpiderPacking) -> str | None:
    xs = frozenset(x)
    used: set[int] = set()
    for i, s in enumerate(p.spiders):
        if s.order != k:
            return f"spider {i} has order {s.order}"
        why = spider_violation(g, xs, s)
        if why:
            return f"spider {i}: {why}"
        if used & s.edge_ids:
            return f"spider {i} shares edges with an earlier spider"
        used |= s.edge_ids
    if p.hitting_set is None:
        return None if len(p.spiders) >= t else "too few spiders and no hitting set"
    if any(not 0 <= e < g.edge_count for e in p.hitting_set):
        return "hitting set names unknown edges"
    if find_spider(delete_edges(g, p.hitting_set).graph, xs, k) is not None:
        return "a spider survives the hitting set"
    return None
