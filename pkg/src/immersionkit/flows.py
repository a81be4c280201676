"""Unit-capacity flows on multigraphs: edge-disjoint paths, min cuts, connectivity.

Each edge id carries one unit of capacity in either direction, so parallel
edges contribute their multiplicity automatically.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import GraphError
from .multigraph import Multigraph, delta


@dataclass(frozen=True)
class Path:
    """A walk given by its vertex sequence and the edge ids between them."""

    vertices: tuple[int, ...]
    edges: tuple[int, ...]

    @property
    def start(self) -> int:
        return self.vertices[0]

    @property
    def end(self) -> int:
        return self.vertices[-1]

    def __len__(self) -> int:
        return len(self.edges)

    def reversed(self) -> "Path":
        return Path(self.vertices[::-1], self.edges[::-1])

    @classmethod
    def from_edges(cls, g: Multigraph, start: int, edges: Sequence[int]) -> "Path":
        verts = [start]
        for e in edges:
            verts.append(g.other_end(e, verts[-1]))
        return cls(tuple(verts), tuple(edges))


def is_walk(g: Multigraph, path: Path) -> bool:
    if len(path.vertices) != len(path.edges) + 1:
        return False
    for i, e in enumerate(path.edges):
        if not 0 <= e < g.edge_count:
            return False
        a, b = g.edges[e]
        if {a, b} != {path.vertices[i], path.vertices[i + 1]}:
            return False
    return True


def is_vertex_simple(path: Path) -> bool:
    return len(set(path.vertices)) == len(path.vertices)


@dataclass(frozen=True)
class PathBundle:
    paths: tuple[Path, ...]

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    @property
    def edge_ids(self) -> frozenset[int]:
        return frozenset(e for p in self.paths for e in p.edges)


def check_path_bundle(g: Multigraph, bundle: PathBundle) -> bool:
    """Every path is an edge-simple walk in ``g`` and paths share no edge id."""
    used: set[int] = set()
    for p in bundle.paths:
        if not is_walk(g, p) or len(set(p.edges)) != len(p.edges):
            return False
        if used & set(p.edges):
            return False
        used |= set(p.edges)
    return True


@dataclass(frozen=True)
class CutSide:
    side: frozenset[int]
    cut_edges: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.cut_edges)


class _UnitFlow:
    """Augmenting-path max flow with per-edge-id unit capacity.

    ``flow[e]`` is +1 when edge ``e = (a, b)`` carries flow a->b, -1 for b->a.
    """

    def __init__(self, g: Multigraph, s: int, t: int):
        if s == t:
            raise GraphError("source and sink must differ")
        for v in (s, t):
            if not 0 <= v < g.vertex_count:
                raise GraphError(f"vertex {v} is not in the graph")
        self.g, self.s, self.t = g, s, t
        self.flow = [0] * g.edge_count
        self.value = 0

    def _residual(self, e: int, frm: int) -> bool:
        a, _ = self.g.edges[e]
        return self.flow[e] != (1 if frm == a else -1)

    def _bfs(self) -> dict[int, tuple[int, int]] | None:
        g, s, t = self.g, self.s, self.t
        parent: dict[int, tuple[int, int]] = {s: (-1, -1)}
        queue = deque([s])
        while queue:
            a = queue.popleft()
            for e in g.incidence[a]:
                b = g.other_end(e, a)
                if b in parent or not self._residual(e, a):
                    continue
                parent[b] = (a, e)
                if b == t:
                    return parent
                queue.append(b)
        return None

    def augment(self, limit: float = float("inf")) -> int:
        while self.value < limit:
            parent = self._bfs()
            if parent is None:
                break
            v = self.t
            while v != self.s:
                a, e = parent[v]
                self.flow[e] += 1 if self.g.edges[e][0] == a else -1
                v = a
            self.value += 1
        return self.value

    def reachable(self) -> frozenset[int]:
        g = self.g
        seen = {self.s}
        stack = [self.s]
        while stack:
            a = stack.pop()
            for e in g.incidence[a]:
                b = g.other_end(e, a)
                if b not in seen and self._residual(e, a):
                    seen.add(b)
                    stack.append(b)
        return frozenset(seen)

    def decompose(self) -> PathBundle:
        """Split the flow into vertex-simple s-t paths, dropping flow cycles."""
        g = self.g
        out_edges: dict[int, list[int]] = {}
        for e, f in enumerate(self.flow):
            if f:
                a, b = g.edges[e]
                tail = a if f > 0 else b
                out_edges.setdefault(tail, []).append(e)
        for lst in out_edges.values():
            lst.sort(reverse=True)
        paths = []
        for _ in range(self.value):
            verts = [self.s]
            edges: list[int] = []
            pos = {self.s: 0}
            while verts[-1] != self.t:
                a = verts[-1]
                e = out_edges[a].pop()
                b = g.other_end(e, a)
                if b in pos:
                    cut = pos[b]
                    for w in verts[cut + 1:]:
                        del pos[w]
                    del verts[cut + 1:]
                    del edges[cut:]
                else:
                    pos[b] = len(verts)
                    verts.append(b)
                    edges.append(e)
            paths.append(Path(tuple(verts), tuple(edges)))
        return PathBundle(tuple(paths))


def max_edge_disjoint_paths(g: Multigraph, s: int, t: int, limit: float = float("inf")) -> PathBundle:
    """Up to ``limit`` pairwise edge-disjoint s-t paths, each vertex-simple.

    Returns ``min(limit, lambda(s, t))`` paths.
    """
    fl = _UnitFlow(g, s, t)
    fl.augment(limit)
    return fl.decompose()


def local_edge_connectivity(g: Multigraph, s: int, t: int, limit: float = float("inf")) -> int:
    fl = _UnitFlow(g, s, t)
    return fl.augment(limit)


def min_cut_side(g: Multigraph, s: int, t: int) -> CutSide:
    """Inclusion-minimal source side of a minimum s-t edge cut."""
    fl = _UnitFlow(g, s, t)
    fl.augment()
    side = fl.reachable()
    return CutSide(side, delta(g, side))


def edge_connectivity(g: Multigraph) -> int:
    """Global edge connectivity: min over nonempty proper vertex subsets of ``|delta|``."""
    n = g.vertex_count
    if n < 2:
        raise GraphError("edge connectivity needs at least two vertices")
    best = min(g.degree(v) for v in g.vertices)
    for v in range(1, n):
        if best == 0:
            break
        best = min(best, local_edge_connectivity(g, 0, v, limit=best))
    return best


def is_k_edge_connected(g: Multigraph, k: int) -> bool:
    if g.vertex_count < 2:
        return True
    return edge_connectivity(g) >= k


def multi_target_paths(g: Multigraph, s: int, targets: Iterable[int]) -> PathBundle | None:
    """Edge-disjoint paths from ``s`` to each listed target (with repetition).

    Path ``i`` ends at ``targets[i]``; ``None`` when no such system exists.
    """
    targets = list(targets)
    n = g.vertex_count
    sink = n
    extra = tuple((v, sink) for v in targets)
    aux = Multigraph(n + 1, g.edges + extra)
    fl = _UnitFlow(aux, s, sink)
    if fl.augment(len(targets)) < len(targets):
        return None
    bundle = fl.decompose()
    base = g.edge_count
    by_target: dict[int, Path] = {}
    for p in bundle.paths:
        last = p.edges[-1]
        by_target[last - base] = Path(p.vertices[:-1], p.edges[:-1])
    return PathBundle(tuple(by_target[i] for i in range(len(targets))))
