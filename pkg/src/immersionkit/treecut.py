"""Tree-cut decompositions: adhesion, torsos, width, exact search, and
conversion from tree decompositions of bounded-degree graphs.

Width here is the simplified one meant for 3-edge-connected graphs: the
maximum of the adhesion and the number of vertices of every torso.
"""
from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .errors import BoundViolationError, CapExceededError, InvalidDecompositionError
from .flows import edge_connectivity, is_k_edge_connected
from .multigraph import Multigraph, delta, underlying_simple


class WeakConnectivityWarning(UserWarning):
    """Width was computed on a graph that is not 3-edge-connected."""


def _tree_violation(node_count: int, tree_edges: Sequence[tuple[int, int]]) -> str | None:
    if node_count < 1:
        return "a tree needs at least one node"
    if len(tree_edges) != node_count - 1:
        return f"{len(tree_edges)} tree edges for {node_count} nodes"
    for a, b in tree_edges:
        if not (0 <= a < node_count and 0 <= b < node_count) or a == b:
            return f"bad tree edge ({a}, {b})"
    t = Multigraph(node_count, tuple(tree_edges))
    if not t.is_connected():
        return "tree is not connected"
    return None


def _neighbors(node_count: int, tree_edges) -> list[list[int]]:
    nb: list[list[int]] = [[] for _ in range(node_count)]
    for a, b in tree_edges:
        nb[a].append(b)
        nb[b].append(a)
    return nb


def _reach(nb: list[list[int]], start: int, blocked: int) -> set[int]:
    seen = {start, blocked}
    stack = [start]
    while stack:
        a = stack.pop()
        for b in nb[a]:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    seen.discard(blocked)
    return seen


@dataclass(frozen=True)
class TreeCutDecomposition:
    node_count: int
    tree_edges: tuple[tuple[int, int], ...]
    bags: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "tree_edges", tuple((int(a), int(b)) for a, b in self.tree_edges))
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in self.bags))

    @property
    def neighbors(self) -> list[list[int]]:
        return _neighbors(self.node_count, self.tree_edges)

    def side(self, a: int, b: int) -> frozenset[int]:
        """Vertices in the bags on ``b``'s side of tree edge ``ab``."""
        nodes = _reach(self.neighbors, b, a)
        return frozenset(v for t in nodes for v in self.bags[t])


def decomposition_violation(g: Multigraph, d: TreeCutDecomposition) -> str | None:
    why = _tree_violation(d.node_count, d.tree_edges)
    if why:
        return why
    if len(d.bags) != d.node_count:
        return "one bag per tree node is required"
    seen: set[int] = set()
    for t, bag in enumerate(d.bags):
        if bag & seen:
            return f"bag {t} overlaps an earlier bag"
        if any(not 0 <= v < g.vertex_count for v in bag):
            return f"bag {t} names vertices outside the graph"
        seen |= bag
    if len(seen) != g.vertex_count:
        return "bags do not cover every vertex"
    return None


def validate(g: Multigraph, d: TreeCutDecomposition) -> None:
    why = decomposition_violation(g, d)
    if why:
        raise InvalidDecompositionError(why)


def adhesion(g: Multigraph, d: TreeCutDecomposition) -> int:
    validate(g, d)
    return max((len(delta(g, d.side(a, b))) for a, b in d.tree_edges), default=0)


@dataclass(frozen=True)
class Torso:
    graph: Multigraph
    core: frozenset[int]
    peripheral: frozenset[int]
    vertex_map: tuple[int, ...]


def torso(g: Multigraph, d: TreeCutDecomposition, node: int) -> Torso:
    """Consolidate the bags of each component of T - node; core vertices come first."""
    validate(g, d)
    if not 0 <= node < d.node_count:
        raise InvalidDecompositionError(f"node {node} is not in the tree")
    core = sorted(d.bags[node])
    vmap = [-1] * g.vertex_count
    for i, v in enumerate(core):
        vmap[v] = i
    nb = d.neighbors
    groups = sorted((_reach(nb, c, node) for c in nb[node]), key=min)
    for j, nodes in enumerate(groups):
        for t in nodes:
            for v in d.bags[t]:
                vmap[v] = len(core) + j
    edges = []
    for u, v in g.edges:
        a, b = vmap[u], vmap[v]
        if a != b:
            edges.append((a, b))
    n = len(core) + len(groups)
    return Torso(
        Multigraph(n, tuple(edges)),
        frozenset(range(len(core))),
        frozenset(range(len(core), n)),
        tuple(vmap),
    )


def width(g: Multigraph, d: TreeCutDecomposition, warn: bool = True) -> int:
    validate(g, d)
    if warn and g.vertex_count >= 2 and not is_k_edge_connected(g, 3):
        warnings.warn("graph is not 3-edge-connected; simplified width may differ", WeakConnectivityWarning, 2)
    sizes = [torso(g, d, t).graph.vertex_count for t in range(d.node_count)]
    return max([adhesion(g, d)] + sizes)


def check_bounded_degree_torsos(g: Multigraph, d: TreeCutDecomposition, a: int, b: int) -> bool:
    """Every torso has at most ``a`` vertices of degree at least ``b``."""
    for t in range(d.node_count):
        h = torso(g, d, t).graph
        if sum(1 for v in h.vertices if h.degree(v) >= b) > a:
            return False
    return True


# -- exact search -------------------------------------------------------------

def _cut_sizes(g: Multigraph) -> list[int]:
    n = g.vertex_count
    cut = [0] * (1 << n)
    for u, v in g.edges:
        bu, bv = 1 << u, 1 << v
        for m in range(1 << n):
            if bool(m & bu) != bool(m & bv):
                cut[m] += 1
    return cut


def _submasks(m: int):
    s = m
    while s:
        yield s
        s = (s - 1) & m


class _WidthDP:
    """Decide tree-cut width <= w by dynamic programming over vertex sets.

    ``feas[Z]``: Z can be the vertex set below a non-root node.
    ``blocks[Y]``: fewest feasible sets partitioning Y.
    """

    def __init__(self, g: Multigraph):
        self.g = g
        self.n = g.vertex_count
        self.cut = _cut_sizes(g)

    def solve(self, w: int) -> TreeCutDecomposition | None:
        n, cut = self.n, self.cut
        full = (1 << n) - 1
        inf = n + 1
        feas: list[int | None] = [None] * (1 << n)  # chosen bag when feasible
        blocks = [0] * (1 << n)
        pick = [0] * (1 << n)
        split = [0] * (1 << n)  # first block of a split into >= 2 parts
        for z in range(1, full + 1):
            low = z & -z
            if cut[z] <= w:
                for x in list(_submasks(z)) + [0]:
                    if x:
                        cnt = blocks[z & ~x] if z & ~x else 0
                    else:
                        # an empty bag is only useful with two or more children
                        cnt = inf
                        for b in _submasks(z):
                            if b != z and b & low and feas[b] is not None and 1 + blocks[z & ~b] < cnt:
                                cnt, split[z] = 1 + blocks[z & ~b], b
                    if cnt < inf and bin(x).count("1") + 1 + cnt <= w:
                        feas[z] = x
                        break
            best, arg = inf, 0
            for b in _submasks(z):
                if b & low and feas[b] is not None and 1 + blocks[z & ~b] < best:
                    best, arg = 1 + blocks[z & ~b], b
            blocks[z], pick[z] = best, arg
        for x in list(_submasks(full)) + [0]:
            rest = full & ~x
            if bin(x).count("1") + (blocks[rest] if rest else 0) <= w:
                return self._build(x, feas, pick, split)
        return None

    def _build(self, root_bag: int, feas, pick, split) -> TreeCutDecomposition:
        bags: list[frozenset[int]] = []
        edges: list[tuple[int, int]] = []

        def add(bag_mask: int, rest: int, parent: int | None, first: int = 0) -> None:
            me = len(bags)
            bags.append(frozenset(i for i in range(self.n) if bag_mask >> i & 1))
            if parent is not None:
                edges.append((parent, me))
            while rest:
                b = first or pick[rest]
                first = 0
                x = feas[b]
                add(x, b & ~x, me, split[b] if x == 0 else 0)
                rest &= ~b

        add(root_bag, ((1 << self.n) - 1) & ~root_bag, None)
        return TreeCutDecomposition(len(bags), tuple(edges), tuple(bags))


def tcw_lower_bound(g: Multigraph) -> int:
    n = g.vertex_count
    if n <= 1:
        return n
    return max(2, min(n, edge_connectivity(g)))


@dataclass(frozen=True)
class TcwBounds:
    lower: int
    upper: int
    witness: TreeCutDecomposition

    @property
    def exact(self) -> bool:
        return self.lower == self.upper


def exact_tree_cut_width(g: Multigraph) -> tuple[int, TreeCutDecomposition]:
    """Minimum simplified width and an optimal decomposition."""
    n = g.vertex_count
    if n == 0:
        return 0, TreeCutDecomposition(1, (), (frozenset(),))
    dp = _WidthDP(g)
    for w in range(tcw_lower_bound(g), n + 1):
        d = dp.solve(w)
        if d is not None:
            got = width(g, d, warn=False)
            if got > w:
                raise BoundViolationError(f"witness has width {got} > {w}")
            return got, d
    raise BoundViolationError("no decomposition of width |V|")


def tcw_bounds(g: Multigraph, exact_cap: int = 7) -> TcwBounds:
    """Lower and upper bounds on tree-cut width with a witness for the upper bound.

    Exact when ``|V| <= exact_cap``; otherwise the upper bound comes from a
    converted tree decomposition and the lower bound from edge connectivity.
    """
    n = g.vertex_count
    if n <= exact_cap:
        w, d = exact_tree_cut_width(g)
        return TcwBounds(w, w, d)
    single = TreeCutDecomposition(1, (), (frozenset(g.vertices),))
    best, best_d = n, single
    if n <= 20:
        td, _ = exact_tree_decomposition(g)
        d = convert_tree_decomposition(g, td, check_bounds=False)
        w = width(g, d, warn=False)
        if w < best:
            best, best_d = w, d
    return TcwBounds(tcw_lower_bound(g), best, best_d)


# -- tree decompositions --------------------------------------------------------

@dataclass(frozen=True)
class TreeDecomposition:
    node_count: int
    tree_edges: tuple[tuple[int, int], ...]
    bags: tuple[frozenset[int], ...]

    def __post_init__(self):
        object.__setattr__(self, "tree_edges", tuple((int(a), int(b)) for a, b in self.tree_edges))
        object.__setattr__(self, "bags", tuple(frozenset(b) for b in self.bags))

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1


def tree_decomposition_violation(g: Multigraph, td: TreeDecomposition) -> str | None:
    why = _tree_violation(td.node_count, td.tree_edges)
    if why:
        return why
    if len(td.bags) != td.node_count:
        return "one bag per tree node is required"
    nb = _neighbors(td.node_count, td.tree_edges)
    for v in g.vertices:
        holders = {t for t, b in enumerate(td.bags) if v in b}
        if not holders:
            return f"vertex {v} is in no bag"
        start = min(holders)
        seen = {start}
        stack = [start]
        while stack:
            a = stack.pop()
            for b in nb[a]:
                if b in holders and b not in seen:
                    seen.add(b)
                    stack.append(b)
        if seen != holders:
            return f"bags holding vertex {v} are not connected"
    for e, (u, v) in enumerate(g.edges):
        if not any(u in b and v in b for b in td.bags):
            return f"edge {e} is in no bag"
    return None


def _eliminate(adj: dict[int, set[int]], v: int) -> None:
    nb = adj.pop(v)
    for a in nb:
        adj[a].discard(v)
        adj[a] |= nb - {a}


def _min_degree_bound(adj: dict[int, set[int]]) -> int:
    """Minor-min-width style lower bound: repeatedly contract a min-degree vertex."""
    adj = {v: set(n) for v, n in adj.items()}
    best = 0
    while len(adj) > 1:
        v = min(adj, key=lambda x: (len(adj[x]), x))
        best = max(best, len(adj[v]))
        if not adj[v]:
            del adj[v]
            continue
        u = min(adj[v], key=lambda x: (len(adj[x]), x))
        # contract v into u
        for a in adj.pop(v):
            adj[a].discard(v)
            if a != u:
                adj[a].add(u)
                adj[u].add(a)
    return best


def _treewidth_at_most(adj: dict[int, set[int]], k: int, limit: int) -> list[int] | None:
    failed: set[frozenset[int]] = set()
    steps = [0]

    def rec(adj: dict[int, set[int]], order: list[int]) -> list[int] | None:
        steps[0] += 1
        if steps[0] > limit:
            raise CapExceededError("tree decomposition search exceeded its step limit")
        if len(adj) <= k + 1:
            return order + sorted(adj)
        key = frozenset(adj)
        if key in failed:
            return None
        # simplicial or low-degree vertices can be removed without branching
        for v in sorted(adj):
            nb = adj[v]
            if len(nb) <= k and all(b in adj[a] for a, b in combinations(nb, 2)):
                nxt = {x: set(n) for x, n in adj.items()}
                _eliminate(nxt, v)
                got = rec(nxt, order + [v])
                if got is None:
                    failed.add(key)
                return got
        for v in sorted(adj, key=lambda x: (len(adj[x]), x)):
            if len(adj[v]) > k:
                break
            nxt = {x: set(n) for x, n in adj.items()}
            _eliminate(nxt, v)
            got = rec(nxt, order + [v])
            if got is not None:
                return got
        failed.add(key)
        return None

    return rec(adj, [])


def decomposition_from_order(g: Multigraph, order: Sequence[int]) -> TreeDecomposition:
    pos = {v: i for i, v in enumerate(order)}
    adj = {v: set(g.adjacency[v]) for v in g.vertices}
    bags = []
    parent: list[int | None] = []
    for v in order:
        later = adj[v]
        bags.append(frozenset(later | {v}))
        parent.append(pos[min(later, key=lambda x: pos[x])] if later else None)
        _eliminate(adj, v)
    edges = []
    roots = []
    for i, p in enumerate(parent):
        if p is None:
            roots.append(i)
        else:
            edges.append((i, p))
    edges += [(roots[i], roots[i + 1]) for i in range(len(roots) - 1)]
    if not bags:
        return TreeDecomposition(1, (), (frozenset(),))
    return TreeDecomposition(len(bags), tuple(edges), tuple(bags))


def exact_tree_decomposition(g: Multigraph, vertex_cap: int = 20, step_limit: int = 2_000_000) -> tuple[TreeDecomposition, int]:
    """Minimum-width tree decomposition by bounded search over elimination orders."""
    n = g.vertex_count
    if n > vertex_cap:
        raise CapExceededError(f"{n} vertices exceeds the cap of {vertex_cap}")
    if n == 0:
        return TreeDecomposition(1, (), (frozenset(),)), -1
    simple = underlying_simple(g)
    adj = {v: set(simple.adjacency[v]) for v in simple.vertices}
    k = _min_degree_bound(adj)
    while True:
        order = _treewidth_at_most(adj, k, step_limit)
        if order is not None:
            td = decomposition_from_order(g, order)
            return td, td.width
        k += 1


def convert_tree_decomposition(
    g: Multigraph, td: TreeDecomposition, d_max: int | None = None, check_bounds: bool = True
) -> TreeCutDecomposition:
    """Tree-cut decomposition from a tree decomposition: each vertex goes to the
    root-most node holding it.

    Nodes whose bag is contained in a neighbour's are merged first, and the
    parts for different components are chained through leaves. With
    ``check_bounds`` the adhesion and torso bounds are asserted.
    """
    why = tree_decomposition_violation(g, td)
    if why:
        raise InvalidDecompositionError(why)
    w = max(td.width, 1)
    d = max(g.max_degree() if d_max is None else d_max, 1)
    nb_all = _neighbors(td.node_count, td.tree_edges)

    pieces: list[tuple[list[frozenset[int]], list[tuple[int, int]]]] = []
    for comp in g.components():
        nodes = {t for t, b in enumerate(td.bags) if b & comp}
        bag = {t: td.bags[t] & comp for t in nodes}
        nb = {t: {s for s in nb_all[t] if s in nodes} for t in nodes}
        merged = True
        while merged:
            merged = False
            for t in sorted(nb):
                for s in sorted(nb[t]):
                    if bag[s] <= bag[t]:
                        # fold s into t
                        for r in nb.pop(s):
                            nb[r].discard(s)
                            if r != t:
                                nb[r].add(t)
                                nb[t].add(r)
                        del bag[s]
                        merged = True
                        break
                if merged:
                    break
        root = min(nb)
        depth = {root: 0}
        order = [root]
        queue = deque([root])
        while queue:
            a = queue.popleft()
            for b in sorted(nb[a]):
                if b not in depth:
                    depth[b] = depth[a] + 1
                    order.append(b)
                    queue.append(b)
        home = {}
        for t in order:
            for v in bag[t]:
                home.setdefault(v, t)
        idx = {t: i for i, t in enumerate(order)}
        bags = [frozenset(v for v, h in home.items() if h == t) for t in order]
        edges = sorted({tuple(sorted((idx[a], idx[b]))) for a in nb for b in nb[a]})
        pieces.append((bags, edges))

    bags_out: list[frozenset[int]] = []
    edges_out: list[tuple[int, int]] = []
    prev_leaf = None
    for bags, edges in pieces:
        off = len(bags_out)
        deg = [0] * len(bags)
        for a, b in edges:
            deg[a] += 1
            deg[b] += 1
        leaves = [i for i in range(len(bags)) if deg[i] <= 1]
        entry = leaves[0]
        exit_ = leaves[-1] if len(leaves) > 1 else entry
        bags_out += bags
        edges_out += [(a + off, b + off) for a, b in edges]
        if prev_leaf is not None:
            edges_out.append((prev_leaf, entry + off))
        prev_leaf = exit_ + off
    if not bags_out:
        bags_out = [frozenset()]
    out = TreeCutDecomposition(len(bags_out), tuple(edges_out), tuple(bags_out))
    validate(g, out)
    if check_bounds:
        adh = adhesion(g, out)
        if adh > (2 * w + 2) * d:
            raise BoundViolationError(f"adhesion {adh} exceeds (2w+2)d = {(2 * w + 2) * d}")
        for t in range(out.node_count):
            size = torso(g, out, t).graph.vertex_count
            if size > (d + 1) * (w + 1):
                raise BoundViolationError(f"torso at node {t} has {size} > (d+1)(w+1) = {(d + 1) * (w + 1)} vertices")
    return out
