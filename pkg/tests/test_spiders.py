from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from immersionkit.errors import GraphError, PreconditionError
from immersionkit.flows import Path, PathBundle
from immersionkit.multigraph import Multigraph, delta, gen_P, gen_random, gen_S
from immersionkit.spiders import (
    Spider,
    SpiderObstruction,
    SpiderPacking,
    check_obstruction,
    check_spider,
    find_spider,
    obstruction_violation,
    pack_spiders,
    packing_violation,
    spider_obstruction,
    spider_violation,
)

import oracles


def brute_has_spider(g, xs, k):
    """Some body v outside X has every v-side cut avoiding X of size >= k."""
    rest = [v for v in g.vertices if v not in xs]
    for v in rest:
        others = [w for w in rest if w != v]
        if all(oracles.cut_size(g, {v} | set(c)) >= k for c in oracles.all_subsets(others)):
            return True
    return False


def test_parallel_path_spider():
    g = gen_P(3, 4)
    s = find_spider(g, {0}, 3)
    assert s.body == 1
    assert all(len(leg) == 1 for leg in s.legs)
    assert check_spider(g, {0}, s)
    assert find_spider(g, {0}, 4) is None


def test_connected_graph_has_order_one_spider():
    g = gen_P(1, 5)
    assert find_spider(g, {4}, 1) is not None


def test_arguments_checked():
    g = gen_P(1, 3)
    for bad in ([], [0, 1, 2], [9]):
        with pytest.raises(GraphError):
            find_spider(g, bad, 1)
    with pytest.raises(GraphError):
        find_spider(g, [0], 0)


def test_legs_touch_x_only_at_the_end():
    g = gen_S(2, 3)
    s = find_spider(g, {0, 1}, 2)
    assert s is not None
    for leg in s.legs:
        assert sum(1 for v in leg.vertices if v in {0, 1}) == 1


def test_spider_checker_catches_defects():
    g = gen_P(2, 3)
    leg = Path((1, 0), (0,))
    assert "legs" in spider_violation(g, {0}, Spider(1, 3, PathBundle((leg,))))
    assert "body" in spider_violation(g, {0}, Spider(0, 1, PathBundle((leg,))))
    assert spider_violation(g, {0}, Spider(1, 2, PathBundle((leg, leg)))) is not None
    through = Path((2, 1, 0), (2, 0))
    assert "internal" in spider_violation(g, {0, 1}, Spider(2, 1, PathBundle((through,))))


def test_obstruction_for_thin_path():
    g = gen_P(3, 4)
    obs = spider_obstruction(g, {0}, 4)
    assert check_obstruction(g, {0}, obs)
    with pytest.raises(PreconditionError):
        spider_obstruction(g, {0}, 3)


def test_obstruction_checker():
    g = gen_P(1, 4)
    assert check_obstruction(g, {0}, SpiderObstruction((frozenset({1, 2, 3}),), 2))
    assert "boundary" in obstruction_violation(g, {0}, SpiderObstruction((frozenset({1}),), 2))
    assert "covered" in obstruction_violation(g, {0}, SpiderObstruction((frozenset({1, 2}),), 3))
    assert "meets X" in obstruction_violation(g, {0}, SpiderObstruction((frozenset({0, 1, 2, 3}),), 3))


def test_packing_star():
    g = gen_S(3, 3)
    p = pack_spiders(g, {3}, 3, 3)
    assert p.hitting_set is None
    assert sorted(s.body for s in p.spiders) == [0, 1, 2]
    assert packing_violation(g, {3}, 3, 3, p) is None


def test_packing_falls_back_to_hitting_set():
    g = gen_P(3, 4)
    p = pack_spiders(g, {0}, 3, 2)
    assert len(p.spiders) == 1
    assert p.hitting_set == p.spiders[0].edge_ids
    assert packing_violation(g, {0}, 3, 2, p) is None
    assert packing_violation(g, {0}, 3, 2, SpiderPacking(p.spiders)) is not None
    assert packing_violation(g, {0}, 3, 2, SpiderPacking(p.spiders, frozenset())) is not None


def test_zero_target_packing_is_empty():
    p = pack_spiders(gen_P(1, 3), {0}, 1, 0)
    assert p.spiders == () and p.hitting_set is None


def _graphs():
    return st.tuples(st.integers(0, 10_000), st.integers(2, 7), st.integers(0, 13), st.integers(1, 3)).filter(
        lambda t: t[2] <= t[3] * t[1] * (t[1] - 1) // 2
    ).map(lambda t: gen_random(*t))


@settings(max_examples=80, deadline=None)
@given(_graphs(), st.data())
def test_find_spider_agrees_with_cut_brute_force(g, data):
    size = data.draw(st.integers(1, g.vertex_count - 1))
    xs = frozenset(data.draw(st.permutations(list(g.vertices)))[:size])
    k = data.draw(st.integers(1, 5))
    s = find_spider(g, xs, k)
    assert (s is not None) == brute_has_spider(g, xs, k)
    if s is not None:
        assert check_spider(g, xs, s)


@settings(max_examples=80, deadline=None)
@given(_graphs(), st.data())
def test_obstruction_and_packing_outputs_verify(g, data):
    size = data.draw(st.integers(1, g.vertex_count - 1))
    xs = frozenset(data.draw(st.permutations(list(g.vertices)))[:size])
    k = data.draw(st.integers(1, 4))
    if find_spider(g, xs, k) is None:
        assert check_obstruction(g, xs, spider_obstruction(g, xs, k))
    t = data.draw(st.integers(0, 3))
    assert packing_violation(g, xs, k, t, pack_spiders(g, xs, k, t)) is None
