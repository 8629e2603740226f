#!/usr/bin/env python3
"""
测试精确权重向量路径搜索
"""
import sys
from pathlib import Path

# 添加项目路径
sys.path.insert(0, str(Path(__file__).parent))

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reach_runner.catalog import figure1_game, random_game
from reach_runner.errors import InvalidInputError
from reach_runner.parikh import (
    PathQuery,
    Subgraph,
    cycle_avoiding_exists,
    exact_weight_path_exists,
    reachable_weight_vectors,
)


def query(arena, sub, source, sink, required, caps):
    idx = arena.index
    return PathQuery(arena, sub, idx(source), idx(sink), (0,), required, caps)


def test_exact_weight_path():
    arena = figure1_game().arena
    idx = arena.index
    whole = Subgraph.whole(arena)
    ok, path = exact_weight_path_exists(query(arena, whole, "v0", "v4", (2,), (5,)))
    assert ok and path == (idx("v0"), idx("v2"), idx("v4"))
    ok, path = exact_weight_path_exists(query(arena, whole, "v0", "v4", (3,), (5,)))
    assert ok and path == (idx("v0"), idx("v1"), idx("v2"), idx("v4"))
    ok, path = exact_weight_path_exists(query(arena, whole, "v0", "v4", (1,), (5,)))
    assert not ok and path is None


def test_stop_at_cuts_outgoing_edges():
    arena = figure1_game().arena
    sub = Subgraph.induced(arena, arena.vertices, stop_at=[arena.index("v2")])
    ok, _ = exact_weight_path_exists(query(arena, sub, "v0", "v4", (2,), (5,)))
    assert not ok


def test_query_validation():
    arena = figure1_game().arena
    with pytest.raises(InvalidInputError):
        query(arena, Subgraph.whole(arena), "v0", "v4", (6,), (5,))
    with pytest.raises(InvalidInputError):
        PathQuery(arena, Subgraph.whole(arena), 0, 4, (0, 1), (1,), (1,))


def test_reachable_weight_vectors():
    arena = figure1_game().arena
    idx = arena.index
    found = reachable_weight_vectors(arena, Subgraph.whole(arena), idx("v0"), (0,), (2,))
    assert found[idx("v2")] == {(1,), (2,)}
    assert found[idx("v4")] == {(2,)}
    assert found[idx("v0")] == {(0,)}


def test_saturating_dimension_clamps():
    arena = figure1_game().arena
    idx = arena.index
    found = reachable_weight_vectors(
        arena, Subgraph.whole(arena), idx("v0"), (0,), (2,), saturating=frozenset({0})
    )
    assert found[idx("v4")] == {(2,)}
    assert found[idx("v3")] == {(2,)}


def test_cycle_avoiding():
    arena = figure1_game().arena
    idx = arena.index
    whole = Subgraph.whole(arena)
    assert cycle_avoiding_exists(whole, idx("v3"), [])
    assert not cycle_avoiding_exists(whole, idx("v0"), [])
    assert not cycle_avoiding_exists(whole, idx("v4"), [idx("v4")])


@settings(max_examples=200, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=100000),
    keep=st.lists(st.booleans(), min_size=5, max_size=5),
    stop=st.lists(st.booleans(), min_size=5, max_size=5),
    ends=st.tuples(st.integers(min_value=0, max_value=4), st.integers(min_value=0, max_value=4)),
    dims=st.lists(st.integers(min_value=0, max_value=2), min_size=1, max_size=2, unique=True),
    data=st.data(),
)
def test_exact_path_matches_reachable_vectors(seed, keep, stop, ends, dims, data):
    """精确路径存在当且仅当目标向量出现在可达向量集合中, 且返回的路径权重恰好是该向量"""
    arena = random_game(seed, vertices=5, players=3).arena
    source, sink = ends
    chosen = {v for v in arena.vertices if keep[v]} | {source, sink}
    sub = Subgraph.induced(arena, chosen, stop_at=[v for v in chosen if stop[v] and v != source])
    caps = tuple(data.draw(st.integers(min_value=0, max_value=5)) for _ in dims)
    required = tuple(data.draw(st.integers(min_value=0, max_value=cap)) for cap in caps)
    dims = tuple(dims)

    found = reachable_weight_vectors(arena, sub, source, dims, caps)
    ok, path = exact_weight_path_exists(PathQuery(arena, sub, source, sink, dims, required, caps))
    assert ok == (required in found[sink])
    if ok:
        assert path[0] == source and path[-1] == sink
        assert all((u, v) in sub.edges for u, v in zip(path, path[1:]))
        for j, d in enumerate(dims):
            assert sum(arena.weight(u, v, d) for u, v in zip(path, path[1:])) == required[j]
    else:
        assert path is None
