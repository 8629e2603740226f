"""
单环境玩家 (t = 1) 的 NCNS 精确求解: 扩展竞技场 + c-witness 搜索。

扩展顶点 (v, (c_0, c_1), F): c_i 为截断后的累计权重 (超过界即 TOP), F 为已访问目标的玩家集合;
i ∈ F 后 c_i 冻结。
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx

from .arena import (
    TOP,
    Cost,
    Lasso,
    ReachabilityGame,
    WeightedArena,
    check_lasso,
    close_lasso,
    cost_of_lasso,
    format_cost,
)
from .errors import InvalidInputError, UnsupportedShapeError
from .workers import first_success
from .zerosum import ZeroSumView, attractor, min_cost_reach_values

ExtendedVertex = Tuple[int, Tuple[Cost, ...], FrozenSet[int]]


@dataclass(frozen=True)
class ExtendedArena:
    base: ReachabilityGame
    bounds: Tuple[int, ...]
    states: Tuple[ExtendedVertex, ...]
    arena: WeightedArena
    initial: int
    _index: Dict[ExtendedVertex, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_index", {s: k for k, s in enumerate(self.states)})

    def index(self, state: ExtendedVertex) -> int:
        return self._index[state]

    def step(self, state: ExtendedVertex, v: int) -> ExtendedVertex:
        return _extended_step(self.base, self.bounds, state, v)


def _extended_step(
    game: ReachabilityGame,
    bounds: Sequence[int],
    state: ExtendedVertex,
    v: int,
) -> ExtendedVertex:
    u, counters, done = state
    arena = game.arena
    fresh: List[Cost] = []
    for i, value in enumerate(counters):
        if i in done or value is TOP:
            fresh.append(value)
            continue
        x = value + arena.weight(u, v, i)
        fresh.append(TOP if x > bounds[i] else x)
    return (v, tuple(fresh), done | game.players_at(v))


def _state_name(game: ReachabilityGame, state: ExtendedVertex) -> str:
    v, counters, done = state
    inner = ",".join(format_cost(x) for x in counters)
    return f"{game.name(v)}[{inner}]{{{','.join(str(i) for i in sorted(done))}}}"


def build_extended_arena(game: ReachabilityGame, bounds: Sequence[int]) -> ExtendedArena:
    arena = game.arena
    if len(bounds) != arena.num_players or any(b < 0 for b in bounds):
        raise InvalidInputError(f"need one natural bound per player, got {list(bounds)}")
    root: ExtendedVertex = (
        game.initial,
        tuple(0 for _ in range(arena.num_players)),
        game.players_at(game.initial),
    )
    ids: Dict[ExtendedVertex, int] = {root: 0}
    order: List[ExtendedVertex] = [root]
    edges = []
    zero = tuple(0 for _ in range(arena.num_players))
    queue = deque([root])
    while queue:
        state = queue.popleft()
        for v in arena.successors(state[0]):
            child = _extended_step(game, bounds, state, v)
            if child not in ids:
                ids[child] = len(order)
                order.append(child)
                queue.append(child)
            edges.append((ids[state], ids[child], zero))
    ext = WeightedArena.build(
        [_state_name(game, s) for s in order],
        [arena.owner[s[0]] for s in order],
        arena.num_players,
        edges,
    )
    return ExtendedArena(game, tuple(bounds), tuple(order), ext, 0)


@dataclass(frozen=True)
class WitnessVerdict:
    answer: bool
    # lasso over extended vertex ids, and its projection on the base game
    witness: Optional[Lasso] = None
    play: Optional[Lasso] = None
    d: Cost = TOP


def _require_one_env(game: ReachabilityGame) -> None:
    if game.num_players != 2:
        raise UnsupportedShapeError(
            f"ncns1 needs exactly one environment player, game has {game.num_players - 1}; "
            "use the oracle instead"
        )


def player0_safe_region(ext: ExtendedArena, c: int, d: int) -> FrozenSet[int]:
    """Extended vertices from which player 0 keeps cost_0 <= c or cost_1 > d."""
    states = ext.states
    good = [k for k, (_, cs, done) in enumerate(states) if 0 in done and cs[0] is not TOP]
    reach_good = attractor(ZeroSumView(ext.arena, 0), good)
    lose = [
        k
        for k, (_, cs, done) in enumerate(states)
        if 1 in done and cs[1] is not TOP and k not in reach_good
    ]
    forced = attractor(ZeroSumView(ext.arena, 1), lose)
    return frozenset(k for k in ext.arena.vertices if k not in forced)


def _assert_closed(ext: ExtendedArena, region: FrozenSet[int]) -> None:
    arena = ext.arena
    for k in region:
        inside = [s in region for s in arena.successors(k)]
        if arena.owner[k] == 0:
            assert any(inside), f"{arena.names[k]} has no successor inside the safe region"
        else:
            assert all(inside), f"{arena.names[k]} can leave the safe region"


def _witness_for(args: Tuple[ReachabilityGame, int, int]) -> Optional[WitnessVerdict]:
    game, c, d = args
    ext = build_extended_arena(game, (c, d))
    region = player0_safe_region(ext, c, d)
    _assert_closed(ext, region)
    if ext.initial not in region:
        return None

    def done(k: int) -> bool:
        _, cs, seen = ext.states[k]
        return 0 in seen and cs[0] is not TOP and 1 in seen and cs[1] == d

    graph = nx.DiGraph()
    graph.add_nodes_from(region)
    graph.add_edges_from((k, s) for k in region for s in ext.arena.successors(k) if s in region)
    lengths = nx.single_source_shortest_path_length(graph, ext.initial)
    hits = sorted((k for k in lengths if done(k)), key=lambda k: (lengths[k], k))
    if not hits:
        return None
    path = nx.shortest_path(graph, ext.initial, hits[0])
    witness = close_lasso(ext.arena, path, region)
    play = Lasso(
        tuple(ext.states[k][0] for k in witness.prefix),
        tuple(ext.states[k][0] for k in witness.cycle),
    )
    return WitnessVerdict(True, witness, play, d)


def solve_ncns_one_env(game: ReachabilityGame, c: int, jobs: int = 1) -> WitnessVerdict:
    _require_one_env(game)
    if not isinstance(c, int) or c < 0:
        raise InvalidInputError(f"threshold must be a natural number, got {c!r}")
    arena = game.arena
    values = min_cost_reach_values(ZeroSumView(arena, 0), game.targets[0], 0)
    if values[game.initial] <= c:
        return WitnessVerdict(True, None, None, TOP)
    top = 2 * arena.vertex_count * arena.max_weight
    found = first_success(_witness_for, [(game, c, d) for d in range(top + 1)], jobs)
    return found if found is not None else WitnessVerdict(False)


def check_c_witness(game: ReachabilityGame, c: int, d: int, pi: Lasso) -> bool:
    """pi has cost_0 <= c, cost_1 = d, and every environment deviation lands where player 0 wins."""
    _require_one_env(game)
    check_lasso(game, pi)
    costs = cost_of_lasso(game, pi)
    if costs[0] > c or costs[1] != d:
        return False
    ext = build_extended_arena(game, (c, d))
    region = player0_safe_region(ext, c, d)
    arena = game.arena
    state = ext.states[ext.initial]
    seen = set()
    n = 0
    while True:
        key = (state, n if n < len(pi.prefix) else len(pi.prefix) + (n - len(pi.prefix)) % len(pi.cycle))
        if key in seen:
            return True
        seen.add(key)
        u, nxt = pi.at(n), pi.at(n + 1)
        if ext.index(state) not in region:
            return False
        if arena.owner[u] != 0:
            for v in arena.successors(u):
                if v != nxt and ext.index(ext.step(state, v)) not in region:
                    return False
        state = ext.step(state, nxt)
        n += 1


def min_consistent_env_cost(game: ReachabilityGame, player: int = 1) -> Cost:
    """Cheapest cost_player over all plays from the initial vertex."""
    arena = game.arena
    graph = nx.DiGraph()
    graph.add_nodes_from(arena.vertices)
    for u, v, w in arena.edges:
        graph.add_edge(u, v, weight=w[player])
    if game.initial in game.targets[player]:
        return 0
    dist = nx.single_source_dijkstra_path_length(graph, game.initial)
    reached = [dist[v] for v in game.targets[player] if v in dist]
    return min(reached) if reached else TOP
