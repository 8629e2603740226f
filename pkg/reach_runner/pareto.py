"""
Pareto 理性: PO 判定、固定 σ0 下的 PO 可保证性 (偏离博弈), 以及 CPS / NCPV / UNCPV。

环境玩家 1..t 被合并为同一个所有者; payoff 向量的第 i-1 位是玩家 i 的代价。
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple

from .arena import (
    TOP,
    Cost,
    CostVector,
    Lasso,
    ReachabilityGame,
    WeightedArena,
    check_lasso,
    payoff,
    settled_lasso,
)
from .errors import InvalidInputError, PreconditionError
from .mealy import ProductGame
from .parikh import PathQuery, Subgraph, exact_weight_path_exists, reachable_weight_vectors
from .zerosum import (
    BoundedObjectiveCombo,
    ReachTerm,
    SafetyTerm,
    ZeroSumView,
    solve_bounded_reach_conjunction,
    solve_bounded_safety_combo,
)


def collapse_environment(game: ReachabilityGame) -> ReachabilityGame:
    arena = game.arena
    if all(o in (0, 1) for o in arena.owner):
        return game
    owner = tuple(0 if o == 0 else 1 for o in arena.owner)
    return ReachabilityGame(
        WeightedArena(arena.names, owner, arena.num_players, arena.edges),
        game.targets,
        game.initial,
    )


@dataclass(frozen=True)
class ParetoContext:
    game: ReachabilityGame
    bound: int

    @classmethod
    def for_threshold(cls, game: ReachabilityGame, c: int = 0, above: bool = False) -> "ParetoContext":
        merged = collapse_environment(game)
        arena = merged.arena
        t = arena.num_players - 1
        span = (t + 2) * arena.vertex_count
        bound = (c + span) * arena.max_weight if above else span * arena.max_weight
        return cls(merged, bound)


@dataclass(frozen=True)
class Deviation:
    branch_index: int
    source: int
    target: int
    visit_class: FrozenSet[int]
    # q_i for every environment player whose target is not visited yet
    carried: Tuple[Tuple[int, int], ...]


def is_pareto_optimal(ctx: ParetoContext, p: CostVector) -> bool:
    game = ctx.game
    arena = game.arena
    for v in arena.owned_by(0):
        if len(arena.successors(v)) > 1:
            raise PreconditionError(
                f"player 0 still chooses at {arena.names[v]}; fix the strategy first"
            )
    env = list(game.env_players)
    if not env:
        return True
    view = ZeroSumView(arena, 1)
    for j in env:
        if p[j - 1] == 0:
            continue
        terms: List[ReachTerm] = []
        for i in env:
            if i != j and p[i - 1] is not TOP:
                terms.append(ReachTerm(game.targets[i], p[i - 1] + 1, i))
        terms.append(ReachTerm(game.targets[j], p[j - 1], j))
        better, _ = solve_bounded_reach_conjunction(view, terms, game.initial)
        if better:
            return False
    return True


def earliest_deviations(game: ReachabilityGame, pi: Lasso) -> List[Deviation]:
    """First deviation of every (vertex, visited environment targets) class along pi."""
    arena = game.arena
    env = list(game.env_players)
    acc = [0] * arena.num_players
    visited = set(game.players_at(pi.at(0))) - {0}
    seen: Set[Tuple[int, FrozenSet[int]]] = set()
    found: List[Deviation] = []
    for k in range(len(pi.prefix) + 2 * len(pi.cycle)):
        u, nxt = pi.at(k), pi.at(k + 1)
        if arena.owner[u] != 0:
            cls = frozenset(visited)
            for v in arena.successors(u):
                if v == nxt or (v, cls) in seen:
                    continue
                seen.add((v, cls))
                carried = tuple(
                    (i, acc[i] + arena.weight(u, v, i)) for i in env if i not in visited
                )
                found.append(Deviation(k, u, v, cls, carried))
        for i in env:
            acc[i] += arena.weight(u, nxt, i)
        visited |= game.players_at(nxt) - {0}
    return found


def _deviation_terms(game: ReachabilityGame, carried: Sequence[Tuple[int, int]], p: CostVector) -> Tuple[SafetyTerm, ...]:
    return tuple(SafetyTerm(game.targets[i], p[i - 1] - q, i) for i, q in carried)


def deviation_is_winning(
    game: ReachabilityGame,
    dev: Deviation,
    p: CostVector,
    cache: Optional[Dict[tuple, bool]] = None,
) -> bool:
    terms = _deviation_terms(game, dev.carried, p)
    key = (dev.target, tuple((t.weight_of, t.bound) for t in terms))
    if cache is not None and key in cache:
        return cache[key]
    view = ZeroSumView(game.arena, 0)
    won = solve_bounded_safety_combo(view, BoundedObjectiveCombo(terms), [dev.target])[dev.target]
    if cache is not None:
        cache[key] = won
    return won


def ensure_po(game: ReachabilityGame, pi: Lasso, p: CostVector) -> bool:
    merged = collapse_environment(game)
    check_lasso(merged, pi)
    if payoff(merged, pi) != p:
        raise PreconditionError(f"payoff {p.to_text()} does not belong to the lasso")
    cache: Dict[tuple, bool] = {}
    return all(deviation_is_winning(merged, dev, p, cache) for dev in earliest_deviations(merged, pi))


# ---------------------------------------------------------------- marker plans


@dataclass(frozen=True)
class _Portion:
    source: int
    sink: int
    subgraph: Subgraph
    dims: Tuple[int, ...]
    caps: Tuple[int, ...]
    saturating: FrozenSet[int]
    vector: Tuple[int, ...]


@dataclass(frozen=True)
class _MarkerPlan:
    portions: Tuple[_Portion, ...]
    last: int
    anchor: int
    closing: Subgraph
    payoff: CostVector
    cost0: Cost


def _bfs_path(sub: Subgraph, a: int, b: int) -> Optional[List[int]]:
    parent: Dict[int, Optional[int]] = {a: None}
    queue = deque([a])
    while queue:
        v = queue.popleft()
        if v == b:
            path = []
            node: Optional[int] = v
            while node is not None:
                path.append(node)
                node = parent[node]
            return path[::-1]
        for s in sub.successors(v):
            if s not in parent:
                parent[s] = v
                queue.append(s)
    return None


def _loop_through(sub: Subgraph, anchor: int) -> Optional[List[int]]:
    best: Optional[List[int]] = None
    for s in sub.successors(anchor):
        path = _bfs_path(sub, s, anchor)
        if path is not None and (best is None or len(path) < len(best)):
            best = path
    if best is None:
        return None
    return [anchor] + best[:-1]


def _cycle_anchor(sub: Subgraph, start: int) -> Optional[int]:
    order = [start]
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        if _loop_through(sub, v) is not None:
            return v
        for s in sub.successors(v):
            if s not in seen:
                seen.add(s)
                order.append(s)
                queue.append(s)
    return None


def _marker_plans(game: ReachabilityGame, c: int, above: bool, bound: int) -> Iterator[_MarkerPlan]:
    """Marker sequences (groups of first target visits) closed by a target-free cycle.

    above=True looks for cost_0 > c, otherwise cost_0 <= c.
    """
    arena = game.arena
    players = list(range(arena.num_players))
    seen: Set[tuple] = set()

    def walk(u: int, visited: FrozenSet[int], acc: Dict[int, int], costs: Dict[int, int], portions: Tuple[_Portion, ...]) -> Iterator[_MarkerPlan]:
        key = (u, visited, tuple(sorted(acc.items())), tuple(sorted(costs.items())))
        if key in seen:
            return
        seen.add(key)
        unvisited = [i for i in players if i not in visited]
        forbidden = frozenset(v for i in unvisited for v in game.targets[i])

        if above or 0 in visited:
            closing = Subgraph.induced(arena, [v for v in arena.vertices if v not in forbidden])
            anchor = _cycle_anchor(closing, u)
            if anchor is not None:
                p = CostVector(tuple(costs.get(i, TOP) for i in players[1:]))
                yield _MarkerPlan(portions, u, anchor, closing, p, costs.get(0, TOP))
        if not forbidden:
            return

        dims = tuple(unvisited)
        caps: List[int] = []
        saturating: Set[int] = set()
        for j, i in enumerate(dims):
            if i == 0:
                caps.append((c + 1 if above else c) - acc[0])
                if above:
                    saturating.add(j)
            else:
                caps.append(bound - acc[i])
        portion_graph = Subgraph.induced(arena, arena.vertices, stop_at=forbidden)
        vectors = reachable_weight_vectors(arena, portion_graph, u, dims, tuple(caps), frozenset(saturating))
        for x in sorted(forbidden):
            group = game.players_at(x) - visited
            for r in sorted(vectors[x]):
                next_acc = dict(acc)
                next_costs = dict(costs)
                ok = True
                for j, i in enumerate(dims):
                    total = acc[i] + r[j]
                    if i in group:
                        if i == 0 and above and total <= c:
                            ok = False
                            break
                        next_costs[i] = total
                        del next_acc[i]
                    else:
                        next_acc[i] = total
                if not ok:
                    continue
                step = _Portion(u, x, portion_graph, dims, tuple(caps), frozenset(saturating), r)
                yield from walk(x, visited | group, next_acc, next_costs, portions + (step,))

    start = game.initial
    visited0 = game.players_at(start)
    if 0 in visited0 and above:
        return
    yield from walk(
        start,
        visited0,
        {i: 0 for i in players if i not in visited0},
        {i: 0 for i in visited0},
        (),
    )


def _plan_lasso(game: ReachabilityGame, plan: _MarkerPlan) -> Lasso:
    arena = game.arena
    history = [game.initial]
    for step in plan.portions:
        ok, path = exact_weight_path_exists(
            PathQuery(arena, step.subgraph, step.source, step.sink, step.dims, step.vector, step.caps, step.saturating)
        )
        assert ok and path is not None, "marker portion lost its witness path"
        history.extend(path[1:])
    lead = _bfs_path(plan.closing, plan.last, plan.anchor)
    loop = _loop_through(plan.closing, plan.anchor)
    assert lead is not None and loop is not None
    history.extend(lead[1:])
    return Lasso(tuple(history[:-1]), tuple(loop))


def _candidate_payoffs(game: ReachabilityGame, c: int, above: bool, bound: int) -> List[CostVector]:
    found = {plan.payoff for plan in _marker_plans(game, c, above, bound)}
    return sorted(found, key=CostVector.sort_key)


# ---------------------------------------------------------------- PO-consistent lasso search


def _po_lasso_for_payoff(
    game: ReachabilityGame,
    p: CostVector,
    c: int,
    above: bool,
    cache: Dict[tuple, bool],
) -> Optional[Lasso]:
    """A lasso with payoff p, cost_0 on the requested side of c, whose every deviation is answered."""
    arena = game.arena
    n_players = arena.num_players
    env = list(game.env_players)

    def tracked(i: int) -> bool:
        return i == 0 or p[i - 1] is not TOP

    def enter(visited: FrozenSet[int], acc: Tuple[int, ...], v: int) -> Optional[Tuple[FrozenSet[int], Tuple[int, ...]]]:
        values = list(acc)
        newly = game.players_at(v) - visited
        for i in newly:
            if i == 0:
                if above and values[0] <= c:
                    return None
            elif p[i - 1] is TOP or values[i] != p[i - 1]:
                return None
            values[i] = 0
        return visited | newly, tuple(values)

    def step(state, v: int):
        u, visited, acc = state
        values = list(acc)
        for i in range(n_players):
            if i in visited or not tracked(i):
                continue
            x = acc[i] + arena.weight(u, v, i)
            if i == 0:
                if above:
                    x = min(x, c + 1)
                elif x > c:
                    return None
            elif x > p[i - 1]:
                return None
            values[i] = x
        entered = enter(visited, tuple(values), v)
        if entered is None:
            return None
        return (v, entered[0], entered[1])

    def losing_moves(state) -> Set[int]:
        u, visited, acc = state
        if arena.owner[u] == 0:
            return set()
        bad = set()
        for x in arena.successors(u):
            carried = tuple(
                (i, acc[i] + arena.weight(u, x, i) if p[i - 1] is not TOP else 0)
                for i in env
                if i not in visited
            )
            dev = Deviation(-1, u, x, visited - {0}, carried)
            if not deviation_is_winning(game, dev, p, cache):
                bad.add(x)
        return bad

    def expand(state):
        bad = losing_moves(state)
        for v in arena.successors(state[0]):
            if bad - {v}:
                continue
            child = step(state, v)
            if child is not None:
                yield child

    def settled(state) -> bool:
        _, visited, _ = state
        if not above and 0 not in visited:
            return False
        return all(i in visited for i in env if p[i - 1] is not TOP)

    zero = tuple(0 for _ in range(n_players))
    entered = enter(frozenset(), zero, game.initial)
    if entered is None:
        return None
    return settled_lasso((game.initial, entered[0], entered[1]), expand, settled)


def solve_cps(game: ReachabilityGame, c: Cost) -> Tuple[bool, Optional[Tuple[Lasso, CostVector]]]:
    if c is TOP or not isinstance(c, int) or c < 0:
        raise InvalidInputError("CPS needs a finite threshold")
    ctx = ParetoContext.for_threshold(game, c, above=False)
    cache: Dict[tuple, bool] = {}
    for p in _candidate_payoffs(ctx.game, c, False, ctx.bound):
        found = _po_lasso_for_payoff(ctx.game, p, c, False, cache)
        if found is not None:
            return True, (found, p)
    return False, None


def verify_ncpv(product: ProductGame, c: int) -> Tuple[bool, Optional[Lasso]]:
    if not product.machine.is_deterministic:
        raise PreconditionError("machine is nondeterministic; use verify_uncpv")
    ctx = ParetoContext.for_threshold(product.game, c, above=True)
    checked: Dict[CostVector, bool] = {}
    for plan in _marker_plans(ctx.game, c, True, ctx.bound):
        if plan.payoff not in checked:
            checked[plan.payoff] = is_pareto_optimal(ctx, plan.payoff)
        if checked[plan.payoff]:
            return False, _plan_lasso(ctx.game, plan)
    return True, None


def verify_uncpv(product: ProductGame, c: int) -> Tuple[bool, Optional[Lasso]]:
    ctx = ParetoContext.for_threshold(product.game, c, above=True)
    cache: Dict[tuple, bool] = {}
    for p in _candidate_payoffs(ctx.game, c, True, ctx.bound):
        found = _po_lasso_for_payoff(ctx.game, p, c, True, cache)
        if found is not None:
            return False, found
    return True, None
