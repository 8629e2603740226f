"""
两人零和引擎: 值迭代 (最小代价可达)、吸引子、有界可达合取 (单人) 与有界安全组合 (递归 DFS)。

protagonist 一方为 Eve, 其余所有玩家合并为 Adam。
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .arena import TOP, Cost, Lasso, WeightedArena, cap_cost, close_lasso, shrink_lasso
from .errors import InvalidInputError, PreconditionError


@dataclass(frozen=True)
class ZeroSumView:
    arena: WeightedArena
    protagonist: int

    def __post_init__(self) -> None:
        if not 0 <= self.protagonist < self.arena.num_players:
            raise InvalidInputError(f"protagonist {self.protagonist} is not a declared player")

    def is_protagonist(self, v: int) -> bool:
        return self.arena.owner[v] == self.protagonist


@dataclass(frozen=True)
class ReachTerm:
    """cost (measured with weight_of) must stay strictly below bound; TOP means just visit."""

    target: FrozenSet[int]
    bound: Cost
    weight_of: int


@dataclass(frozen=True)
class SafetyTerm:
    target: FrozenSet[int]
    bound: Cost
    weight_of: int


@dataclass(frozen=True)
class BoundedObjectiveCombo:
    """Omega(1) = all cost_i >= d_i,  Omega(2) = some cost_i > d_i.

    d_i = TOP 的项只出现在 Omega(1) 中: 代价不可能严格大于 TOP。
    """

    terms: Tuple[SafetyTerm, ...]

    @property
    def strict_terms(self) -> List[Tuple[FrozenSet[int], Cost]]:
        return [(t.target, t.bound) for t in self.terms]

    @property
    def relaxed_terms(self) -> List[Tuple[FrozenSet[int], Cost]]:
        return [(t.target, t.bound + 1) for t in self.terms if t.bound is not TOP]


def min_cost_reach_values(view: ZeroSumView, target: Iterable[int], weight_of: int) -> List[Cost]:
    arena = view.arena
    goal = frozenset(target)
    n = arena.vertex_count
    limit = n * arena.max_weight
    values: List[Cost] = [0 if v in goal else TOP for v in arena.vertices]
    rounds = 0
    while True:
        rounds += 1
        assert rounds <= n + 1, "value iteration did not stabilise"
        fresh: List[Cost] = []
        for v in arena.vertices:
            if v in goal:
                fresh.append(0)
                continue
            options = [arena.weight(v, s, weight_of) + values[s] for s in arena.successors(v)]
            best = min(options) if view.is_protagonist(v) else max(options)
            fresh.append(cap_cost(best, limit))
        if fresh == values:
            return values
        values = fresh


def attractor(view: ZeroSumView, target: Iterable[int]) -> FrozenSet[int]:
    arena = view.arena
    won = set(target)
    missing = {v: len(arena.successors(v)) for v in arena.vertices}
    queue = deque(won)
    while queue:
        v = queue.popleft()
        for u in arena.predecessors(v):
            if u in won:
                continue
            if view.is_protagonist(u):
                won.add(u)
                queue.append(u)
            else:
                missing[u] -= 1
                if missing[u] == 0:
                    won.add(u)
                    queue.append(u)
    return frozenset(won)


def solve_bounded_reach_conjunction(
    view: ZeroSumView,
    terms: Sequence[ReachTerm],
    start: int,
) -> Tuple[bool, Optional[Lasso]]:
    """Is there a play from start with cost_i < d_i for every term?  Adam must not choose."""
    arena = view.arena
    for v in arena.vertices:
        if not view.is_protagonist(v) and len(arena.successors(v)) > 1:
            raise PreconditionError(
                f"vertex {arena.names[v]} gives the coalition a choice; only the protagonist may play"
            )
    k = len(terms)
    if any(t.bound is not TOP and t.bound <= 0 for t in terms):
        return False, None

    full = (1 << k) - 1
    mask0 = 0
    for i, t in enumerate(terms):
        if start in t.target:
            mask0 |= 1 << i
    zero = tuple(0 for _ in range(k))
    root = (start, mask0, zero)
    parent: Dict[Tuple[int, int, Tuple[int, ...]], Optional[Tuple[int, int, Tuple[int, ...]]]] = {root: None}
    queue = deque([root])
    goal = root if mask0 == full else None
    while queue and goal is None:
        state = queue.popleft()
        v, mask, acc = state
        for s in arena.successors(v):
            nxt_acc = list(acc)
            nxt_mask = mask
            dead = False
            for i, t in enumerate(terms):
                if mask >> i & 1:
                    continue
                if t.bound is not TOP:
                    nxt_acc[i] = acc[i] + arena.weight(v, s, t.weight_of)
                    if nxt_acc[i] >= t.bound:
                        dead = True
                        break
                if s in t.target:
                    nxt_mask |= 1 << i
                    nxt_acc[i] = 0
            if dead:
                continue
            child = (s, nxt_mask, tuple(nxt_acc))
            if child in parent:
                continue
            parent[child] = state
            if nxt_mask == full:
                goal = child
                break
            queue.append(child)
    if goal is None:
        return False, None

    history: List[int] = []
    node: Optional[Tuple[int, int, Tuple[int, ...]]] = goal
    while node is not None:
        history.append(node[0])
        node = parent[node]
    history.reverse()
    witness = close_lasso(arena, history)
    return True, shrink_lasso(arena, witness, [t.target for t in terms])


def solve_bounded_safety_combo(
    view: ZeroSumView,
    combo: BoundedObjectiveCombo,
    starts: Iterable[int],
    memoize: bool = False,
) -> Dict[int, bool]:
    arena = view.arena
    terms = combo.terms
    k = len(terms)
    depth_limit = k * arena.vertex_count + arena.vertex_count + 1
    memo: Optional[Dict[tuple, bool]] = {} if memoize else None

    def explore(
        v: int,
        acc: Tuple[int, ...],
        strict: Optional[FrozenSet[int]],
        relaxed: FrozenSet[int],
        unvisited: FrozenSet[int],
        branch: FrozenSet[int],
        depth: int,
    ) -> bool:
        assert depth <= depth_limit, "bounded-safety branch exceeded its length bound"
        # (a) weight already past d_i + 1 before T_i was seen
        for i in unvisited:
            bound = terms[i].bound
            if bound is not TOP and acc[i] >= bound + 1:
                return True
        entered = False
        for i in sorted(unvisited):
            if v not in terms[i].target:
                continue
            entered = True
            if acc[i] < terms[i].bound:
                strict = None
            elif strict is not None:
                strict = strict - {i}
            relaxed = relaxed - {i}
            unvisited = unvisited - {i}
        if strict is not None and not strict:
            return True
        if strict is None and not relaxed:
            return False
        # 重复只在两次新目标访问之间计算
        if entered:
            branch = frozenset()
        elif v in branch:
            return True

        key = None
        if memo is not None:
            capped = tuple(
                min(acc[i], terms[i].bound + 1) if terms[i].bound is not TOP else 0 for i in range(k)
            )
            key = (v, capped, strict, relaxed, unvisited, branch)
            if key in memo:
                return memo[key]

        branch = branch | {v}
        results = []
        for s in arena.successors(v):
            child = tuple(
                acc[i] + arena.weight(v, s, terms[i].weight_of) if i in unvisited else acc[i]
                for i in range(k)
            )
            won = explore(s, child, strict, relaxed, unvisited, branch, depth + 1)
            results.append(won)
            if won and view.is_protagonist(v):
                break
            if not won and not view.is_protagonist(v):
                break
        verdict = any(results) if view.is_protagonist(v) else all(results)
        if memo is not None:
            memo[key] = verdict
        return verdict

    everyone = frozenset(range(k))
    finite = frozenset(i for i in range(k) if terms[i].bound is not TOP)
    zero = tuple(0 for _ in range(k))
    return {s: explore(s, zero, everyone, finite, everyone, frozenset(), 1) for s in starts}
