"""
玩家 0 的 (非确定) Mealy 机, 以及博弈与 Mealy 机的乘积。

乘积顶点有两种形状: (v, m) 与中间顶点 (v, v', m); 中间顶点归玩家 0 所有,
第二跳权重为 0, 且不属于任何目标集合。
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .arena import Lasso, ReachabilityGame, WeightedArena
from .errors import InvalidInputError, ProductConstructionError


@dataclass(frozen=True)
class MealyMachine:
    states: Tuple[str, ...]
    initial: int
    update: Dict[Tuple[int, int], FrozenSet[int]]
    next_move: Dict[Tuple[int, int], FrozenSet[int]]

    def delta(self, m: int, v: int) -> FrozenSet[int]:
        return self.update.get((m, v), frozenset())

    def tau(self, m: int, v: int) -> FrozenSet[int]:
        return self.next_move.get((m, v), frozenset())

    @property
    def is_deterministic(self) -> bool:
        return all(len(s) == 1 for s in self.update.values()) and all(
            len(s) == 1 for s in self.next_move.values()
        )


def machine_violations(game: ReachabilityGame, machine: MealyMachine) -> List[str]:
    arena = game.arena
    problems: List[str] = []
    k = len(machine.states)
    if not 0 <= machine.initial < k:
        problems.append(f"initial state {machine.initial} is not declared")
    for m in range(k):
        for v in arena.vertices:
            image = machine.delta(m, v)
            if not image:
                problems.append(f"delta({machine.states[m]}, {arena.names[v]}) is empty")
            elif any(not 0 <= x < k for x in image):
                problems.append(f"delta({machine.states[m]}, {arena.names[v]}) names an undeclared state")
            if arena.owner[v] != 0:
                continue
            moves = machine.tau(m, v)
            if not moves:
                problems.append(f"tau({machine.states[m]}, {arena.names[v]}) is empty")
            for s in sorted(moves):
                if not arena.has_edge(v, s):
                    target = arena.names[s] if 0 <= s < arena.vertex_count else str(s)
                    problems.append(
                        f"tau({machine.states[m]}, {arena.names[v]}) proposes {target}, not a successor"
                    )
    return problems


def _one_state(game: ReachabilityGame, moves: Mapping[int, Iterable[int]]) -> MealyMachine:
    arena = game.arena
    update = {(0, v): frozenset({0}) for v in arena.vertices}
    next_move = {(0, v): frozenset(moves[v]) for v in arena.owned_by(0) if v in moves}
    return MealyMachine(("m0",), 0, update, next_move)


def memoryless_machine(game: ReachabilityGame, choice: Mapping[int, int]) -> MealyMachine:
    arena = game.arena
    for v in arena.owned_by(0):
        if v not in choice:
            raise InvalidInputError(f"no choice for player-0 vertex {arena.names[v]}")
        if not arena.has_edge(v, choice[v]):
            raise InvalidInputError(
                f"choice {arena.names[v]}->{arena.names[choice[v]]} is not an edge"
            )
    return _one_state(game, {v: (s,) for v, s in choice.items()})


def machine_from_choices(game: ReachabilityGame, choices: Mapping[int, Iterable[int]]) -> MealyMachine:
    machine = _one_state(game, choices)
    problems = machine_violations(game, machine)
    if problems:
        raise InvalidInputError("; ".join(problems))
    return machine


def full_machine(game: ReachabilityGame) -> MealyMachine:
    arena = game.arena
    return _one_state(game, {v: arena.successors(v) for v in arena.owned_by(0)})


@dataclass(frozen=True)
class ProductGame:
    game: ReachabilityGame
    base: ReachabilityGame
    machine: MealyMachine
    # (v, v' or None, m) for every product vertex
    origin: Tuple[Tuple[int, Optional[int], int], ...]

    def back(self, x: int) -> int:
        return self.origin[x][0]

    def is_intermediate(self, x: int) -> bool:
        return self.origin[x][1] is not None

    def player0_choiceless(self) -> bool:
        arena = self.game.arena
        return all(len(arena.successors(x)) <= 1 for x in arena.owned_by(0))

    def project(self, pi: Lasso) -> Lasso:
        prefix = tuple(self.back(x) for x in pi.prefix if not self.is_intermediate(x))
        cycle = tuple(self.back(x) for x in pi.cycle if not self.is_intermediate(x))
        return Lasso(prefix, cycle)


def product_game(game: ReachabilityGame, machine: MealyMachine) -> ProductGame:
    arena = game.arena
    for m in range(len(machine.states)):
        for v in arena.owned_by(0):
            for s in sorted(machine.tau(m, v)):
                if not arena.has_edge(v, s):
                    raise ProductConstructionError(
                        f"tau({machine.states[m]}, {arena.names[v]}) proposes "
                        f"{arena.names[s] if 0 <= s < arena.vertex_count else s}: not a successor"
                    )
    problems = machine_violations(game, machine)
    if problems:
        raise ProductConstructionError("; ".join(problems))

    zero = tuple(0 for _ in range(arena.num_players))
    ids: Dict[Tuple[int, Optional[int], int], int] = {}
    order: List[Tuple[int, Optional[int], int]] = []
    edges: List[Tuple[int, int, Sequence[int]]] = []

    def intern(key: Tuple[int, Optional[int], int]) -> int:
        if key not in ids:
            ids[key] = len(order)
            order.append(key)
            queue.append(key)
        return ids[key]

    queue: deque = deque()
    intern((game.initial, None, machine.initial))
    while queue:
        key = queue.popleft()
        v, v2, m = key
        here = ids[key]
        if v2 is None:
            allowed = machine.tau(m, v) if arena.owner[v] == 0 else arena.successors(v)
            for s in sorted(allowed):
                edges.append((here, intern((v, s, m)), arena.weight_vector(v, s)))
        else:
            for m2 in sorted(machine.delta(m, v)):
                edges.append((here, intern((v2, None, m2)), zero))

    names = []
    owner = []
    for v, v2, m in order:
        mname = machine.states[m]
        if v2 is None:
            names.append(f"{arena.names[v]}|{mname}")
            owner.append(arena.owner[v])
        else:
            names.append(f"{arena.names[v]}>{arena.names[v2]}|{mname}")
            owner.append(0)
    product_arena = WeightedArena.build(names, owner, arena.num_players, edges)
    targets = tuple(
        frozenset(ids[key] for key in order if key[1] is None and key[0] in t) for t in game.targets
    )
    return ProductGame(
        ReachabilityGame(product_arena, targets, 0),
        game,
        machine,
        tuple(order),
    )
