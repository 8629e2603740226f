"""
Nash 理性: Val* 表、Visit Val*-一致性, 以及 CNS / NCNV / UNCNV 的状态图搜索。

搜索状态 = (顶点, 已访问玩家集合, 每个未访问环境玩家剩余的代价预算, 玩家 0 的累计权重)。
预算来自沿途 Val* 有限的顶点: 玩家 i 必须在预算耗尽前到达 T_i。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple

from .arena import (
    TOP,
    Cost,
    Lasso,
    ReachabilityGame,
    check_lasso,
    settled_lasso,
    suffix_cost,
)
from .errors import InvalidInputError, PreconditionError
from .mealy import ProductGame
from .zerosum import ZeroSumView, min_cost_reach_values


@dataclass(frozen=True)
class ValTable:
    # None at player-0 vertices
    values: Tuple[Optional[Cost], ...]

    def __getitem__(self, v: int) -> Optional[Cost]:
        return self.values[v]


def compute_val_star(game: ReachabilityGame) -> ValTable:
    arena = game.arena
    per_player: Dict[int, List[Cost]] = {}
    for i in game.env_players:
        if arena.owned_by(i):
            per_player[i] = min_cost_reach_values(ZeroSumView(arena, i), game.targets[i], i)
    return ValTable(
        tuple(None if arena.owner[v] == 0 else per_player[arena.owner[v]][v] for v in arena.vertices)
    )


def visit_val_consistent(
    game: ReachabilityGame,
    table: ValTable,
    pi: Lasso,
    players: Iterable[int],
) -> bool:
    check_lasso(game, pi)
    checked = frozenset(players)
    if 0 in checked:
        raise InvalidInputError("player 0 has no Val* entry")
    owner = game.arena.owner
    visited: set = set()
    for n in range(len(pi.prefix) + 2 * len(pi.cycle)):
        v = pi.at(n)
        i = owner[v]
        if i in checked and i not in visited:
            if suffix_cost(game, pi, n, i) > table[v]:
                return False
        visited |= game.players_at(v)
    return True


def is_nash_outcome(game: ReachabilityGame, pi: Lasso) -> bool:
    return visit_val_consistent(game, compute_val_star(game), pi, game.env_players)


NashState = Tuple[int, FrozenSet[int], Tuple[Optional[int], ...], int]


def _consistent_lasso(game: ReachabilityGame, table: ValTable, c: int, above: bool) -> Optional[Lasso]:
    """Visit Val*-consistent lasso with cost_0 <= c (above=False) or cost_0 > c (above=True)."""
    arena = game.arena
    n_players = arena.num_players

    def enter(visited: FrozenSet[int], budgets: List[Optional[int]], acc0: int, v: int) -> Optional[NashState]:
        newly = game.players_at(v) - visited
        if 0 in newly and above and acc0 <= c:
            return None
        for i in newly:
            budgets[i] = None
        visited = visited | newly
        if 0 in visited:
            acc0 = 0
        i = arena.owner[v]
        if i != 0 and i not in visited and table[v] is not TOP:
            budgets[i] = table[v] if budgets[i] is None else min(budgets[i], table[v])
        return (v, visited, tuple(budgets), acc0)

    def expand(state: NashState) -> Iterator[NashState]:
        u, visited, budgets, acc0 = state
        for v in arena.successors(u):
            left = list(budgets)
            dead = False
            for i, b in enumerate(budgets):
                if b is None:
                    continue
                left[i] = b - arena.weight(u, v, i)
                if left[i] < 0:
                    dead = True
                    break
            if dead:
                continue
            acc = acc0
            if 0 not in visited:
                acc = acc0 + arena.weight(u, v, 0)
                if above:
                    acc = min(acc, c + 1)
                elif acc > c:
                    continue
            child = enter(visited, left, acc, v)
            if child is not None:
                yield child

    def settled(state: NashState) -> bool:
        _, visited, budgets, _ = state
        if not above and 0 not in visited:
            return False
        return all(b is None for b in budgets)

    root = enter(frozenset(), [None] * n_players, 0, game.initial)
    if root is None:
        return None
    return settled_lasso(root, expand, settled)


def _threshold(c: Cost) -> int:
    if c is TOP or not isinstance(c, int) or c < 0:
        raise InvalidInputError(f"threshold must be a natural number, got {c!r}")
    return c


def solve_cns(game: ReachabilityGame, c: Cost) -> Tuple[bool, Optional[Lasso]]:
    c = _threshold(c)
    found = _consistent_lasso(game, compute_val_star(game), c, above=False)
    return found is not None, found


def verify_ncnv(product: ProductGame, c: Cost) -> Tuple[bool, Optional[Lasso]]:
    if not product.machine.is_deterministic:
        raise PreconditionError("machine is nondeterministic; use verify_uncnv")
    return verify_uncnv(product, c)


def verify_uncnv(product: ProductGame, c: Cost) -> Tuple[bool, Optional[Lasso]]:
    c = _threshold(c)
    game = product.game
    found = _consistent_lasso(game, compute_val_star(game), c, above=True)
    return found is None, found
