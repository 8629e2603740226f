"""
暴力参照实现: 在小规模实例上枚举无记忆策略组合与有界长度的套索, 给出与求解器独立的判定。

预算超限一律抛 BudgetExceededError, 不做静默截断。
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .arena import (
    TOP,
    Cost,
    CostVector,
    Lasso,
    ReachabilityGame,
    cost_of_lasso,
    payoff,
    restrict_choices,
)
from .errors import BudgetExceededError, InconclusiveVerdictError, InvalidInputError, PreconditionError
from .mealy import MealyMachine, product_game
from .workers import parallel_map
from .zerosum import ZeroSumView

PROBLEMS = ("CNS", "CPS", "NCNV", "NCPV", "UNCNV", "UNCPV", "NCNS", "NCNS_BOUNDED")


@dataclass(frozen=True)
class OracleBudget:
    max_lasso_length: int = 12
    max_horizon: int = 24
    max_profiles: int = 200000
    # 2 adds the two-state machine cross-check to strategy quantifiers
    memory: int = 1

    def __post_init__(self) -> None:
        for name in ("max_lasso_length", "max_horizon", "max_profiles", "memory"):
            if getattr(self, name) <= 0:
                raise InvalidInputError(f"oracle budget {name} must be positive")
        if self.memory > 2:
            raise InvalidInputError("oracle memory cross-check supports at most two states")


@dataclass(frozen=True)
class OracleInstance:
    game: ReachabilityGame
    c: int
    machine: Optional[MealyMachine] = None
    # satisficing bounds d_1..d_t for NCNS_BOUNDED
    bounds: Tuple[int, ...] = ()


def _count(options: Iterable[Sequence[int]]) -> int:
    total = 1
    for opts in options:
        total *= len(opts)
    return total


def _walk_cost(succ: Mapping[int, int], weights, start: int, target, player: int, n: int) -> Cost:
    acc = 0
    v = start
    for _ in range(n + 1):
        if v in target:
            return acc
        nxt = succ[v]
        acc += weights(v, nxt, player)
        v = nxt
    return TOP


def oracle_zero_sum_value(
    view: ZeroSumView,
    target: Iterable[int],
    weight_of: int,
    budget: OracleBudget,
) -> Dict[int, Cost]:
    arena = view.arena
    goal = frozenset(target)
    mine = [v for v in arena.vertices if view.is_protagonist(v)]
    theirs = [v for v in arena.vertices if not view.is_protagonist(v)]
    if _count(arena.successors(v) for v in arena.vertices) > budget.max_profiles:
        raise BudgetExceededError(f"more than {budget.max_profiles} memoryless profiles")
    n = arena.vertex_count
    best: Dict[int, Cost] = {v: TOP for v in arena.vertices}
    for pick in itertools.product(*(arena.successors(v) for v in mine)):
        worst: Dict[int, Cost] = {v: 0 for v in arena.vertices}
        for answer in itertools.product(*(arena.successors(v) for v in theirs)):
            succ = dict(zip(mine, pick))
            succ.update(zip(theirs, answer))
            for v in arena.vertices:
                cost = _walk_cost(succ, arena.weight, v, goal, weight_of, n)
                if cost > worst[v]:
                    worst[v] = cost
        for v in arena.vertices:
            if worst[v] < best[v]:
                best[v] = worst[v]
    return best


def enumerate_lassos(
    game: ReachabilityGame,
    max_length: int,
    budget: OracleBudget,
    sigma0: Optional[Mapping[int, int]] = None,
) -> List[Lasso]:
    """Every lasso from the initial vertex with |mu nu| <= max_length, consistent with sigma0."""
    arena = game.arena
    found: Set[Lasso] = set()
    explored = 0

    def moves(v: int) -> Sequence[int]:
        if sigma0 is not None and arena.owner[v] == 0 and v in sigma0:
            return (sigma0[v],)
        return arena.successors(v)

    stack: List[Tuple[int, ...]] = [(game.initial,)]
    while stack:
        path = stack.pop()
        explored += 1
        if explored > budget.max_profiles:
            raise BudgetExceededError(f"more than {budget.max_profiles} histories enumerated")
        last = path[-1]
        for s in moves(last):
            for j, v in enumerate(path):
                if v == s:
                    found.add(Lasso(path[:j], path[j:]))
            if len(path) < max_length:
                stack.append(path + (s,))
    return sorted(found, key=Lasso.sort_key)


def _values(game: ReachabilityGame, budget: OracleBudget) -> Dict[int, Dict[int, Cost]]:
    return {
        i: oracle_zero_sum_value(ZeroSumView(game.arena, i), game.targets[i], i, budget)
        for i in game.env_players
    }


def _no_profitable_deviation(
    game: ReachabilityGame,
    pi: Lasso,
    values: Mapping[int, Mapping[int, Cost]],
    budget: OracleBudget,
    satisficing: Optional[Sequence[int]] = None,
) -> bool:
    arena = game.arena
    horizon = len(pi.prefix) + 2 * len(pi.cycle)
    if horizon > budget.max_horizon:
        raise BudgetExceededError(f"deviation horizon {horizon} exceeds {budget.max_horizon}")
    costs = cost_of_lasso(game, pi)
    acc = [0] * arena.num_players
    visited: Set[int] = set()
    for n in range(horizon):
        u, nxt = pi.at(n), pi.at(n + 1)
        visited |= game.players_at(u)
        i = arena.owner[u]
        if i != 0 and i not in visited:
            for v in arena.successors(u):
                if v == nxt:
                    continue
                punished = acc[i] + arena.weight(u, v, i) + values[i][v]
                if satisficing is None:
                    if punished < costs[i]:
                        return False
                elif costs[i] > satisficing[i - 1] and punished <= satisficing[i - 1]:
                    return False
        for k in range(arena.num_players):
            acc[k] += arena.weight(u, nxt, k)
    return True


def product_budget(budget: OracleBudget) -> OracleBudget:
    """Product plays pass through an intermediate vertex per move."""
    return dataclasses.replace(
        budget,
        max_lasso_length=2 * budget.max_lasso_length,
        max_horizon=2 * budget.max_horizon,
    )


def oracle_nash_outcomes(
    game: ReachabilityGame,
    sigma0: Optional[Mapping[int, int]],
    budget: OracleBudget,
) -> Set[Lasso]:
    """Bounded lassos that are outcomes of a (sigma0-fixed) NE.

    Without sigma0 player 0 follows the lasso and joins the punishing coalition after a deviation.
    """
    base = restrict_choices(game, sigma0) if sigma0 is not None else game
    values = _values(base, budget)
    return {
        pi
        for pi in enumerate_lassos(base, budget.max_lasso_length, budget)
        if _no_profitable_deviation(base, pi, values, budget)
    }


def oracle_memoryless_nash_outcomes(
    game: ReachabilityGame,
    sigma0: Mapping[int, int],
    budget: OracleBudget,
) -> Set[Lasso]:
    """Outcomes of NE among memoryless environment profiles, deviations memoryless too."""
    base = restrict_choices(game, sigma0)
    arena = base.arena
    env_vertices = [v for v in arena.vertices if arena.owner[v] != 0]
    if _count(arena.successors(v) for v in env_vertices) > budget.max_profiles:
        raise BudgetExceededError(f"more than {budget.max_profiles} environment profiles")

    def outcome(choice: Mapping[int, int]) -> Lasso:
        succ = dict(choice)
        for v in arena.vertices:
            if arena.owner[v] == 0:
                succ[v] = arena.successors(v)[0]
        seq = [base.initial]
        where = {base.initial: 0}
        while True:
            nxt = succ[seq[-1]]
            if nxt in where:
                return Lasso(tuple(seq[: where[nxt]]), tuple(seq[where[nxt]:]))
            where[nxt] = len(seq)
            seq.append(nxt)

    outcomes: Set[Lasso] = set()
    for pick in itertools.product(*(arena.successors(v) for v in env_vertices)):
        profile = dict(zip(env_vertices, pick))
        pi = outcome(profile)
        costs = cost_of_lasso(base, pi)
        stable = True
        for i in base.env_players:
            mine = [v for v in env_vertices if arena.owner[v] == i]
            for alt in itertools.product(*(arena.successors(v) for v in mine)):
                changed = dict(profile)
                changed.update(zip(mine, alt))
                if cost_of_lasso(base, outcome(changed))[i] < costs[i]:
                    stable = False
                    break
            if not stable:
                break
        if stable:
            outcomes.add(pi)
    return outcomes


def _minimal(payoffs: Iterable[CostVector]) -> Set[CostVector]:
    pool = set(payoffs)
    return {p for p in pool if not any(q.lt(p) for q in pool)}


def oracle_pareto_front(
    game: ReachabilityGame,
    sigma0: Optional[Mapping[int, int]],
    budget: OracleBudget,
) -> Set[CostVector]:
    base = restrict_choices(game, sigma0) if sigma0 is not None else game
    lassos = enumerate_lassos(base, budget.max_lasso_length, budget)
    return _minimal(payoff(base, pi) for pi in lassos)


# ---------------------------------------------------------------- oracle_decide

Task = Tuple[str, ReachabilityGame, int, Tuple[int, ...], OracleBudget]


def _judge_fixed(task: Task) -> bool:
    """Verdict for one player-0 strategy already baked into the game."""
    kind, game, c, bounds, budget = task
    lassos = enumerate_lassos(game, budget.max_lasso_length, budget)
    if kind in ("cps", "ncp"):
        front = _minimal(payoff(game, pi) for pi in lassos)
        po = [pi for pi in lassos if payoff(game, pi) in front]
        if kind == "cps":
            return any(cost_of_lasso(game, pi)[0] <= c for pi in po)
        return all(cost_of_lasso(game, pi)[0] <= c for pi in po)
    values = _values(game, budget)
    satisficing = bounds if kind == "ncn_bounded" else None
    return all(
        cost_of_lasso(game, pi)[0] <= c
        for pi in lassos
        if _no_profitable_deviation(game, pi, values, budget, satisficing)
    )


def _memoryless_strategies(game: ReachabilityGame, budget: OracleBudget) -> List[ReachabilityGame]:
    arena = game.arena
    mine = arena.owned_by(0)
    if _count(arena.successors(v) for v in mine) > budget.max_profiles:
        raise BudgetExceededError(f"more than {budget.max_profiles} player-0 strategies")
    return [
        restrict_choices(game, dict(zip(mine, pick)))
        for pick in itertools.product(*(arena.successors(v) for v in mine))
    ]


def _two_state_strategies(game: ReachabilityGame, budget: OracleBudget) -> List[ReachabilityGame]:
    arena = game.arena
    mine = arena.owned_by(0)
    slots = [(m, v) for m in (0, 1) for v in arena.vertices]
    moves = [(m, v) for m in (0, 1) for v in mine]
    total = 2 ** len(slots) * _count(arena.successors(v) for _, v in moves)
    if total > budget.max_profiles:
        raise BudgetExceededError(f"{total} two-state machines exceed {budget.max_profiles}")
    games = []
    for update in itertools.product((0, 1), repeat=len(slots)):
        for pick in itertools.product(*(arena.successors(v) for _, v in moves)):
            machine = MealyMachine(
                ("m0", "m1"),
                0,
                {slot: frozenset({m}) for slot, m in zip(slots, update)},
                {slot: frozenset({s}) for slot, s in zip(moves, pick)},
            )
            games.append(product_game(game, machine).game)
    return games


def _exists_strategy(kind: str, inst: OracleInstance, budget: OracleBudget, jobs: int) -> bool:
    tasks = [(kind, g, inst.c, inst.bounds, budget) for g in _memoryless_strategies(inst.game, budget)]
    verdict = any(parallel_map(_judge_fixed, tasks, jobs))
    if budget.memory >= 2:
        wide = product_budget(budget)
        tasks = [(kind, g, inst.c, inst.bounds, wide) for g in _two_state_strategies(inst.game, budget)]
        cross = any(parallel_map(_judge_fixed, tasks, jobs))
        if cross != verdict:
            raise InconclusiveVerdictError(
                f"{kind}: memoryless strategies say {verdict}, two-state machines say {cross}"
            )
    return verdict


def oracle_decide(problem: str, inst: OracleInstance, budget: OracleBudget, jobs: int = 1) -> bool:
    problem = problem.upper()
    if problem not in PROBLEMS:
        raise InvalidInputError(f"unknown problem {problem!r}; expected one of {', '.join(PROBLEMS)}")
    game = inst.game

    if problem == "CNS":
        return any(cost_of_lasso(game, pi)[0] <= inst.c for pi in oracle_nash_outcomes(game, None, budget))
    if problem == "CPS":
        return _exists_strategy("cps", inst, budget, jobs)
    if problem == "NCNS":
        return _exists_strategy("ncn", inst, budget, jobs)
    if problem == "NCNS_BOUNDED":
        if len(inst.bounds) != game.num_players - 1:
            raise InvalidInputError("NCNS_BOUNDED needs one satisficing bound per environment player")
        return _exists_strategy("ncn_bounded", inst, budget, jobs)

    if inst.machine is None:
        raise InvalidInputError(f"{problem} needs a Mealy machine")
    if problem in ("NCNV", "NCPV") and not inst.machine.is_deterministic:
        raise PreconditionError(f"{problem} needs a deterministic machine")
    product = product_game(game, inst.machine).game
    wide = product_budget(budget)
    if problem == "NCNV":
        return _judge_fixed(("ncn", product, inst.c, (), wide))
    if problem == "NCPV":
        return _judge_fixed(("ncp", product, inst.c, (), wide))
    if problem == "UNCNV":
        return all(cost_of_lasso(product, pi)[0] <= inst.c for pi in oracle_nash_outcomes(product, None, wide))
    # UNCPV: every machine-compatible strategy, as a memoryless choice on the product
    tasks = [("ncp", g, inst.c, (), wide) for g in _memoryless_strategies(product, budget)]
    return all(parallel_map(_judge_fixed, tasks, jobs))
