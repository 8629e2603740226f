"""
内置示例博弈 (G1 / G2 / 三玩家竞技场与两状态 Mealy 机) 与随机小博弈生成。
"""

from __future__ import annotations

import random
from typing import Dict, List, Optional

from .arena import ReachabilityGame
from .mealy import MealyMachine, memoryless_machine

SQUARE = 1
DIAMOND = 2


def figure1_game() -> ReachabilityGame:
    """Player 0 owns the circles, square owns v0, diamond owns v2; every weight is 1."""
    ones = (1, 1, 1)
    return ReachabilityGame.from_names(
        3,
        [("v0", SQUARE), ("v1", 0), ("v2", DIAMOND), ("v3", 0), ("v4", 0), ("v5", 0)],
        [
            ("v0", "v1", ones),
            ("v0", "v2", ones),
            ("v1", "v3", ones),
            ("v1", "v2", ones),
            ("v2", "v4", ones),
            ("v2", "v5", ones),
            ("v3", "v3", ones),
            ("v4", "v4", ones),
            ("v5", "v5", ones),
        ],
        {0: ("v3", "v4"), SQUARE: ("v3", "v5"), DIAMOND: ("v1", "v4")},
        "v0",
    )


def sigma0_choice(game: ReachabilityGame) -> Dict[int, int]:
    """v1 -> v2, self-loops elsewhere."""
    return _choice(game, "v2")


def sigma0_prime_choice(game: ReachabilityGame) -> Dict[int, int]:
    """v1 -> v3."""
    return _choice(game, "v3")


def _choice(game: ReachabilityGame, at_v1: str) -> Dict[int, int]:
    idx = game.arena.index
    return {
        idx("v1"): idx(at_v1),
        idx("v3"): idx("v3"),
        idx("v4"): idx("v4"),
        idx("v5"): idx("v5"),
    }


def sigma0_machine(game: ReachabilityGame) -> MealyMachine:
    return memoryless_machine(game, sigma0_choice(game))


def sigma0_prime_machine(game: ReachabilityGame) -> MealyMachine:
    return memoryless_machine(game, sigma0_prime_choice(game))


def sigma_both_machine(game: ReachabilityGame) -> MealyMachine:
    """One memory state allowing both v1 -> v2 and v1 -> v3."""
    idx = game.arena.index
    update = {(0, v): frozenset({0}) for v in game.arena.vertices}
    next_move = {
        (0, idx("v1")): frozenset({idx("v2"), idx("v3")}),
        (0, idx("v3")): frozenset({idx("v3")}),
        (0, idx("v4")): frozenset({idx("v4")}),
        (0, idx("v5")): frozenset({idx("v5")}),
    }
    return MealyMachine(("m0",), 0, update, next_move)


def figure2_game() -> ReachabilityGame:
    """Player 1 may loop on v0 for any number of steps; player 0 pays 1 per step."""
    w = (1, 0)
    return ReachabilityGame.from_names(
        2,
        [("v0", 1), ("v1", 0)],
        [("v0", "v0", w), ("v0", "v1", w), ("v1", "v1", w)],
        {0: ("v1",), 1: ("v1",)},
        "v0",
    )


def figure3_game() -> ReachabilityGame:
    """Three-player arena used for the product example; weights 1, targets chosen here."""
    ones = (1, 1, 1)
    return ReachabilityGame.from_names(
        3,
        [("v0", DIAMOND), ("v1", 0), ("v2", 0), ("v3", SQUARE)],
        [
            ("v0", "v1", ones),
            ("v0", "v3", ones),
            ("v1", "v3", ones),
            ("v1", "v1", ones),
            ("v1", "v2", ones),
            ("v2", "v3", ones),
            ("v2", "v2", ones),
            ("v3", "v1", ones),
        ],
        {0: ("v2",), SQUARE: ("v3",), DIAMOND: ("v1",)},
        "v0",
    )


def figure4_machine(game: ReachabilityGame) -> MealyMachine:
    """
    m0 stays put and may switch to m1 once v3 is seen.
    In m0 player 0 plays v1 -> {v1, v3}, v2 -> v3; in m1 only v1 -> v2, v2 -> v2.
    """
    idx = game.arena.index
    v0, v1, v2, v3 = idx("v0"), idx("v1"), idx("v2"), idx("v3")
    update = {
        (0, v0): frozenset({0}),
        (0, v1): frozenset({0}),
        (0, v2): frozenset({0}),
        (0, v3): frozenset({0, 1}),
        (1, v0): frozenset({1}),
        (1, v1): frozenset({1}),
        (1, v2): frozenset({1}),
        (1, v3): frozenset({1}),
    }
    next_move = {
        (0, v1): frozenset({v1, v3}),
        (0, v2): frozenset({v3}),
        (1, v1): frozenset({v2}),
        (1, v2): frozenset({v2}),
    }
    return MealyMachine(("m0", "m1"), 0, update, next_move)


def random_game(
    seed: int,
    vertices: int = 5,
    players: int = 3,
    max_weight: int = 2,
    max_out: int = 2,
    target_density: float = 0.3,
    owners: Optional[List[int]] = None,
) -> ReachabilityGame:
    """Seeded small game: every vertex has 1..max_out successors, weights in 0..max_weight."""
    rng = random.Random(seed)
    names = [f"v{k}" for k in range(vertices)]
    if owners is None:
        owners = [rng.randrange(players) for _ in range(vertices)]
    edges = []
    for u in range(vertices):
        succ = rng.sample(range(vertices), rng.randint(1, min(max_out, vertices)))
        for v in sorted(succ):
            w = tuple(rng.randint(0, max_weight) for _ in range(players))
            edges.append((names[u], names[v], w))
    targets = {
        i: [n for n in names if rng.random() < target_density]
        for i in range(players)
    }
    return ReachabilityGame.from_names(
        players,
        list(zip(names, owners)),
        edges,
        targets,
        names[0],
    )


def random_machine(
    game: ReachabilityGame,
    seed: int,
    states: int = 1,
    deterministic: bool = True,
) -> MealyMachine:
    """Seeded player-0 machine; nondeterministic machines propose 1..all successors."""
    rng = random.Random(seed)
    arena = game.arena
    update = {
        (m, v): frozenset({rng.randrange(states)})
        for m in range(states)
        for v in arena.vertices
    }
    next_move = {}
    for m in range(states):
        for v in arena.owned_by(0):
            succ = list(arena.successors(v))
            if deterministic:
                next_move[(m, v)] = frozenset({rng.choice(succ)})
            else:
                next_move[(m, v)] = frozenset(rng.sample(succ, rng.randint(1, len(succ))))
    return MealyMachine(tuple(f"m{k}" for k in range(states)), 0, update, next_move)
