#!/usr/bin/env python3
"""
测试 Mealy 机与乘积博弈
"""
import sys
from pathlib import Path

# 添加项目路径
sys.path.insert(0, str(Path(__file__).parent))

import pytest

from reach_runner.arena import Lasso
from reach_runner.catalog import (
    figure1_game,
    figure3_game,
    figure4_machine,
    random_game,
    random_machine,
    sigma0_machine,
    sigma_both_machine,
)
from reach_runner.errors import InvalidInputError, ProductConstructionError
from reach_runner.mealy import (
    MealyMachine,
    full_machine,
    machine_from_choices,
    machine_violations,
    memoryless_machine,
    product_game,
)


def test_memoryless_machine_needs_every_choice():
    game = figure1_game()
    with pytest.raises(InvalidInputError):
        memoryless_machine(game, {})
    machine = sigma0_machine(game)
    assert machine.is_deterministic
    assert machine_violations(game, machine) == []


def test_full_machine_is_nondeterministic():
    game = figure1_game()
    idx = game.arena.index
    machine = full_machine(game)
    assert not machine.is_deterministic
    assert machine.tau(0, idx("v1")) == frozenset({idx("v2"), idx("v3")})


def test_machine_from_choices_rejects_non_edges():
    game = figure1_game()
    idx = game.arena.index
    with pytest.raises(InvalidInputError):
        machine_from_choices(game, {idx("v1"): [idx("v4")], idx("v3"): [idx("v3")]})


def test_two_state_machine_is_well_formed():
    """两状态机: m0 在 v3 处可切换到 m1"""
    game = figure3_game()
    machine = figure4_machine(game)
    assert machine_violations(game, machine) == []
    assert not machine.is_deterministic
    assert machine.delta(0, game.arena.index("v3")) == frozenset({0, 1})


def test_product_of_sigma0():
    """乘积顶点: (v, m) 与中间顶点 (v, v', m)"""
    game = figure1_game()
    product = product_game(game, sigma0_machine(game))
    arena = product.game.arena
    assert arena.vertex_count == 12
    assert product.player0_choiceless()
    idx = arena.index
    mid = idx("v1>v2|m0")
    assert product.is_intermediate(mid)
    assert arena.owner[mid] == 0
    assert arena.weight_vector(idx("v1|m0"), mid) == (1, 1, 1)
    assert arena.weight_vector(mid, idx("v2|m0")) == (0, 0, 0)
    # 中间顶点不属于任何目标
    for t in product.game.targets:
        assert all(not product.is_intermediate(x) for x in t)


def test_product_projection():
    game = figure1_game()
    product = product_game(game, sigma0_machine(game))
    idx = product.game.arena.index
    pi = Lasso(
        tuple(idx(n) for n in ["v0|m0", "v0>v1|m0", "v1|m0", "v1>v2|m0", "v2|m0", "v2>v5|m0"]),
        (idx("v5|m0"), idx("v5>v5|m0")),
    )
    g = game.arena.index
    assert product.project(pi) == Lasso((g("v0"), g("v1"), g("v2")), (g("v5"),))


def test_product_keeps_player0_choices_of_nondeterministic_machine():
    game = figure1_game()
    product = product_game(game, sigma_both_machine(game))
    arena = product.game.arena
    assert not product.player0_choiceless()
    assert len(arena.successors(arena.index("v1|m0"))) == 2


def test_product_of_two_state_machine():
    game = figure3_game()
    product = product_game(game, figure4_machine(game))
    names = set(product.game.arena.names)
    assert "v1|m1" in names
    assert "v3|m1" not in names
    assert "v1>v2|m1" in names
    assert "v2>v2|m0" not in names


def test_product_rejects_bad_proposal():
    game = figure1_game()
    idx = game.arena.index
    bad = MealyMachine(
        ("m0",),
        0,
        {(0, v): frozenset({0}) for v in game.arena.vertices},
        {
            (0, idx("v1")): frozenset({idx("v4")}),
            (0, idx("v3")): frozenset({idx("v3")}),
            (0, idx("v4")): frozenset({idx("v4")}),
            (0, idx("v5")): frozenset({idx("v5")}),
        },
    )
    with pytest.raises(ProductConstructionError):
        product_game(game, bad)


@pytest.mark.parametrize("states,deterministic", [(1, True), (2, True), (2, False)])
def test_random_machine_is_well_formed(states, deterministic):
    game = random_game(7, vertices=5, players=3)
    machine = random_machine(game, 11, states, deterministic)
    assert machine_violations(game, machine) == []
    assert len(machine.states) == states
    if deterministic:
        assert machine.is_deterministic
    assert machine == random_machine(game, 11, states, deterministic)
    product_game(game, machine)
