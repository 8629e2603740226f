#!/usr/bin/env python3
"""
测试 Nash 理性: Val* 表、Visit Val*-一致性、CNS / NCNV / UNCNV
"""
import sys
from pathlib import Path

# 添加项目路径
sys.path.insert(0, str(Path(__file__).parent))

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reach_runner.arena import TOP, Lasso, cost_of_lasso, restrict_choices
from reach_runner.catalog import (
    figure1_game,
    random_game,
    random_machine,
    sigma0_machine,
    sigma0_prime_machine,
    sigma_both_machine,
)
from reach_runner.errors import InvalidInputError, PreconditionError
from reach_runner.mealy import product_game
from reach_runner.nash import (
    compute_val_star,
    is_nash_outcome,
    solve_cns,
    verify_ncnv,
    verify_uncnv,
    visit_val_consistent,
)
from reach_runner.oracle import (
    OracleBudget,
    OracleInstance,
    enumerate_lassos,
    oracle_decide,
    oracle_nash_outcomes,
)


def lasso(game, prefix, cycle):
    idx = game.arena.index
    return Lasso(tuple(idx(n) for n in prefix.split()), tuple(idx(n) for n in cycle.split()))


def test_val_star_table():
    game = figure1_game()
    table = compute_val_star(game)
    idx = game.arena.index
    assert table[idx("v0")] is TOP
    assert table[idx("v2")] == 1
    assert table[idx("v1")] is None


def test_nash_outcomes_of_figure1():
    """v0 v1 v2 (v5)^w: 菱形玩家已在 v1 访问目标, 无需再约束"""
    game = figure1_game()
    assert is_nash_outcome(game, lasso(game, "v0 v1 v2", "v5"))
    assert is_nash_outcome(game, lasso(game, "v0 v1", "v3"))
    assert not is_nash_outcome(game, lasso(game, "v0 v2", "v5"))


def test_player0_has_no_val_entry():
    game = figure1_game()
    with pytest.raises(InvalidInputError):
        visit_val_consistent(game, compute_val_star(game), lasso(game, "v0 v1", "v3"), [0])


@pytest.mark.parametrize("c,expected", [(3, True), (2, True), (1, False)])
def test_cns(c, expected):
    game = figure1_game()
    ok, pi = solve_cns(game, c)
    assert ok is expected
    if ok:
        assert is_nash_outcome(game, pi)
        assert cost_of_lasso(game, pi)[0] <= c
    else:
        assert pi is None


def test_cns_rejects_negative_threshold():
    with pytest.raises(InvalidInputError):
        solve_cns(figure1_game(), -1)


@pytest.mark.parametrize("c", [2, 3])
def test_ncnv_sigma0_has_unbounded_counterexample(c):
    """σ0 下 v0 v1 v2 (v5)^w 是 NE 结果, 玩家 0 的代价为 inf"""
    game = figure1_game()
    product = product_game(game, sigma0_machine(game))
    ok, found = verify_ncnv(product, c)
    assert not ok
    assert product.project(found) == lasso(game, "v0 v1 v2", "v5")
    assert cost_of_lasso(product.game, found)[0] is TOP
    assert is_nash_outcome(product.game, found)


def test_ncnv_sigma0_prime():
    game = figure1_game()
    product = product_game(game, sigma0_prime_machine(game))
    assert verify_ncnv(product, 2) == (True, None)
    ok, found = verify_ncnv(product, 1)
    assert not ok
    assert product.project(found) == lasso(game, "v0 v1", "v3")


def test_ncnv_needs_a_deterministic_machine():
    game = figure1_game()
    with pytest.raises(PreconditionError):
        verify_ncnv(product_game(game, sigma_both_machine(game)), 3)


def test_uncnv_with_both_choices():
    game = figure1_game()
    product = product_game(game, sigma_both_machine(game))
    ok, found = verify_uncnv(product, 3)
    assert not ok
    assert cost_of_lasso(product.game, found)[0] > 3


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(min_value=0, max_value=100000), c=st.integers(min_value=0, max_value=4))
def test_cns_agrees_with_oracle(seed, c):
    """随机小博弈上 CNS 与暴力参照一致"""
    game = random_game(seed, vertices=4, players=3)
    ok, _ = solve_cns(game, c)
    assert ok == oracle_decide("CNS", OracleInstance(game, c), OracleBudget())


@settings(max_examples=200, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=100000),
    machine_seed=st.integers(min_value=0, max_value=1000),
    states=st.integers(min_value=1, max_value=2),
    c=st.integers(min_value=0, max_value=4),
)
def test_ncnv_agrees_with_oracle(seed, machine_seed, states, c):
    """无记忆与两状态确定性 Mealy 机"""
    game = random_game(seed, vertices=4, players=3)
    machine = random_machine(game, machine_seed, states)
    ok, found = verify_ncnv(product_game(game, machine), c)
    assert ok == oracle_decide("NCNV", OracleInstance(game, c, machine), OracleBudget())
    assert ok == (found is None)


@settings(max_examples=200, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=100000),
    machine_seed=st.integers(min_value=0, max_value=1000),
    states=st.integers(min_value=1, max_value=2),
    c=st.integers(min_value=0, max_value=4),
)
def test_uncnv_agrees_with_oracle(seed, machine_seed, states, c):
    game = random_game(seed, vertices=4, players=3)
    machine = random_machine(game, machine_seed, states, deterministic=False)
    product = product_game(game, machine)
    ok, found = verify_uncnv(product, c)
    assert ok == oracle_decide("UNCNV", OracleInstance(game, c, machine), OracleBudget())
    if not ok:
        assert cost_of_lasso(product.game, found)[0] > c


@settings(max_examples=100, deadline=None)
@given(
    seed=st.integers(min_value=0, max_value=100000),
    picks=st.lists(st.integers(min_value=0, max_value=1), min_size=4, max_size=4),
)
def test_nash_outcomes_match_oracle(seed, picks):
    """固定无记忆 σ0 后, Visit Val*-一致的套索恰好是暴力枚举出的 NE 结果"""
    game = random_game(seed, vertices=4, players=3)
    arena = game.arena
    choice = {
        v: arena.successors(v)[picks[v] % len(arena.successors(v))]
        for v in arena.owned_by(0)
    }
    budget = OracleBudget()
    fixed = restrict_choices(game, choice)
    lassos = enumerate_lassos(fixed, budget.max_lasso_length, budget)
    mine = {pi for pi in lassos if is_nash_outcome(fixed, pi)}
    assert mine == oracle_nash_outcomes(game, choice, budget)
