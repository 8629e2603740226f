#!/usr/bin/env python3
"""
测试暴力参照实现
"""
import sys
from pathlib import Path

# 添加项目路径
sys.path.insert(0, str(Path(__file__).parent))

import pytest

from reach_runner.arena import TOP, CostVector, Lasso
from reach_runner.catalog import (
    figure1_game,
    figure3_game,
    figure4_machine,
    sigma0_choice,
    sigma0_machine,
    sigma0_prime_choice,
    sigma0_prime_machine,
    sigma_both_machine,
)
from reach_runner.errors import BudgetExceededError, InvalidInputError, PreconditionError
from reach_runner.oracle import (
    OracleBudget,
    OracleInstance,
    enumerate_lassos,
    oracle_decide,
    oracle_memoryless_nash_outcomes,
    oracle_nash_outcomes,
    oracle_pareto_front,
)


def lasso(game, prefix, cycle):
    idx = game.arena.index
    return Lasso(tuple(idx(n) for n in prefix.split()), tuple(idx(n) for n in cycle.split()))


def test_budget_validation():
    with pytest.raises(InvalidInputError):
        OracleBudget(max_lasso_length=0)
    with pytest.raises(InvalidInputError):
        OracleBudget(memory=3)


def test_enumerate_lassos_respects_budget():
    game = figure1_game()
    with pytest.raises(BudgetExceededError):
        enumerate_lassos(game, 12, OracleBudget(max_profiles=3))
    found = enumerate_lassos(game, 3, OracleBudget())
    assert lasso(game, "v0 v1", "v3") in found
    assert all(len(pi) <= 4 for pi in found)


def test_sigma0_nash_outcomes():
    """一般策略下 v0 v1 v2 (v5)^w 也是 σ0 固定的 NE 结果"""
    game = figure1_game()
    outcomes = oracle_nash_outcomes(game, sigma0_choice(game), OracleBudget())
    assert outcomes == {
        lasso(game, "v0 v1 v2", "v4"),
        lasso(game, "v0 v1 v2", "v5"),
        lasso(game, "v0 v2", "v4"),
    }


def test_memoryless_nash_outcomes():
    """只允许无记忆的环境策略与偏离时, 结果集合更小"""
    game = figure1_game()
    budget = OracleBudget()
    assert oracle_memoryless_nash_outcomes(game, sigma0_choice(game), budget) == {
        lasso(game, "v0 v1 v2", "v4"),
        lasso(game, "v0 v2", "v4"),
    }
    assert oracle_memoryless_nash_outcomes(game, sigma0_prime_choice(game), budget) == {
        lasso(game, "v0 v1", "v3"),
    }


def test_pareto_fronts():
    game = figure1_game()
    budget = OracleBudget()
    assert oracle_pareto_front(game, sigma0_choice(game), budget) == {
        CostVector((2, TOP)),
        CostVector((3, 1)),
    }
    assert oracle_pareto_front(game, None, budget) == {CostVector((2, 1))}


@pytest.mark.parametrize(
    "problem,c,machine,expected",
    [
        ("CNS", 2, None, True),
        ("CNS", 1, None, False),
        ("CPS", 2, None, True),
        ("CPS", 1, None, False),
        ("NCNV", 3, sigma0_machine, False),
        ("NCNV", 2, sigma0_prime_machine, True),
        ("NCPV", 3, sigma0_machine, False),
        ("NCPV", 2, sigma0_prime_machine, True),
        ("UNCNV", 3, sigma_both_machine, False),
        ("UNCPV", 3, sigma_both_machine, False),
    ],
)
def test_decide_on_figure1(problem, c, machine, expected):
    game = figure1_game()
    inst = OracleInstance(game, c, machine(game) if machine else None)
    assert oracle_decide(problem, inst, OracleBudget()) is expected


def test_decide_argument_errors():
    game = figure1_game()
    with pytest.raises(InvalidInputError):
        oracle_decide("XYZ", OracleInstance(game, 1), OracleBudget())
    with pytest.raises(InvalidInputError):
        oracle_decide("NCNV", OracleInstance(game, 1), OracleBudget())
    with pytest.raises(PreconditionError):
        oracle_decide("NCNV", OracleInstance(game, 1, sigma_both_machine(game)), OracleBudget())
    with pytest.raises(InvalidInputError):
        oracle_decide("NCNS_BOUNDED", OracleInstance(game, 1, bounds=(1,)), OracleBudget())


def test_two_state_machine_uncnv():
    """m0 允许在 v1 永远自环: 玩家 0 永远到不了 v2"""
    game = figure3_game()
    inst = OracleInstance(game, 10, figure4_machine(game))
    assert oracle_decide("UNCNV", inst, OracleBudget()) is False
