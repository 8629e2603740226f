#!/usr/bin/env python3
"""
测试 Pareto 理性: PO 判定、偏离博弈、CPS / NCPV / UNCPV
"""
import sys
from pathlib import Path

# 添加项目路径
sys.path.insert(0, str(Path(__file__).parent))

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reach_runner.arena import TOP, CostVector, Lasso, ReachabilityGame, cost_of_lasso, payoff
from reach_runner.catalog import (
    figure1_game,
    figure2_game,
    random_game,
    random_machine,
    sigma0_machine,
    sigma0_prime_machine,
    sigma_both_machine,
)
from reach_runner.errors import InvalidInputError, PreconditionError
from reach_runner.mealy import full_machine, memoryless_machine, product_game
from reach_runner.oracle import OracleBudget, OracleInstance, oracle_decide
from reach_runner.pareto import (
    Deviation,
    ParetoContext,
    collapse_environment,
    earliest_deviations,
    ensure_po,
    is_pareto_optimal,
    solve_cps,
    verify_ncpv,
    verify_uncpv,
)


def lasso(game, prefix, cycle):
    idx = game.arena.index
    return Lasso(tuple(idx(n) for n in prefix.split()), tuple(idx(n) for n in cycle.split()))


def test_collapse_environment():
    game = figure1_game()
    merged = collapse_environment(game)
    assert merged.arena.owner[game.arena.index("v2")] == 1
    assert merged.targets == game.targets
    assert collapse_environment(merged) is merged


def test_pareto_optimality_under_sigma0_prime():
    """σ0′ 下唯一的 Pareto 最优 payoff 是 (2, 1)"""
    game = figure1_game()
    product = product_game(game, sigma0_prime_machine(game))
    ctx = ParetoContext.for_threshold(product.game)
    assert is_pareto_optimal(ctx, CostVector((2, 1)))
    assert not is_pareto_optimal(ctx, CostVector((2, TOP)))


def test_pareto_optimality_needs_fixed_strategy():
    with pytest.raises(PreconditionError):
        is_pareto_optimal(ParetoContext.for_threshold(figure1_game()), CostVector((2, 1)))


def test_earliest_deviations():
    game = collapse_environment(figure1_game())
    idx = game.arena.index
    found = earliest_deviations(game, lasso(game, "v0 v1", "v3"))
    assert found == [Deviation(0, idx("v0"), idx("v2"), frozenset(), ((1, 1), (2, 1)))]


def test_ensure_po():
    game = figure1_game()
    assert ensure_po(game, lasso(game, "v0 v1", "v3"), CostVector((2, 1)))
    assert ensure_po(game, lasso(game, "v0 v1 v2", "v5"), CostVector((3, 1)))
    with pytest.raises(PreconditionError):
        ensure_po(game, lasso(game, "v0 v1", "v3"), CostVector((1, 1)))


@pytest.mark.parametrize("c,expected", [(2, True), (3, True), (1, False)])
def test_cps(c, expected):
    game = figure1_game()
    ok, found = solve_cps(game, c)
    assert ok is expected
    if ok:
        pi, p = found
        assert cost_of_lasso(game, pi)[0] <= c
        assert payoff(game, pi) == p
        assert ensure_po(game, pi, p)
    else:
        assert found is None


def test_cps_needs_finite_threshold():
    with pytest.raises(InvalidInputError):
        solve_cps(figure1_game(), TOP)


@pytest.mark.parametrize("c", range(11))
def test_ncpv_sigma0(c):
    """σ0 的 Pareto 前沿 {(2, inf), (3, 1)} 上玩家 0 的代价都是 inf"""
    game = figure1_game()
    product = product_game(game, sigma0_machine(game))
    ok, found = verify_ncpv(product, c)
    assert not ok
    assert cost_of_lasso(product.game, found)[0] > c


def test_ncpv_sigma0_prime():
    game = figure1_game()
    product = product_game(game, sigma0_prime_machine(game))
    assert verify_ncpv(product, 2) == (True, None)
    ok, found = verify_ncpv(product, 1)
    assert not ok
    assert product.project(found) == lasso(game, "v0 v1", "v3")


def test_ncpv_needs_deterministic_machine():
    game = figure1_game()
    with pytest.raises(PreconditionError):
        verify_ncpv(product_game(game, sigma_both_machine(game)), 3)


def test_uncpv():
    game = figure1_game()
    ok, found = verify_uncpv(product_game(game, sigma_both_machine(game)), 3)
    assert not ok and found is not None
    assert verify_uncpv(product_game(game, sigma0_prime_machine(game)), 2) == (True, None)


@pytest.mark.parametrize("c", [1, 3, 7, 15])
def test_ncpv_unbounded_waiting(c):
    """玩家 1 可以任意久地停在 v0: 总有代价 c+1 的 PO 结果, 反例套索比 c 长"""
    game = figure2_game()
    idx = game.arena.index
    product = product_game(game, memoryless_machine(game, {idx("v1"): idx("v1")}))
    ok, found = verify_ncpv(product, c)
    assert not ok
    assert cost_of_lasso(product.game, found)[0] > c
    assert tuple(payoff(product.game, found)) == (0,)
    assert len(product.project(found)) > c


def dominated_payoff_game():
    """玩家 1 从不访问目标; v0 v1 (v3)^w 的 payoff (inf, 3) 被 v0 (v3)^w 的 (inf, 1) 支配"""
    return ReachabilityGame.from_names(
        3,
        [("v0", 1), ("v1", 0), ("v3", 0)],
        [
            ("v0", "v1", (2, 0, 1)),
            ("v0", "v3", (0, 2, 1)),
            ("v1", "v3", (2, 0, 2)),
            ("v3", "v3", (2, 1, 1)),
        ],
        {0: ["v1"], 2: ["v3"]},
        "v0",
    )


def test_never_visiting_player_cannot_make_a_deviation_worse():
    game = dominated_payoff_game()
    cheap = lasso(game, "v0 v1", "v3")
    assert payoff(game, cheap) == CostVector((TOP, 3))
    assert not ensure_po(game, cheap, CostVector((TOP, 3)))
    assert ensure_po(game, lasso(game, "v0", "v3"), CostVector((TOP, 1)))
    ctx = ParetoContext.for_threshold(game)
    assert not is_pareto_optimal(ctx, CostVector((TOP, 3)))
    assert is_pareto_optimal(ctx, CostVector((TOP, 1)))


@pytest.mark.parametrize("c", [0, 2, 5])
def test_cps_rejects_dominated_payoff(c):
    game = dominated_payoff_game()
    assert solve_cps(game, c) == (False, None)
    assert not oracle_decide("CPS", OracleInstance(game, c), OracleBudget())


def test_uncpv_counterexample_is_the_dominating_play():
    game = dominated_payoff_game()
    product = product_game(game, full_machine(game))
    ok, found = verify_uncpv(product, 3)
    assert not ok
    assert product.project(found) == lasso(game, "v0", "v3")
    assert not oracle_decide("UNCPV", OracleInstance(game, 3, full_machine(game)), OracleBudget())


thresholds = st.integers(min_value=0, max_value=4)
seeds = st.integers(min_value=0, max_value=100000)


@settings(max_examples=200, deadline=None)
@given(seed=seeds, c=thresholds)
def test_cps_agrees_with_oracle(seed, c):
    game = random_game(seed, vertices=4, players=3)
    ok, found = solve_cps(game, c)
    assert ok == oracle_decide("CPS", OracleInstance(game, c), OracleBudget())
    if ok:
        pi, p = found
        assert cost_of_lasso(game, pi)[0] <= c
        assert ensure_po(game, pi, p)


@settings(max_examples=200, deadline=None)
@given(
    seed=seeds,
    machine_seed=st.integers(min_value=0, max_value=1000),
    states=st.integers(min_value=1, max_value=2),
    c=thresholds,
)
def test_ncpv_agrees_with_oracle(seed, machine_seed, states, c):
    game = random_game(seed, vertices=4, players=3)
    machine = random_machine(game, machine_seed, states)
    ok, found = verify_ncpv(product_game(game, machine), c)
    assert ok == oracle_decide("NCPV", OracleInstance(game, c, machine), OracleBudget())
    assert ok == (found is None)


@settings(max_examples=200, deadline=None)
@given(
    seed=seeds,
    machine_seed=st.integers(min_value=0, max_value=1000),
    c=thresholds,
)
def test_uncpv_agrees_with_oracle(seed, machine_seed, c):
    game = random_game(seed, vertices=4, players=3)
    machine = random_machine(game, machine_seed, deterministic=False)
    ok, found = verify_uncpv(product_game(game, machine), c)
    assert ok == oracle_decide("UNCPV", OracleInstance(game, c, machine), OracleBudget())
    assert ok == (found is None)
