#!/usr/bin/env python3
"""
测试命令行: 退出码、报告、证书、实例生成与运行配置
"""
import json
import os
import shutil
import sys
from pathlib import Path

# 添加项目路径
sys.path.insert(0, str(Path(__file__).parent))

import pytest

from reach_runner.catalog import figure2_game
from reach_runner.errors import ConfigurationError
from reach_runner.oracle import OracleBudget, OracleInstance, oracle_decide
from reach_runner.runner import EXIT_ERROR, EXIT_NO, EXIT_YES, run_command
from reach_runner.settings import default_budget, load_env_file, parse_budget

INSTANCES = Path(__file__).parent / "instances"


@pytest.fixture
def base(tmp_path):
    shutil.copytree(INSTANCES, tmp_path / "instances")
    return tmp_path


def run(base, *argv):
    return run_command(["--base-dir", str(base), "--quiet", *argv])


@pytest.mark.parametrize(
    "argv,expected",
    [
        (["verify", "ncnv", "--game", "fig1", "--machine", "sigma0", "--threshold", "3"], EXIT_NO),
        (["verify", "ncnv", "--game", "fig1", "--machine", "sigma0_prime", "--threshold", "2"], EXIT_YES),
        (["verify", "uncnv", "--game", "fig1", "--machine", "sigma_both", "--threshold", "3"], EXIT_NO),
        (["verify", "ncpv", "--game", "fig1", "--machine", "sigma0_prime", "--threshold", "2"], EXIT_YES),
        (["solve", "cns", "--game", "fig1", "--threshold", "2"], EXIT_YES),
        (["solve", "cns", "--game", "fig1", "--threshold", "1"], EXIT_NO),
        (["solve", "cps", "--game", "fig1", "--threshold", "2"], EXIT_YES),
        (["oracle", "cns", "--game", "fig1", "--threshold", "1"], EXIT_NO),
    ],
)
def test_exit_codes(base, argv, expected):
    assert run(base, *argv) == expected


def test_errors_exit_with_two_and_leave_a_log(base):
    """三个玩家的博弈不属于单环境 NCNS 的适用范围"""
    assert run(base, "solve", "ncns1", "--game", "fig1", "--threshold", "3") == EXIT_ERROR
    err = base / "outputs" / "logs" / "solve_ncns1.error.txt"
    assert err.read_text(encoding="utf-8").startswith("unsupported-shape:")


def test_missing_threshold_and_machine(base):
    assert run(base, "solve", "cns", "--game", "fig1") == EXIT_ERROR
    assert run(base, "verify", "ncnv", "--game", "fig1", "--threshold", "2") == EXIT_ERROR
    assert run(base, "check", "--game", "nowhere") == EXIT_ERROR


def test_json_report(base, capsys):
    assert run(base, "--format", "json", "solve", "cns", "--game", "fig1", "--threshold", "2") == EXIT_YES
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == "YES"
    assert report["problem"] == "CNS"
    assert report["costs"][0] <= 2


def test_text_report_shows_counterexample(base, capsys):
    argv = ["verify", "ncnv", "--game", "fig1", "--machine", "sigma0_prime", "--threshold", "1"]
    assert run(base, *argv) == EXIT_NO
    out = capsys.readouterr().out
    assert "verdict: NO" in out
    assert "lasso: v0 v1 (v3)^w" in out
    assert "costs: (2, 2, 1)" in out


def test_log_flag_writes_report(base):
    assert run(base, "--log", "solve", "cps", "--game", "fig1", "--threshold", "1") == EXIT_NO
    path = base / "outputs" / "logs" / "solve_cps.report.json"
    assert json.loads(path.read_text(encoding="utf-8"))["verdict"] == "NO"


def test_certificate_round_trip(base):
    argv = ["verify", "ncnv", "--game", "fig1", "--machine", "sigma0", "--threshold", "3"]
    assert run(base, *argv, "--certificate", "ncnv.json") == EXIT_NO
    cert = base / "outputs" / "certificates" / "ncnv.json"
    assert cert.exists()
    assert run(base, "check-certificate", str(cert)) == EXIT_YES


def test_tampered_certificate_fails(base):
    assert run(base, "solve", "cns", "--game", "fig1", "--threshold", "2", "--certificate", "cns.json") == EXIT_YES
    cert = base / "outputs" / "certificates" / "cns.json"
    data = json.loads(cert.read_text(encoding="utf-8"))
    data["threshold"] = 1
    cert.write_text(json.dumps(data), encoding="utf-8")
    assert run(base, "check-certificate", str(cert)) == EXIT_NO


def test_gen_then_solve(base):
    """生成的文件自带 problem 行, 求解时可省略 --threshold"""
    out = base / "outputs" / "bipartition.game"
    assert run(base, "gen", "bipartition", "--input", "bipartition_123.txt") == EXIT_YES
    assert "problem CNS threshold 3" in out.read_text(encoding="utf-8")
    assert run(base, "solve", "cns", "--game", str(out)) == EXIT_YES


def test_gen_writes_machine_next_to_game(base):
    out = base / "gen" / "uncnv.json"
    argv = ["gen", "bipartition-uncnv", "--input", "bipartition_123", "--out", str(out), "--file-format", "json"]
    assert run(base, *argv) == EXIT_YES
    assert json.loads(out.read_text(encoding="utf-8"))["problem"]["name"] == "UNCNV"
    assert out.with_suffix(".mealy").exists()
    assert run(base, "check", "--game", str(out)) == EXIT_YES
    assert run(base, "verify", "uncnv", "--game", str(out)) == EXIT_NO


def test_check(base):
    assert run(base, "check", "--game", "fig3", "--machine", "fig4") == EXIT_YES
    (base / "instances" / "broken.game").write_text("reachgame 1\nplayers 1\n", encoding="utf-8")
    assert run(base, "check", "--game", "broken") == EXIT_ERROR


def test_oracle_budget_flag(base):
    argv = ["oracle", "cns", "--game", "fig1", "--threshold", "2"]
    assert run(base, *argv, "--budget", "lasso=6") == EXIT_YES
    assert run(base, *argv, "--budget", "lasso=abc") == EXIT_ERROR


# ---------------------------------------------------------------- 配置


def test_parse_budget():
    base = OracleBudget()
    assert parse_budget(None, base) is base
    assert parse_budget("lasso=5, memory=2", base) == OracleBudget(max_lasso_length=5, memory=2)
    for bad in ("speed=3", "lasso", "memory=3"):
        with pytest.raises(ConfigurationError):
            parse_budget(bad, base)


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("REACHGAME_MAX_LASSO_LENGTH", "7")
    assert default_budget().max_lasso_length == 7
    monkeypatch.setenv("REACHGAME_MAX_LASSO_LENGTH", "seven")
    with pytest.raises(ConfigurationError):
        default_budget()


def test_env_file_never_overrides(tmp_path, monkeypatch):
    monkeypatch.setenv("REACHGAME_MAX_HORIZON", "30")
    # 先 setenv 再 delenv, 测试结束时 monkeypatch 会把 .env 写入的值一并清掉
    monkeypatch.setenv("REACHGAME_MAX_PROFILES", "0")
    monkeypatch.delenv("REACHGAME_MAX_PROFILES")
    (tmp_path / ".env").write_text(
        "# oracle\nREACHGAME_MAX_HORIZON=5\nREACHGAME_MAX_PROFILES='500'\nnot a pair\n",
        encoding="utf-8",
    )
    loaded = load_env_file(tmp_path)
    assert loaded == {"REACHGAME_MAX_PROFILES": "500"}
    assert os.environ["REACHGAME_MAX_HORIZON"] == "30"
    assert default_budget().max_profiles == 500


def test_memory_cross_check_is_opt_in(monkeypatch):
    monkeypatch.delenv("REACHGAME_ORACLE_MEMORY", raising=False)
    assert default_budget().memory == 1
    monkeypatch.setenv("REACHGAME_ORACLE_MEMORY", "2")
    budget = default_budget()
    assert budget.memory == 2
    game = figure2_game()
    for c in (0, 3):
        assert oracle_decide("CPS", OracleInstance(game, c), budget) == oracle_decide(
            "CPS", OracleInstance(game, c), OracleBudget()
        )
