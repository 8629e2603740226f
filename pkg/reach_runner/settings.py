"""
运行配置: .env 文件 + 环境变量 + 命令行 --budget 覆盖。
"""

from __future__ import annotations

import dataclasses
import os
from pathlib import Path
from typing import Dict, Optional

from .errors import ConfigurationError, InvalidInputError
from .oracle import OracleBudget

BUDGET_ENV = {
    "max_lasso_length": ("REACHGAME_MAX_LASSO_LENGTH", 12),
    "max_horizon": ("REACHGAME_MAX_HORIZON", 24),
    "max_profiles": ("REACHGAME_MAX_PROFILES", 200000),
    "memory": ("REACHGAME_ORACLE_MEMORY", 1),
}

BUDGET_KEYS = {
    "lasso": "max_lasso_length",
    "horizon": "max_horizon",
    "profiles": "max_profiles",
    "memory": "memory",
}


def load_env_file(base_dir: Path) -> Dict[str, str]:
    """Load base_dir/.env (simple KEY=VALUE parser); never overrides os.environ."""
    loaded: Dict[str, str] = {}
    env_path = base_dir / ".env"
    if not env_path.exists():
        return loaded
    for line in env_path.read_text(encoding="utf-8").splitlines():
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        if "=" not in s:
            continue
        key, value = s.split("=", 1)
        key = key.strip()
        value = value.strip().strip('"').strip("'")
        if key and value and key not in os.environ:
            os.environ[key] = value
            loaded[key] = value
    return loaded


def _int_from_env(name: str, default: int) -> int:
    raw = os.getenv(name, str(default))
    try:
        return int(raw)
    except ValueError as e:
        raise ConfigurationError(f"{name}={raw!r} is not an integer") from e


def default_budget() -> OracleBudget:
    """Budget from REACHGAME_* variables.

    memory 默认为 1: 只枚举无记忆的玩家 0 策略。两状态交叉检验要枚举 2^(2|V|) 张状态更新表,
    6 个顶点的 fig1 就已超出默认 max_profiles; 小实例用 REACHGAME_ORACLE_MEMORY=2 或
    --budget memory=2 打开。
    """
    values = {field: _int_from_env(env, default) for field, (env, default) in BUDGET_ENV.items()}
    try:
        return OracleBudget(**values)
    except InvalidInputError as e:
        raise ConfigurationError(f"oracle budget from environment: {e}") from e


def parse_budget(spec: Optional[str], base: Optional[OracleBudget] = None) -> OracleBudget:
    """`lasso=N,horizon=N,profiles=N,memory=K` on top of base (default: the environment)."""
    budget = base if base is not None else default_budget()
    if not spec:
        return budget
    changes: Dict[str, int] = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition("=")
        field = BUDGET_KEYS.get(key.strip())
        if not sep or field is None:
            raise ConfigurationError(
                f"--budget entry {part!r}; expected one of {', '.join(k + '=N' for k in BUDGET_KEYS)}"
            )
        try:
            changes[field] = int(value)
        except ValueError as e:
            raise ConfigurationError(f"--budget {key}={value!r} is not an integer") from e
    try:
        return dataclasses.replace(budget, **changes)
    except InvalidInputError as e:
        raise ConfigurationError(f"--budget: {e}") from e
