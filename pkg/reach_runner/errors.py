"""
异常层级: 库函数只负责抛出, 由 runner 统一转换为退出码 2。
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence


class ReachGameError(RuntimeError):
    kind = "error"


class InvalidInputError(ReachGameError, ValueError):
    kind = "invalid-input"


class PreconditionError(ReachGameError):
    kind = "precondition"


class UnsupportedShapeError(ReachGameError):
    kind = "unsupported-shape"


class BudgetExceededError(ReachGameError):
    kind = "budget"


class InconclusiveVerdictError(ReachGameError):
    kind = "inconclusive"


class ProductConstructionError(ReachGameError):
    kind = "product"


class ReductionError(ReachGameError, ValueError):
    kind = "reduction"


class ConfigurationError(ReachGameError):
    kind = "configuration"


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.message}"


class FormatError(ReachGameError, ValueError):
    kind = "format"

    def __init__(self, diagnostics: Sequence[Diagnostic]) -> None:
        self.diagnostics: List[Diagnostic] = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics) or "format error")
