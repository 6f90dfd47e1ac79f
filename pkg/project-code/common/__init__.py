"""
🧰 公共基础模块

异常、配置、计步器与日志。
"""

from .errors import (
    RamError, ParseError, ValueBoundExceeded, HaltReached, StepBudgetExceeded,
    VertexOutOfRange, DomainError, UnsupportedConstruct, BudgetExceeded,
    DivisionByZero, UnsupportedExponent, BuildTooSmall, OperandOutOfRange,
    AllocationExhausted, CompositionError, ContractViolation, ConfigError,
)
from .config import RamConfig
from .meter import StepMeter, Table, audit
from .logger import setup_logging, get_logger, icon_for

__all__ = [
    "RamError", "ParseError", "ValueBoundExceeded", "HaltReached",
    "StepBudgetExceeded", "VertexOutOfRange", "DomainError",
    "UnsupportedConstruct", "BudgetExceeded", "DivisionByZero",
    "UnsupportedExponent", "BuildTooSmall", "OperandOutOfRange",
    "AllocationExhausted", "CompositionError", "ContractViolation",
    "ConfigError", "RamConfig", "StepMeter", "Table", "audit",
    "setup_logging", "get_logger", "icon_for",
]
