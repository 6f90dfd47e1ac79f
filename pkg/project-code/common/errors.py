"""
❌ 统一异常定义

所有模块抛出的错误都继承自 RamError，便于 CLI 统一映射退出码。
"""

from typing import Any, Dict, Optional


class RamError(Exception):
    """RAM 库的基础异常"""

    def __init__(self, message: str, pc: Optional[int] = None, **context: Any):
        super().__init__(message)
        self.message = message
        self.pc = pc
        self.context: Dict[str, Any] = dict(context)

    def with_pc(self, pc: int) -> "RamError":
        """附加出错指令位置（已有则保留）"""
        if self.pc is None:
            self.pc = pc
        return self

    def __str__(self) -> str:
        text = self.message
        if self.pc is not None:
            text = f"{text} (pc={self.pc})"
        return text


class ParseError(RamError):
    """程序文本解析失败"""

    def __init__(self, message: str, line: int = 0, **context: Any):
        super().__init__(f"第 {line} 行: {message}", **context)
        self.line = line


class ValueBoundExceeded(RamError):
    """寄存器值超过 c·N 上界"""


class HaltReached(RamError):
    """程序已停机，不能再执行"""


class StepBudgetExceeded(RamError):
    """执行步数超过 max_steps"""


class VertexOutOfRange(RamError):
    """图输入中的顶点编号越界"""


class DomainError(RamError):
    """参数不在运算定义域内"""


class UnsupportedConstruct(RamError):
    """结构化程序中出现无法编译的构造"""


class BudgetExceeded(RamError):
    """预处理或查询超出线性/常数步数保护上界"""


class DivisionByZero(RamError):
    """除数为 0"""


class UnsupportedExponent(RamError):
    """广义开方的指数落在未解决的形式上"""


class BuildTooSmall(RamError):
    """N 太小，表格无法在线性预算内构建"""

    def __init__(self, message: str, min_n: int, **context: Any):
        super().__init__(message, **context)
        self.min_n = min_n


class OperandOutOfRange(RamError):
    """CA 运算的操作数越界"""


class AllocationExhausted(RamError):
    """Trie 节点分配超过 c·N"""


class CompositionError(RamError):
    """两个自动机不能组合"""


class ContractViolation(RamError):
    """自动机违反精确线性时间约定"""


class ConfigError(RamError):
    """配置文件或配置项非法"""
