"""
📜 三种指令集的数据结构

- AB 指令集：累加器 A、缓冲 B、内存 R
- R 指令集：只有寄存器 R[·]
- 数组指令集：整数变量 C_j、数组 T_j 与表达式
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, FrozenSet, Tuple, Union


class InstrSet(Enum):
    """指令集种类"""
    AB = "ab"
    R = "r"
    ARRAY = "array"


@dataclass(frozen=True)
class OpSpec:
    """原始运算"""
    name: str
    arity: int
    fn: Callable[..., int]


def _monus(x: int, y: int) -> int:
    return x - y if x > y else 0


# 可用的原始运算；加法总是存在
OPS: Dict[str, OpSpec] = {
    "add": OpSpec("add", 2, lambda x, y: x + y),
    "mul": OpSpec("mul", 2, lambda x, y: x * y),
    "monus": OpSpec("monus", 2, _monus),
}

DEFAULT_OP_SET: FrozenSet[str] = frozenset({"add"})


# ---------------------------------------------------------------------------
# AB / R 指令
# ---------------------------------------------------------------------------

# 助记符 -> (AB 参数个数, R 参数个数)；None 表示该指令集没有此指令
MNEMONICS: Dict[str, Tuple[Union[int, None], Union[int, None]]] = {
    "CST": (1, 2),
    "Buffer": (0, None),
    "Move": (None, 2),
    "Store": (0, 2),
    "Load": (0, 2),
    "Jzero": (2, 3),
    "getN": (0, 1),
    "Input": (0, 2),
    "Output": (0, 1),
}

# 大小写无关的查找表（程序清单里会出现 JZero 这样的写法）
CANONICAL = {name.lower(): name for name in list(MNEMONICS) + list(OPS)}


@dataclass(frozen=True)
class Instr:
    """AB 或 R 指令：助记符 + 整数参数"""
    op: str
    args: Tuple[int, ...] = ()

    def is_jump(self) -> bool:
        return self.op == "Jzero"

    def targets(self) -> Tuple[int, ...]:
        """跳转目标（最后两个参数）"""
        return self.args[-2:] if self.is_jump() else ()

    def with_targets(self, l0: int, l1: int) -> "Instr":
        return Instr(self.op, self.args[:-2] + (l0, l1))

    def __str__(self) -> str:
        return " ".join([self.op] + [str(a) for a in self.args])


# ---------------------------------------------------------------------------
# 数组指令集的表达式
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class SizeN:
    def __str__(self) -> str:
        return "N"


@dataclass(frozen=True)
class Var:
    """整数变量 C_j"""
    index: int

    def __str__(self) -> str:
        return f"C{self.index}"


@dataclass(frozen=True)
class ArrayElem:
    """数组元素 T_j[expr]"""
    array: int
    index: "Expr"

    def __str__(self) -> str:
        return f"T{self.array}[{self.index}]"


@dataclass(frozen=True)
class InputElem:
    """输入寄存器 I[expr]"""
    index: "Expr"

    def __str__(self) -> str:
        return f"I[{self.index}]"


@dataclass(frozen=True)
class OpExpr:
    name: str
    args: Tuple["Expr", ...]

    def __str__(self) -> str:
        return f"{self.name}({', '.join(str(a) for a in self.args)})"


Expr = Union[Const, SizeN, Var, ArrayElem, InputElem, OpExpr]


@dataclass(frozen=True)
class SetVar:
    """C_j <- expr"""
    var: int
    value: Expr

    def __str__(self) -> str:
        return f"C{self.var} <- {self.value}"


@dataclass(frozen=True)
class SetElem:
    """T_j[index] <- expr"""
    array: int
    index: Expr
    value: Expr

    def __str__(self) -> str:
        return f"T{self.array}[{self.index}] <- {self.value}"


@dataclass(frozen=True)
class JzeroExpr:
    cond: Expr
    l0: int
    l1: int

    def is_jump(self) -> bool:
        return True

    def targets(self) -> Tuple[int, int]:
        return (self.l0, self.l1)

    def with_targets(self, l0: int, l1: int) -> "JzeroExpr":
        return JzeroExpr(self.cond, l0, l1)

    def __str__(self) -> str:
        return f"Jzero {self.cond} {self.l0} {self.l1}"


@dataclass(frozen=True)
class OutputExpr:
    value: Expr

    def __str__(self) -> str:
        return f"Output {self.value}"


ArrayInstr = Union[SetVar, SetElem, JzeroExpr, OutputExpr]


@dataclass(frozen=True)
class Program:
    """一个程序（指令序列 + 允许的运算集合）"""
    iset: InstrSet
    instructions: Tuple = ()
    op_set: FrozenSet[str] = field(default=DEFAULT_OP_SET)

    def __len__(self) -> int:
        return len(self.instructions)

    def __getitem__(self, i):
        return self.instructions[i]

    @property
    def r(self) -> int:
        return len(self.instructions)


def expr_children(expr: Expr) -> Tuple[Expr, ...]:
    if isinstance(expr, (ArrayElem, InputElem)):
        return (expr.index,)
    if isinstance(expr, OpExpr):
        return expr.args
    return ()


def expr_ops(expr: Expr) -> set:
    """表达式里用到的运算名"""
    names = {expr.name} if isinstance(expr, OpExpr) else set()
    for child in expr_children(expr):
        names |= expr_ops(child)
    return names


def instr_exprs(instr: ArrayInstr) -> Tuple[Expr, ...]:
    if isinstance(instr, SetVar):
        return (instr.value,)
    if isinstance(instr, SetElem):
        return (instr.index, instr.value)
    if isinstance(instr, JzeroExpr):
        return (instr.cond,)
    return (instr.value,)
