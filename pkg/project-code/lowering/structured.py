"""
🧱 结构化中间表示

表达式与语句都按名字引用变量和数组；编译器负责分配 C_j / T_j 下标。

表达式：Num、Name、Size (N)、Inp (I[e])、Elem (A[e])、Deref (动态数组 DATA[p+e])、Op
条件：Cond(left, right, negate) 表示 left = right（negate 时为 ≠）
语句：Assign、If、While、For、Call、Return、Alloc、Output、Label、Goto
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Size:
    """输入大小 N"""


@dataclass(frozen=True)
class Inp:
    index: "Expr"


@dataclass(frozen=True)
class Elem:
    """静态数组元素 array[index]"""
    array: str
    index: "Expr"


@dataclass(frozen=True)
class Deref:
    """动态数组元素：ptr 指向 DATA 中的起始位置"""
    ptr: "Expr"
    index: "Expr"


@dataclass(frozen=True)
class Op:
    name: str
    args: Tuple["Expr", ...]


Expr = Union[Num, Name, Size, Inp, Elem, Deref, Op]


def add(*args) -> Op:
    """便捷构造 add(x, y)，整数自动转为 Num"""
    return Op("add", tuple(Num(a) if isinstance(a, int) else a for a in args))


@dataclass(frozen=True)
class Cond:
    left: Expr
    right: Expr = Num(0)
    negate: bool = False

    def inverted(self) -> "Cond":
        return Cond(self.left, self.right, not self.negate)


# ---------------------------------------------------------------------------
# 语句
# ---------------------------------------------------------------------------

@dataclass
class Assign:
    """target 为 Name / Elem / Deref"""
    target: Expr
    value: Expr


@dataclass
class If:
    cond: Cond
    then: List["Stmt"] = field(default_factory=list)
    orelse: List["Stmt"] = field(default_factory=list)


@dataclass
class While:
    cond: Cond
    body: List["Stmt"] = field(default_factory=list)


@dataclass
class For:
    """var 从 start 到 end（含两端）；down 时倒序。start > end 时不执行"""
    var: str
    start: Expr
    end: Expr
    body: List["Stmt"] = field(default_factory=list)
    down: bool = False


@dataclass
class Call:
    """dest <- func(args)；dest 为 None 时丢弃返回值"""
    dest: Optional[str]
    func: str
    args: List[Expr] = field(default_factory=list)


@dataclass
class Return:
    value: Expr = Num(0)


@dataclass
class Alloc:
    """var <- 新分配的 size 个 DATA 单元的起始位置"""
    var: str
    size: Expr


@dataclass
class Output:
    value: Expr


@dataclass
class Label:
    name: str


@dataclass
class Goto:
    name: str


Stmt = Union[Assign, If, While, For, Call, Return, Alloc, Output, Label, Goto]


@dataclass
class FuncDef:
    name: str
    params: List[str] = field(default_factory=list)
    locals: List[str] = field(default_factory=list)
    body: List[Stmt] = field(default_factory=list)

    @property
    def frame_size(self) -> int:
        """栈帧：返回点、调用者 F、帧大小，然后是参数与局部变量"""
        return 3 + len(self.params) + len(self.locals)


@dataclass
class StructuredProgram:
    variables: List[str] = field(default_factory=list)
    arrays: List[str] = field(default_factory=list)
    constants: Dict[str, int] = field(default_factory=dict)
    functions: List[FuncDef] = field(default_factory=list)
    body: List[Stmt] = field(default_factory=list)
    op_set: frozenset = frozenset({"add"})


def walk(stmts: List[Stmt]):
    """深度优先遍历所有语句"""
    for s in stmts:
        yield s
        if isinstance(s, If):
            yield from walk(s.then)
            yield from walk(s.orelse)
        elif isinstance(s, (While, For)):
            yield from walk(s.body)
