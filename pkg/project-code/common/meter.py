"""
⏱️ 单位代价计步器与只读表

计费规则（每项 1 步）：
- 一次加法（结果受 c·N 上界检查）
- 一次表读取（lookup）
- 一次相等/为零/大小测试
- 一次数组写入或变量赋值

预处理阶段按循环次数批量计费（charge），查询阶段逐次计费。
"""

from contextlib import contextmanager
from contextvars import ContextVar
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .errors import BudgetExceeded, DomainError, ValueBoundExceeded

# 影子计数器：审计期间统计所有表元素读取次数
_shadow: ContextVar[Optional[List[int]]] = ContextVar("table_reads", default=None)


@contextmanager
def audit() -> Iterator[List[int]]:
    """
    统计代码块内 Table 元素的实际读取次数

    用法::

        with audit() as reads:
            ...
        reads[0]  # 读取次数
    """
    box = [0]
    token = _shadow.set(box)
    try:
        yield box
    finally:
        _shadow.reset(token)


CATEGORIES = ("add", "lookup", "test", "write", "assign", "charged", "instr")


@dataclass
class StepMeter:
    """单调递增的步数计数器"""
    bound: Optional[int] = None          # 加法结果上界 c·N（None 表示不检查）
    limit: Optional[int] = None          # 步数保护上限
    steps: int = 0
    counts: Dict[str, int] = field(default_factory=lambda: {k: 0 for k in CATEGORIES})

    def tick(self, category: str, n: int = 1):
        self.steps += n
        self.counts[category] = self.counts.get(category, 0) + n
        if self.limit is not None and self.steps > self.limit:
            raise BudgetExceeded(f"步数 {self.steps} 超过保护上限 {self.limit}")

    def add(self, x: int, y: int) -> int:
        """一次加法"""
        self.tick("add")
        value = x + y
        if self.bound is not None and value > self.bound:
            raise ValueBoundExceeded(f"加法结果 {value} 超过上界 {self.bound}")
        return value

    def eq(self, x: int, y: int) -> bool:
        self.tick("test")
        return x == y

    def is_zero(self, x: int) -> bool:
        self.tick("test")
        return x == 0

    def lt(self, x: int, y: int) -> bool:
        self.tick("test")
        return x < y

    def le(self, x: int, y: int) -> bool:
        self.tick("test")
        return x <= y

    def read(self, table: "Table", *idx: int) -> int:
        """一次表读取"""
        self.tick("lookup")
        return table[idx]

    def assign(self, value: int) -> int:
        self.tick("assign")
        return value

    def write(self, cells: List[int], index: int, value: int):
        """写入查询私有的暂存数组"""
        self.tick("write")
        cells[index] = value

    def charge(self, n: int, category: str = "charged"):
        """批量计费（预处理循环）"""
        if n < 0:
            raise ValueError(f"计费步数不能为负: {n}")
        self.tick(category, n)

    def snapshot(self) -> Dict[str, int]:
        data = dict(self.counts)
        data["steps"] = self.steps
        return data


class Table:
    """
    预处理表：构建时可写，freeze() 后只读

    下标从 0 开始；值在写入时检查 ≤ bound。
    """

    def __init__(self, name: str, shape: Sequence[int], bound: Optional[int] = None, fill: int = 0):
        if not shape or any(s < 0 for s in shape):
            raise ValueError(f"表 {name} 的形状非法: {shape}")
        self.name = name
        self.shape: Tuple[int, ...] = tuple(int(s) for s in shape)
        self.bound = bound
        size = 1
        for s in self.shape:
            size *= s
        self._data: List[int] = [fill] * size
        self._frozen = False

    def __len__(self) -> int:
        return len(self._data)

    @property
    def frozen(self) -> bool:
        return self._frozen

    def _flat(self, idx: Sequence[int]) -> int:
        if len(idx) != len(self.shape):
            raise DomainError(f"表 {self.name} 需要 {len(self.shape)} 个下标，收到 {len(idx)} 个")
        pos = 0
        for i, s in zip(idx, self.shape):
            if i < 0 or i >= s:
                raise DomainError(f"表 {self.name} 下标越界: {tuple(idx)} ∉ {self.shape}")
            pos = pos * s + i
        return pos

    def __getitem__(self, idx) -> int:
        if not isinstance(idx, tuple):
            idx = (idx,)
        box = _shadow.get()
        if box is not None:
            box[0] += 1
        return self._data[self._flat(idx)]

    def peek(self, *idx: int) -> int:
        """不计入审计的读取（仅供构建与测试）"""
        return self._data[self._flat(idx)]

    def set(self, *idx_and_value: int):
        *idx, value = idx_and_value
        if self._frozen:
            raise RuntimeError(f"表 {self.name} 已冻结，不能写入")
        if value < 0 or (self.bound is not None and value > self.bound):
            raise ValueBoundExceeded(f"表 {self.name}{tuple(idx)} 的值 {value} 超过上界 {self.bound}")
        self._data[self._flat(idx)] = value

    def fill_row(self, prefix: Sequence[int], values: Sequence[int]):
        """按最后一维批量写入一行"""
        for j, v in enumerate(values):
            self.set(*prefix, j, v)

    def freeze(self) -> "Table":
        self._frozen = True
        return self

    def to_list(self) -> List[int]:
        return list(self._data)

    @classmethod
    def from_list(cls, name: str, shape: Sequence[int], data: List[int],
                  bound: Optional[int] = None) -> "Table":
        table = cls(name, shape, bound)
        if len(data) != len(table._data):
            raise ValueError(f"表 {name} 数据长度 {len(data)} 与形状 {shape} 不符")
        table._data = list(data)
        return table.freeze()

    def corrupt(self, *idx_and_value: int):
        """直接改写一个元素（仅用于故障注入测试）"""
        *idx, value = idx_and_value
        self._data[self._flat(idx)] = value

    def __repr__(self) -> str:
        return f"Table({self.name!r}, shape={self.shape})"
