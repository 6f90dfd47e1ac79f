"""
💤 惰性初始化数组

底层存储不做初始化（可用随机垃圾预填充），靠 rank / inverse 两张表
判断一个单元是否被写过：

    单元 idx 已初始化 ⇔ 1 ≤ rank[idx] ≤ count 且 inverse[rank[idx]] = idx

未写过的单元读出 0；每次 store / fetch 的步数是常数。
"""

import logging
import random
from typing import List, Optional, Sequence, Tuple

from common.errors import DomainError
from common.meter import StepMeter

logger = logging.getLogger(__name__)


class LazyArray:
    """
    k 维惰性数组

    inverse 表按行主序保存坐标的扁平编号。
    """

    def __init__(self, shape: Sequence[int], garbage: Optional[random.Random] = None,
                 meter: Optional[StepMeter] = None):
        if not shape or any(s <= 0 for s in shape):
            raise DomainError(f"惰性数组的形状非法: {tuple(shape)}")
        self.shape: Tuple[int, ...] = tuple(int(s) for s in shape)
        self.size = 1
        for s in self.shape:
            self.size *= s
        self.meter = meter if meter is not None else StepMeter()
        if garbage is None:
            self._data: List[int] = [0] * self.size
            self._rank: List[int] = [0] * self.size
            self._inverse: List[int] = [0] * (self.size + 1)
        else:
            # 垃圾值刻意覆盖合法的 rank 与坐标范围
            span = self.size + 2
            self._data = [garbage.randrange(span) for _ in range(self.size)]
            self._rank = [garbage.randrange(span) for _ in range(self.size)]
            self._inverse = [garbage.randrange(span) for _ in range(self.size + 1)]
        self.count = self.meter.assign(0)

    def _flat(self, idx: Sequence[int]) -> int:
        if len(idx) != len(self.shape):
            raise DomainError(f"需要 {len(self.shape)} 个下标，收到 {len(idx)} 个")
        pos = 0
        for i, s in zip(idx, self.shape):
            if not 0 <= i < s:
                raise DomainError(f"下标越界: {tuple(idx)} ∉ {self.shape}")
            pos = pos * s + i
        return pos

    def _initialized(self, pos: int) -> bool:
        m = self.meter
        m.tick("lookup")
        rank = self._rank[pos]
        if m.lt(rank, 1) or not m.le(rank, self.count):
            return False
        m.tick("lookup")
        return m.eq(self._inverse[rank], pos)

    def init_cell(self, *idx: int) -> bool:
        """单元是否已被写过"""
        return self._initialized(self._flat(idx))

    def store(self, *idx_and_value: int):
        """写入并登记该单元"""
        *idx, value = idx_and_value
        pos = self._flat(idx)
        m = self.meter
        m.write(self._data, pos, value)
        if not self._initialized(pos):
            self.count = m.add(self.count, 1)
            m.write(self._rank, pos, self.count)
            m.write(self._inverse, self.count, pos)

    def fetch(self, *idx: int) -> int:
        """已写过的单元返回其值，否则返回 0"""
        pos = self._flat(idx)
        if self._initialized(pos):
            self.meter.tick("lookup")
            return self._data[pos]
        return self.meter.assign(0)

    def raw(self, *idx: int) -> int:
        """底层存储的原始内容（可能是垃圾，只用于测试）"""
        return self._data[self._flat(idx)]


def lazy_store(arr: LazyArray, *idx_and_value: int):
    arr.store(*idx_and_value)


def lazy_fetch(arr: LazyArray, *idx: int) -> int:
    return arr.fetch(*idx)


def init_cell(arr: LazyArray, *idx: int) -> bool:
    return arr.init_cell(*idx)


__all__ = ["LazyArray", "lazy_store", "lazy_fetch", "init_cell"]
