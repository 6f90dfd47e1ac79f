"""
🌲 用二维表模拟 k 维数组

键 (v1..vk) 先看作 N 进制整数，再改写成 B̂ = ⌊N^(1/(2d))⌋ 进制的 k′ 位数字，
从根 0 出发沿 node[n][u] 逐位下行，叶子编号处存值。未定义的子节点读出 0，
写入时按需分配新节点。node 表可以按 E[x div c][c·y + x mod c] 重新编码成
N × (c·B̂) 的形状。
"""

import logging
import random
from typing import Optional, Sequence, Tuple

from common.errors import AllocationExhausted, DomainError
from common.meter import StepMeter

from arith_lib.tables import iroot

from .lazy import LazyArray

logger = logging.getLogger(__name__)

ENCODINGS = ("node", "E")


def trie_radix(n: int, d: int) -> int:
    """B̂ = max(2, ⌊N^(1/(2d))⌋)"""
    return max(2, iroot(n, 2 * d))


def trie_depth(n: int, k: int, radix: int) -> int:
    """最小的 k′ 使 B̂^k′ ≥ N^k"""
    total = n ** k
    depth, power = 1, radix
    while power < total:
        power *= radix
        depth += 1
    return depth


class TrieArray:
    """
    k 维 N×…×N 数组的 trie 模拟

    节点总数上限 c·N；根节点编号为 0，新节点从 1 开始编号。
    """

    def __init__(self, n: int, k: int, d: int = 2, c: int = 8,
                 meter: Optional[StepMeter] = None, encoding: str = "node",
                 garbage: Optional[random.Random] = None):
        if n < 2 or k < 1 or d < 1 or c < 1:
            raise DomainError(f"trie 参数非法: N={n}, k={k}, d={d}, c={c}")
        if encoding not in ENCODINGS:
            raise DomainError(f"未知的节点表编码: {encoding}（可用: {', '.join(ENCODINGS)}）")
        self.n, self.k, self.d, self.c = n, k, d, c
        self.meter = meter if meter is not None else StepMeter()
        self.radix = trie_radix(n, d)
        self.depth = trie_depth(n, k, self.radix)
        self.capacity = c * n
        self.encoding = encoding
        if encoding == "E":
            self._nodes = LazyArray((n, c * self.radix), garbage, self.meter)
        else:
            self._nodes = LazyArray((self.capacity, self.radix), garbage, self.meter)
        self._leaves = LazyArray((self.capacity,), garbage, self.meter)
        self.nb_nodes = self.meter.assign(1)
        logger.debug(f"trie: N={n}, k={k}, B̂={self.radix}, 深度={self.depth}, 容量={self.capacity}")

    # ---- 节点表访问 ----

    def _cell(self, x: int, y: int) -> Tuple[int, int]:
        if self.encoding == "E":
            # E[x div c][c·y + x mod c]
            self.meter.tick("lookup", 2)
            return x // self.c, self.c * y + x % self.c
        return x, y

    def _child(self, x: int, y: int) -> int:
        return self._nodes.fetch(*self._cell(x, y))

    def _link(self, x: int, y: int, child: int):
        self._nodes.store(*self._cell(x, y), child)

    # ---- 键变换 ----

    def digits(self, key: Sequence[int]) -> Tuple[int, ...]:
        """键 → k′ 位 B̂ 进制数字（高位在前）"""
        if len(key) != self.k:
            raise DomainError(f"键需要 {self.k} 个分量，收到 {len(key)} 个")
        for v in key:
            if not 0 <= v < self.n:
                raise DomainError(f"键分量 {v} 不在 [0, N={self.n}) 内")
        m = self.meter
        value = 0
        for v in key:
            # 乘 N 按一次查表计
            m.tick("lookup")
            value = value * self.n + v
            m.tick("add")
        out = [0] * self.depth
        for i in range(self.depth - 1, -1, -1):
            m.tick("lookup", 2)
            value, out[i] = divmod(value, self.radix)
        return tuple(out)

    # ---- 读写 ----

    def get(self, key: Sequence[int]) -> int:
        """缺失的键读出 0，读取不分配节点"""
        m = self.meter
        node = 0
        for u in self.digits(key):
            node = self._child(node, u)
            if m.is_zero(node):
                return m.assign(0)
        return self._leaves.fetch(node)

    def set(self, key: Sequence[int], value: int):
        m = self.meter
        node = 0
        for u in self.digits(key):
            child = self._child(node, u)
            if m.is_zero(child):
                if not m.lt(self.nb_nodes, self.capacity):
                    raise AllocationExhausted(
                        f"trie 节点数将超过 c·N={self.capacity}", key=tuple(key)
                    )
                child = self.nb_nodes
                self.nb_nodes = m.add(self.nb_nodes, 1)
                self._link(node, u, child)
            node = child
        self._leaves.store(node, value)

    def __contains__(self, key: Sequence[int]) -> bool:
        node = 0
        for u in self.digits(key):
            node = self._child(node, u)
            if node == 0:
                return False
        return True


def trie_get(t: TrieArray, key: Sequence[int]) -> int:
    return t.get(key)


def trie_set(t: TrieArray, key: Sequence[int], value: int):
    t.set(key, value)


def multi_array_key(index: int, key: Sequence[int], scale: int) -> Tuple[int, ...]:
    """
    第 index 个 (scale·N)^k 数组的键 → 一个 (2k+1) 维键

    (i, v1 div scale, v1 mod scale, ..., vk div scale, vk mod scale)
    """
    if scale < 1:
        raise DomainError(f"scale 必须 ≥ 1，当前为 {scale}")
    out = [index]
    for v in key:
        out.extend(divmod(v, scale))
    return tuple(out)


class ArrayFamily:
    """ℓ 个 (scale·N)^k 数组共用一棵 (2k+1) 键 trie"""

    def __init__(self, count: int, n: int, k: int, scale: int = 2, d: int = 2, c: int = 8,
                 meter: Optional[StepMeter] = None, encoding: str = "node"):
        if n < max(scale, count):
            raise DomainError(f"需要 N ≥ max(scale, 数组个数)，当前 N={n}, scale={scale}, 个数={count}")
        self.count, self.n, self.k, self.scale = count, n, k, scale
        self.trie = TrieArray(n, 2 * k + 1, d=d, c=c, meter=meter, encoding=encoding)

    def _key(self, index: int, key: Sequence[int]) -> Tuple[int, ...]:
        if not 0 <= index < self.count:
            raise DomainError(f"数组编号 {index} 不在 [0, {self.count}) 内")
        if len(key) != self.k:
            raise DomainError(f"键需要 {self.k} 个分量，收到 {len(key)} 个")
        limit = self.scale * self.n
        for v in key:
            if not 0 <= v < limit:
                raise DomainError(f"键分量 {v} 不在 [0, scale·N={limit}) 内")
        return multi_array_key(index, key, self.scale)

    def get(self, index: int, key: Sequence[int]) -> int:
        return self.trie.get(self._key(index, key))

    def set(self, index: int, key: Sequence[int], value: int):
        self.trie.set(self._key(index, key), value)


__all__ = [
    "TrieArray", "ArrayFamily", "trie_get", "trie_set", "multi_array_key",
    "trie_radix", "trie_depth", "ENCODINGS",
]
