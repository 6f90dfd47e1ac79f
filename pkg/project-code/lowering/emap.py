"""
🗺️ 仿真映射 (emulation map)

一个映射由三部分组成：
- 指令映射：源程序第 i 条指令 -> 目标程序的指令块 [start, end)
- 寄存器映射：源位置 (空间, 下标) -> 目标位置，按空间给出仿射规则
- 扩张常数 k：每个块的长度上界

位置空间：A、B（AB 指令集的累加器与缓冲）、R（内存）、C（数组指令集的变量）、
T0、T1 ...（数组指令集的数组）。
"""

from dataclasses import dataclass, field
from typing import Dict, Tuple

from common.errors import CompositionError
from ram_core.machine import ConfigurationAB, ConfigurationArray, ConfigurationR

Loc = Tuple[str, int]


@dataclass(frozen=True)
class LocRule:
    """源空间第 i 个位置 -> (target_space, offset + stride·i)"""
    target_space: str
    offset: int = 0
    stride: int = 1

    def apply(self, index: int) -> Loc:
        return (self.target_space, self.offset + self.stride * index)

    def then(self, other: "LocRule") -> "LocRule":
        """先应用 self，再应用 other"""
        return LocRule(other.target_space, other.offset + other.stride * self.offset,
                       other.stride * self.stride)


@dataclass(frozen=True)
class EmulationMap:
    blocks: Tuple[Tuple[int, int], ...]
    halt: int
    reg_map: Dict[str, LocRule] = field(default_factory=dict)
    k: int = 1
    # 目标程序需要的上界倍数 c' = c_mul·c + c_add（地址布局会放大数值）
    c_mul: int = 1
    c_add: int = 0

    def start(self, pc: int) -> int:
        """源 pc 对应的目标 pc（pc = r 对应目标的停机位置）"""
        return self.blocks[pc][0] if pc < len(self.blocks) else self.halt

    def block(self, pc: int) -> Tuple[int, int]:
        return self.blocks[pc]

    def max_block(self) -> int:
        return max((e - s for s, e in self.blocks), default=0)

    def map_loc(self, loc: Loc) -> Loc:
        space, index = loc
        rule = self.reg_map.get(space)
        if rule is None:
            raise CompositionError(f"寄存器映射没有覆盖空间 {space}")
        return rule.apply(index)

    def target_c(self, c: int) -> int:
        return self.c_mul * c + self.c_add

    def with_reg_map(self, reg_map: Dict[str, LocRule]) -> "EmulationMap":
        return EmulationMap(self.blocks, self.halt, dict(reg_map), self.k, self.c_mul, self.c_add)


def identity_emap(r: int, spaces=("A", "B", "R", "C")) -> EmulationMap:
    """程序到自身的恒等映射"""
    reg_map = {s: LocRule(s) for s in spaces}
    return EmulationMap(tuple((i, i + 1) for i in range(r)), r, reg_map, 1)


def compose_emaps(first: EmulationMap, second: EmulationMap) -> EmulationMap:
    """
    传递性：first: P1 -> P2，second: P2 -> P3，得到 P1 -> P3

    扩张常数取 k1·k2。
    """
    if first.halt != len(second.blocks):
        raise CompositionError(
            f"映射无法组合：第一个映射的目标有 {first.halt} 条指令，"
            f"第二个映射的源有 {len(second.blocks)} 条"
        )
    blocks = tuple((second.start(s), second.start(e)) for s, e in first.blocks)
    reg_map = {}
    for space, rule in first.reg_map.items():
        nxt = second.reg_map.get(rule.target_space)
        if nxt is None:
            raise CompositionError(f"第二个映射没有覆盖空间 {rule.target_space}")
        reg_map[space] = rule.then(nxt)
    return EmulationMap(
        blocks, second.halt, reg_map, first.k * second.k,
        c_mul=second.c_mul * first.c_mul,
        c_add=second.c_mul * first.c_add + second.c_add,
    )


def config_locs(config) -> Dict[Loc, int]:
    """格局中所有被写过的位置及其值"""
    if isinstance(config, ConfigurationAB):
        locs = {("A", 0): config.a, ("B", 0): config.b}
        locs.update({("R", i): v for i, v in config.memory.items()})
        return locs
    if isinstance(config, ConfigurationR):
        return {("R", i): v for i, v in config.memory.items()}
    locs = {("C", i): v for i, v in config.variables.items()}
    for j, cells in config.arrays.items():
        locs.update({(f"T{j}", x): v for x, v in cells.items()})
    return locs


def read_loc(config, loc: Loc) -> int:
    """读取任意位置（未写过为 0）"""
    space, index = loc
    if isinstance(config, ConfigurationAB):
        if space == "A":
            return config.a
        if space == "B":
            return config.b
        return config.memory.get(index, 0) if space == "R" else 0
    if isinstance(config, ConfigurationR):
        return config.memory.get(index, 0) if space == "R" else 0
    if isinstance(config, ConfigurationArray):
        if space == "C":
            return config.variables.get(index, 0)
        if space.startswith("T"):
            return config.elem(int(space[1:]), index)
    return 0
