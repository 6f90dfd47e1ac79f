"""
🎲 随机结构化程序语料

生成一定停机、数值不越界的小程序，用于整条翻译链的锁步检查：
结构化 -> 数组 -> R -> AB。

数值上界：加法只作用在输入、常数或循环变量上（再加 ≤ 7），函数 bump 再加 3，
所以所有值 < N+10，远小于 c·N（N=64, c=64）。循环嵌套 ≤ 2 层。
"""

import random
from dataclasses import dataclass
from typing import List, Optional

from ram_core.instructions import Program
from ram_core.machine import RamInput
from .compiler import lower_structured
from .emap import EmulationMap, compose_emaps
from .passes import lower_array_to_r, lower_r_to_ab
from .structured import (
    Assign, Call, Cond, Elem, For, FuncDef, Goto, If, Inp, Label, Name, Num,
    Output, Return, StructuredProgram, While, add,
)

CORPUS_N = 64
CORPUS_C = 64
_VARS = ["x0", "x1", "x2", "x3"]


class _Generator:

    def __init__(self, rng: random.Random, n: int):
        self.rng = rng
        self.n = n
        self.loop_vars: List[str] = []
        self.labels = 0

    def index(self):
        if self.loop_vars and self.rng.random() < 0.5:
            return Name(self.rng.choice(self.loop_vars))
        return Num(self.rng.randint(0, 7))

    def atom(self):
        kind = self.rng.randrange(4)
        if kind == 0:
            return Num(self.rng.randint(0, 7))
        if kind == 1:
            return Name(self.rng.choice(_VARS))
        if kind == 2:
            return Inp(Num(self.rng.randrange(self.n)))
        return Elem("A", self.index())

    def fresh_value(self):
        """不依赖程序变量的值：常数、输入、循环变量加常数"""
        if self.loop_vars and self.rng.random() < 0.3:
            return add(Name(self.rng.choice(self.loop_vars)), self.rng.randint(1, 7))
        if self.rng.random() < 0.5:
            return add(Inp(self.index()), self.rng.randint(1, 7))
        return self.rng.choice([Num(self.rng.randint(0, 7)), Inp(self.index())])

    def value(self):
        # 加法只作用在输入或循环变量上，变量之间不会累加
        return self.fresh_value() if self.rng.random() < 0.4 else self.atom()

    def stmt(self, depth: int):
        roll = self.rng.random()
        if depth >= 3:
            roll *= 0.6
        if roll < 0.35:
            if self.rng.random() < 0.7:
                return [Assign(Name(self.rng.choice(_VARS)), self.value())]
            return [Assign(Elem("A", self.index()), self.value())]
        if roll < 0.5:
            return [Output(self.value())]
        if roll < 0.6:
            return [Call(self.rng.choice(_VARS), "bump", [self.fresh_value()])]
        if depth >= 2 or roll < 0.72:
            cond = Cond(self.atom(), self.atom(), negate=self.rng.random() < 0.3)
            return [If(cond, self.block(depth + 1, 2), self.block(depth + 1, 2))]
        if roll < 0.86:
            var = f"i{depth}"
            self.loop_vars.append(var)
            body = self.block(depth + 1, 3)
            self.loop_vars.pop()
            lo, hi = self.rng.randint(0, 5), self.rng.randint(0, 5)
            return [For(var, Num(lo), Num(hi), body, down=self.rng.random() < 0.5)]
        counter = Name(f"w{depth}")
        body = self.block(depth + 1, 2) + [Assign(counter, add(counter, 1))]
        return [Assign(counter, Num(0)),
                While(Cond(counter, Num(self.rng.randint(1, 4)), negate=True), body)]

    def block(self, depth: int, size: int):
        out = []
        for _ in range(self.rng.randint(1, size)):
            out.extend(self.stmt(depth))
        return out

    def skip(self, depth: int):
        """向前跳过一段语句"""
        self.labels += 1
        name = f"L{self.labels}"
        return [Goto(name)] + self.block(depth, 2) + [Label(name)]


def _bump() -> FuncDef:
    q, p = Name("q"), Name("p")
    return FuncDef("bump", ["p"], ["q"], [
        Assign(q, add(p, 3)),
        If(Cond(q, Num(5)), [Return(Num(1))]),
        Return(q),
    ])


def random_program(rng: random.Random, n: int = CORPUS_N, size: int = 8) -> StructuredProgram:
    """一个随机结构化程序"""
    gen = _Generator(rng, n)
    body = []
    for _ in range(rng.randint(3, size)):
        body.extend(gen.skip(1) if rng.random() < 0.1 else gen.stmt(0))
    body.append(Output(Name(rng.choice(_VARS))))
    return StructuredProgram(
        variables=_VARS + ["i0", "i1", "w0", "w1"],
        arrays=["A"],
        functions=[_bump()],
        body=body,
    )


def corpus(count: int = 50, seed: int = 7, n: int = CORPUS_N) -> List[StructuredProgram]:
    rng = random.Random(seed)
    return [random_program(rng, n) for _ in range(count)]


def random_inputs(rng: random.Random, count: int, n: int = CORPUS_N) -> List[RamInput]:
    return [RamInput(n, tuple(rng.randrange(n) for _ in range(n))) for _ in range(count)]


@dataclass
class Pipeline:
    """整条翻译链的各级产物"""
    array: Program
    r: Program
    ab: Program
    array_to_r: EmulationMap
    r_to_ab: EmulationMap
    composed: Optional[EmulationMap] = None


def lower_pipeline(sp: StructuredProgram) -> Pipeline:
    """结构化 -> 数组 -> R -> AB"""
    array = lower_structured(sp)
    r, e1 = lower_array_to_r(array)
    ab, e2 = lower_r_to_ab(r)
    return Pipeline(array, r, ab, e1, e2, compose_emaps(e1, e2))
