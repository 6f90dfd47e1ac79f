"""
🔢 定长多项式整数引擎

多项式整数（< N^d 以及中间结果）存成长度 w 的小端序数字列表。
同一套运算有两种数字表示：

- B 进制（B = ⌈√N⌉）：通用算术、指数、对数、开方
- K 进制（K = ⌈N^{1/6}⌉）：除法；三个 K 进制数字合成一个 β = K³ 进制数字

所有运算只用加法、查表与测试，逐次计入 StepMeter；位宽 width 是常数，
所以每个运算的步数与 N 无关。
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

from common.errors import DomainError
from common.meter import StepMeter

from .tables import EQUAL, GREATER, LESS

logger = logging.getLogger(__name__)

Poly = List[int]

OVERFLOW = "OVERFLOW"


@dataclass(frozen=True)
class DigitProfile:
    """一种数字表示：基数、数组长度与所用表的名字"""
    name: str
    base: int
    width: int
    word_digits: int     # 一个字（≤ c·N）需要的数字个数
    mod: str
    div: str
    mult: str
    lo: str
    hi: str
    diff: str
    under: str
    cmp: str


def word_digits(bound: int, base: int) -> int:
    digits = 1
    while base ** digits <= bound:
        digits += 1
    return digits


class Radix:
    """绑定上下文、数字表示与计步器的运算器"""

    def __init__(self, ctx, meter: Optional[StepMeter] = None, base: str = "B"):
        self.ctx = ctx
        self.m = meter if meter is not None else ctx.query_meter()
        self.profile: DigitProfile = ctx.profiles[base]
        self.b = self.profile.base
        self.w = self.profile.width
        self.t = ctx.tables
        self.consts = ctx.consts[base]

    # -- 常数与转换 --------------------------------------------------------

    def const(self, name: str) -> Poly:
        return self.consts[name]

    def zeros(self) -> Poly:
        return [0] * self.w

    def digit(self, v: int) -> Poly:
        """单个数字 v < 基数 作为多项式"""
        p = [0] * self.w
        self.m.write(p, 0, v)
        return p

    def from_word(self, v: int, digits: Optional[int] = None) -> Poly:
        """字（≤ c·N）拆成数字；digits 给出已知的数字个数上界"""
        p = [0] * self.w
        mod, div = self.t[self.profile.mod], self.t[self.profile.div]
        for i in range(digits or self.profile.word_digits):
            self.m.write(p, i, self.m.read(mod, v))
            v = self.m.read(div, v)
        return p

    def word(self, p: Poly, digits: Optional[int] = None) -> int:
        """值 ≤ c·N 的多项式还原为字（Horner）"""
        mult = self.t[self.profile.mult]
        acc = 0
        for i in range((digits or self.profile.word_digits) - 1, -1, -1):
            acc = self.m.add(self.m.read(mult, acc), p[i])
        return acc

    def decode(self, p: Poly) -> int:
        """多项式的值（不计步，只供接口与测试）"""
        value = 0
        for v in reversed(p):
            value = value * self.b + v
        return value

    def load(self, x: int) -> Poly:
        """
        读入 x < N^d：x 以 N 进制寄存器给出，逐个转成 B 进制后按 Horner 合并
        """
        if x < 0 or x >= self.ctx.s:
            raise DomainError(f"操作数 {x} 不在 [0, N^d) = [0, {self.ctx.s}) 内")
        n = self.ctx.n
        regs = []
        for _ in range(self.ctx.d):
            x, rem = divmod(x, n)
            regs.append(rem)
        width = 2 * self.ctx.d + 2
        n_poly = self.consts["N"]
        rows = self.profile.word_digits
        acc = self.zeros()
        for v in reversed(regs):
            acc = self.mul(acc, n_poly, width, rows=rows)
            acc = self.add(acc, self.from_word(v), width)
        return acc

    # -- 加减乘 ------------------------------------------------------------

    def add(self, p: Poly, q: Poly, width: Optional[int] = None) -> Poly:
        """p + q（截断到 width 位）"""
        width = width or self.w
        m = self.m
        mod, div = self.t[self.profile.mod], self.t[self.profile.div]
        res = [0] * self.w
        carry = 0
        for i in range(width):
            t = m.add(m.add(p[i], q[i]), carry)
            m.write(res, i, m.read(mod, t))
            carry = m.read(div, t)
        return res

    def sub(self, p: Poly, q: Poly, width: Optional[int] = None) -> Tuple[Poly, int]:
        """p − q，返回 (结果 mod 基数^width, 借位)"""
        width = width or self.w
        m, b = self.m, self.b
        diff, under = self.t[self.profile.diff], self.t[self.profile.under]
        mod = self.t[self.profile.mod]
        res = [0] * self.w
        borrow = 0
        for i in range(width):
            t = m.add(p[i], b)
            u = m.add(q[i], borrow)
            v = m.read(diff, t, u)
            m.write(res, i, m.read(mod, v))
            borrow = m.read(under, v)
        return res, borrow

    def mul_digit(self, p: Poly, v: int, width: Optional[int] = None) -> Poly:
        """p · v，v 至多等于基数"""
        width = width or self.w
        m = self.m
        lo, hi = self.t[self.profile.lo], self.t[self.profile.hi]
        mod, div = self.t[self.profile.mod], self.t[self.profile.div]
        res = [0] * self.w
        carry = 0
        for j in range(width):
            t = m.add(m.read(lo, p[j], v), carry)
            m.write(res, j, m.read(mod, t))
            carry = m.add(m.read(hi, p[j], v), m.read(div, t))
        return res

    def mul(self, p: Poly, q: Poly, width: Optional[int] = None,
            rows: Optional[int] = None) -> Poly:
        """p · q 截断到 width 位；rows 限定 q 参与运算的低位数字个数"""
        width = width or self.w
        rows = width if rows is None else min(rows, width)
        m = self.m
        lo, hi = self.t[self.profile.lo], self.t[self.profile.hi]
        mod, div = self.t[self.profile.mod], self.t[self.profile.div]
        res = [0] * self.w
        for i in range(rows):
            qi = q[i]
            carry = 0
            for j in range(width - i):
                t = m.add(m.add(res[i + j], m.read(lo, p[j], qi)), carry)
                m.write(res, i + j, m.read(mod, t))
                carry = m.add(m.read(hi, p[j], qi), m.read(div, t))
        return res

    def shift_down(self, p: Poly, k: int, width: int) -> Poly:
        """⌊p / 基数^k⌋ 的低 width 位"""
        res = [0] * self.w
        for i in range(width):
            self.m.write(res, i, p[i + k])
        return res

    # -- 比较与选择 --------------------------------------------------------

    def compare(self, p: Poly, q: Poly, width: Optional[int] = None) -> int:
        """从低位到高位扫描，高位的不等覆盖低位的结果"""
        width = width or self.w
        cmp_, chain = self.t[self.profile.cmp], self.t["CHAIN"]
        state = EQUAL
        for i in range(width):
            state = self.m.read(chain, self.m.read(cmp_, p[i], q[i]), state)
        return state

    def le(self, p: Poly, q: Poly, width: Optional[int] = None) -> bool:
        return not self.m.eq(self.compare(p, q, width), GREATER)

    def lt(self, p: Poly, q: Poly, width: Optional[int] = None) -> bool:
        return self.m.eq(self.compare(p, q, width), LESS)

    def eq(self, p: Poly, q: Poly, width: Optional[int] = None) -> bool:
        return self.m.eq(self.compare(p, q, width), EQUAL)

    def is_zero(self, p: Poly, width: Optional[int] = None) -> bool:
        return self.eq(p, self.consts["ZERO"], width)

    def pick(self, flag: bool, x, y):
        """条件选择（一次测试）"""
        self.m.tick("test")
        return x if flag else y

    def sat(self, p: Poly, cap: Poly, width: Optional[int] = None) -> Poly:
        """min(p, cap)"""
        return self.pick(self.le(cap, p, width), cap, p)

    # -- 字运算 ------------------------------------------------------------

    def pred(self, v: int) -> int:
        return self.m.read(self.t["PRED"], v)

    def word_sub(self, x: int, y: int) -> int:
        """字的差 x − y（x ≥ y）"""
        return self.word(self.sub(self.from_word(x), self.from_word(y))[0])

    def power_word(self, g: Poly, e: int, cap: Poly, width: Optional[int] = None) -> Poly:
        """g^e（e ≥ 1 为字），每步按 cap 饱和"""
        m = self.m
        acc = g
        i = 1
        while not m.eq(i, e):
            acc = self.sat(self.mul(acc, g, width), cap, width)
            i = m.add(i, 1)
        return acc


__all__ = ["Radix", "Poly", "OVERFLOW", "DigitProfile", "word_digits"]
