"""
➗ 常数时间除法

除法在 K = ⌈N^{1/6}⌉ 进制下进行，β = K³：

- div_by_small: 除以 0 < v < β，被除数按 β 进制逐位查 D/R/DM/RM
- div_close:    a < K·b，把除数逐层除以 K（上取整）直到 < β，
                在最浅的小除数层直接求商，再逐层向上校正（每层至多加 1）
- divide / mod: 商的每个 K 进制数字是一次 div_close

层数与位数只由 d 决定，所有分支都用 pick 选择，查询步数与操作数、与 N 无关。
"""

import logging
from typing import List, NamedTuple, Optional, Tuple

from common.errors import DivisionByZero, DomainError, RamError
from common.meter import StepMeter

from .radix import Poly, Radix

logger = logging.getLogger(__name__)


class Chain(NamedTuple):
    """除数逐层缩小的结果"""
    levels: List[Poly]       # b_0 = b, b_{ℓ+1} = ⌈b_ℓ / K⌉
    small: List[bool]        # b_ℓ < β
    widths: List[int]
    star: int                # 最浅的 < β 的一层（字）


def k_radix(r: Radix) -> Radix:
    """与 r 共用计步器的 K 进制运算器"""
    return Radix(r.ctx, r.m, "K")


# ---------------------------------------------------------------------------
# β 进制
# ---------------------------------------------------------------------------

def small_divide(rk: Radix, digits: List[int], v: int) -> Tuple[List[int], int]:
    """β 进制数字（小端序）除以 0 < v < β，返回 (商的数字, 余数)"""
    m, t = rk.m, rk.t
    d_tab, r_tab, dm, rm = t["D"], t["R"], t["DM"], t["RM"]
    q = [0] * len(digits)
    rem = 0
    for i in range(len(digits) - 1, -1, -1):
        a = digits[i]
        s = m.add(m.read(r_tab, a, v), m.read(rm, rem, v))
        m.write(q, i, m.add(m.add(m.read(d_tab, a, v), m.read(dm, rem, v)), m.read(d_tab, s, v)))
        rem = m.read(r_tab, s, v)
    return q, rem


def to_beta(rk: Radix, p: Poly, groups: int) -> List[int]:
    """每三个 K 进制数字合成一个 β 进制数字"""
    m, mult = rk.m, rk.t["MULTK"]
    out = [0] * groups
    for i in range(groups):
        acc = p[3 * i + 2]
        acc = m.add(m.read(mult, acc), p[3 * i + 1])
        m.write(out, i, m.add(m.read(mult, acc), p[3 * i]))
    return out


def from_beta(rk: Radix, digits: List[int]) -> Poly:
    m = rk.m
    mod, div = rk.t["MODK"], rk.t["DIVK"]
    p = rk.zeros()
    for i, v in enumerate(digits):
        m.write(p, 3 * i, m.read(mod, v))
        v = m.read(div, v)
        m.write(p, 3 * i + 1, m.read(mod, v))
        m.write(p, 3 * i + 2, m.read(div, v))
    return p


# ---------------------------------------------------------------------------
# K 进制
# ---------------------------------------------------------------------------

def descend(rk: Radix, b: Poly, kdigits: int) -> Chain:
    """b < K^kdigits，b ≥ 1；第 kdigits−2 层一定 < β"""
    one, beta = rk.const("ONE"), rk.const("BETA")
    depth = kdigits - 2
    levels, small, widths = [b], [], []
    for lv in range(depth + 1):
        width = kdigits - lv + 2
        widths.append(width)
        small.append(rk.lt(levels[lv], beta, width))
        if lv < depth:
            less, _ = rk.sub(levels[lv], one, width)
            levels.append(rk.add(rk.shift_down(less, 1, width - 1), one, width - 1))
    star = levels[depth]
    for lv in range(depth - 1, -1, -1):
        star = rk.pick(small[lv], levels[lv], star)
    return Chain(levels, small, widths, rk.word(star, 3))


def close_quotient(rk: Radix, chain: Chain, a: Poly) -> int:
    """⌊a/b⌋，前提 a < K·b（结果是一个 < K 的字）"""
    depth = len(chain.levels) - 1
    avals = [a]
    for lv in range(1, depth + 1):
        avals.append(rk.shift_down(avals[-1], 1, chain.widths[lv]))
    top = avals[depth]
    for lv in range(depth - 1, -1, -1):
        top = rk.pick(chain.small[lv], avals[lv], top)
    qs = small_divide(rk, to_beta(rk, top, 2), chain.star)[0][0]

    m = rk.m
    q = qs
    for lv in range(depth - 1, -1, -1):
        width = chain.widths[lv]
        q1 = m.add(q, 1)
        fits = rk.lt(avals[lv], rk.mul_digit(chain.levels[lv], q1, width), width)
        q = rk.pick(chain.small[lv], qs, rk.pick(fits, q, q1))
    return q


def divide_k(rk: Radix, a: Poly, b: Poly, kdigits: int) -> Tuple[Poly, Poly]:
    """K 进制长除法：a < K^kdigits，1 ≤ b < K^kdigits"""
    m = rk.m
    chain = descend(rk, b, kdigits)
    q = rk.zeros()
    rem = list(a)
    for j in range(kdigits - 1, -1, -1):
        width = kdigits - j + 2
        hi = rk.shift_down(rem, j, width)
        digit = close_quotient(rk, chain, hi)
        low, _ = rk.sub(hi, rk.mul_digit(b, digit, width), width)
        for i in range(width):
            m.write(rem, j + i, low[i])
        m.write(q, j, digit)
    return q, rem


def to_k(r: Radix, rk: Radix, p: Poly, plan) -> Poly:
    """B 进制 → K 进制（Horner；B ≤ K³，每个 B 数字至多 3 个 K 数字）"""
    width = plan.kdigits + 2
    big_b = rk.const("B")
    acc = rk.zeros()
    for i in range(plan.bwidth - 1, -1, -1):
        acc = rk.add(rk.mul(acc, big_b, width, rows=4), rk.from_word(p[i], 3), width)
    return acc


def from_k(r: Radix, rk: Radix, p: Poly, plan) -> Poly:
    """K 进制 → B 进制（K ≤ B）"""
    k = r.ctx.k6
    acc = r.zeros()
    for i in range(plan.kdigits - 1, -1, -1):
        acc = r.add(r.mul_digit(acc, k, plan.bwidth), r.digit(p[i]), plan.bwidth)
    return acc


# ---------------------------------------------------------------------------
# B 进制接口
# ---------------------------------------------------------------------------

def divide_poly(r: Radix, a: Poly, b: Poly, plan_name: str = "poly") -> Tuple[Poly, Poly]:
    """(⌊a/b⌋, a mod b)，前提 a, b < plan.cap，1 ≤ b"""
    plan = r.ctx.plans[plan_name]
    if r.decode(a) >= plan.cap or r.decode(b) >= plan.cap:
        raise RamError(f"操作数超过 {plan_name} 容量 {plan.cap}")
    if r.decode(b) == 0:
        raise DivisionByZero("除数为 0")
    rk = k_radix(r)
    q, rem = divide_k(rk, to_k(r, rk, a, plan), to_k(r, rk, b, plan), plan.kdigits)
    return from_k(r, rk, q, plan), from_k(r, rk, rem, plan)


def div_small_poly(r: Radix, p: Poly, v: int) -> Tuple[Poly, int]:
    """p < N^d 除以 0 < v < β，返回 (商, 余数)"""
    plan = r.ctx.plans["poly"]
    rk = k_radix(r)
    digits = to_beta(rk, to_k(r, rk, p, plan), plan.kdigits // 3)
    q, rem = small_divide(rk, digits, v)
    return from_k(r, rk, from_beta(rk, q), plan), rem


def _radix(ctx, meter: Optional[StepMeter]) -> Radix:
    ctx.require("small_division")
    return Radix(ctx, meter)


def div_by_small(ctx, a: int, b: int, meter: Optional[StepMeter] = None) -> Tuple[int, int]:
    """a 除以 0 < b < β，返回 (商, 余数)"""
    r = _radix(ctx, meter)
    if b == 0:
        raise DivisionByZero("除数为 0")
    if not 0 < b < ctx.beta:
        raise DomainError(f"小除数 {b} 必须在 (0, β) = (0, {ctx.beta}) 内")
    q, rem = div_small_poly(r, r.load(a), b)
    return r.decode(q), rem


def div_close(ctx, a: int, b: int, meter: Optional[StepMeter] = None) -> int:
    """⌊a/b⌋，要求 a < K·b"""
    r = _radix(ctx, meter)
    if b <= 0:
        raise DivisionByZero("除数为 0")
    if a >= ctx.k6 * b:
        raise DomainError(f"div_close 要求 a < K·b，当前 a={a}, b={b}, K={ctx.k6}")
    plan = ctx.plans["poly"]
    rk = k_radix(r)
    chain = descend(rk, to_k(r, rk, r.load(b), plan), plan.kdigits)
    return close_quotient(rk, chain, to_k(r, rk, r.load(a), plan))


def divide_mod(ctx, a: int, b: int, meter: Optional[StepMeter] = None) -> Tuple[int, int]:
    r = _radix(ctx, meter)
    if b == 0:
        raise DivisionByZero(f"{a} 除以 0")
    q, rem = divide_poly(r, r.load(a), r.load(b))
    logger.debug("divide(%d, %d) = %d 余 %d，%d 步", a, b, r.decode(q), r.decode(rem), r.m.steps)
    return r.decode(q), r.decode(rem)


def divide(ctx, a: int, b: int, meter: Optional[StepMeter] = None) -> int:
    """⌊a/b⌋，0 < b，a, b < N^d"""
    return divide_mod(ctx, a, b, meter)[0]


def mod(ctx, a: int, b: int, meter: Optional[StepMeter] = None) -> int:
    """a mod b"""
    return divide_mod(ctx, a, b, meter)[1]


__all__ = ["div_by_small", "div_close", "divide", "mod", "divide_mod",
           "divide_poly", "div_small_poly", "small_divide", "descend", "close_quotient"]
