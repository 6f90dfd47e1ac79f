"""
🔟 d 位 B 进制数组上的基础运算

pred、sqrt_ceil 直接查表；进制转换、规范化、比较、加减乘都在
长度为 d 的数字数组上逐位进行，步数只与 d 有关。
"""

import logging
from typing import List, Optional, Sequence, Tuple

from common.errors import DomainError
from common.meter import StepMeter

from .radix import Radix

logger = logging.getLogger(__name__)

Digits = List[int]


def _radix(ctx, meter: Optional[StepMeter]) -> Radix:
    ctx.require("digits")
    return Radix(ctx, meter)


def _check_width(ctx, *arrays: Sequence[int]):
    for a in arrays:
        if len(a) != ctx.d:
            raise DomainError(f"数字数组长度必须为 d={ctx.d}，收到 {len(a)}")
        if any(v < 0 for v in a):
            raise DomainError(f"数字不能为负: {list(a)}")


def _check_normal(ctx, *arrays: Sequence[int]):
    _check_width(ctx, *arrays)
    for a in arrays:
        if any(v >= ctx.b for v in a):
            raise DomainError(f"数组未规范化（存在 ≥ B={ctx.b} 的数字）: {list(a)}")


def pred(ctx, x: int, meter: Optional[StepMeter] = None) -> int:
    """x − 1，1 ≤ x ≤ c·N"""
    r = _radix(ctx, meter)
    if not 1 <= x <= ctx.bound:
        raise DomainError(f"pred 要求 1 ≤ x ≤ c·N={ctx.bound}，当前 x={x}")
    return r.pred(x)


def sqrt_ceil(ctx, x: int, meter: Optional[StepMeter] = None) -> int:
    """⌈√x⌉，1 ≤ x ≤ N"""
    r = _radix(ctx, meter)
    if not 1 <= x <= ctx.n:
        raise DomainError(f"sqrt_ceil 要求 1 ≤ x ≤ N={ctx.n}，当前 x={x}")
    return r.m.read(r.t["CEIL_SQRT"], x)


def to_base_b(ctx, x: int, meter: Optional[StepMeter] = None) -> Digits:
    """x ≤ c·N 转成 d 位 B 进制数字（小端序）"""
    r = _radix(ctx, meter)
    if not 0 <= x <= ctx.bound or x >= ctx.b ** ctx.d:
        raise DomainError(f"to_base_b 要求 0 ≤ x ≤ c·N 且 x < B^d，当前 x={x}")
    m = r.m
    digits = [0] * ctx.d
    for i in range(ctx.d):
        m.write(digits, i, m.read(r.t["MODB"], x))
        x = m.read(r.t["DIVB"], x)
    return digits


def from_base_b(ctx, digits: Sequence[int], meter: Optional[StepMeter] = None) -> int:
    """Horner 求值，结果须 ≤ c·N"""
    r = _radix(ctx, meter)
    _check_normal(ctx, digits)
    value = sum(v * ctx.b ** i for i, v in enumerate(digits))
    if value > ctx.bound:
        raise DomainError(f"数组的值 {value} 超过 c·N={ctx.bound}")
    acc = 0
    for i in range(ctx.d - 1, -1, -1):
        acc = r.m.add(r.m.read(r.t["MULTB"], acc), digits[i])
    return acc


def _normalize(r: Radix, digits: Sequence[int]) -> Digits:
    """每个数字先拆成 (v mod B, v div B) 再并入进位，中间值不超过 c·N"""
    m = r.m
    mod, div = r.t["MODB"], r.t["DIVB"]
    res = [0] * len(digits)
    carry = 0
    for i, v in enumerate(digits):
        t = m.add(m.read(mod, v), carry)
        m.write(res, i, m.read(mod, t))
        carry = m.add(m.read(div, v), m.read(div, t))
    return res


def normalize(ctx, digits: Sequence[int], meter: Optional[StepMeter] = None) -> Digits:
    """把数字进位到 < B，值不变（要求值 < B^d）"""
    r = _radix(ctx, meter)
    _check_width(ctx, digits)
    value = sum(v * ctx.b ** i for i, v in enumerate(digits))
    if value >= ctx.b ** ctx.d:
        raise DomainError(f"数组的值 {value} 不小于 B^d，无法规范化")
    return _normalize(r, digits)


def lower_equal(ctx, a: Sequence[int], b: Sequence[int], meter: Optional[StepMeter] = None) -> int:
    """value(a) ≤ value(b) 时返回 1；从最高位开始比较"""
    r = _radix(ctx, meter)
    _check_normal(ctx, a, b)
    for i in range(ctx.d - 1, -1, -1):
        if not r.m.eq(a[i], b[i]):
            return r.m.read(r.t["LEQ"], a[i], b[i])
    return r.m.assign(1)


def sum_digits(ctx, a: Sequence[int], b: Sequence[int], meter: Optional[StepMeter] = None) -> Digits:
    """(a + b) mod B^d"""
    r = _radix(ctx, meter)
    _check_normal(ctx, a, b)
    padded = r.add(list(a) + [0] * (r.w - ctx.d), list(b) + [0] * (r.w - ctx.d), ctx.d)
    return padded[:ctx.d]


def difference(ctx, a: Sequence[int], b: Sequence[int],
               meter: Optional[StepMeter] = None) -> Tuple[Digits, int]:
    """(a − b) mod B^d 与借位（a < b 时借位为 1）"""
    r = _radix(ctx, meter)
    _check_normal(ctx, a, b)
    res, borrow = r.sub(list(a) + [0] * (r.w - ctx.d), list(b) + [0] * (r.w - ctx.d), ctx.d)
    return res[:ctx.d], borrow


def multiply(ctx, a: Sequence[int], b: Sequence[int], meter: Optional[StepMeter] = None) -> Digits:
    """(a · b) mod B^d：先按列累加 MULT[a_i][b_j]，再规范化"""
    r = _radix(ctx, meter)
    _check_normal(ctx, a, b)
    if ctx.c < ctx.d:
        raise DomainError(f"multiply 需要 c ≥ d，列和才不超过 c·N（当前 c={ctx.c}, d={ctx.d}）")
    m, d = r.m, ctx.d
    cells = [0] * d
    for k in range(d):
        total = 0
        for i in range(k + 1):
            total = m.add(total, m.read(r.t["MULT"], a[i], b[k - i]))
        m.write(cells, k, total)
    return _normalize(r, cells)


def value_of(ctx, digits: Sequence[int]) -> int:
    """数组的值（不计步）"""
    return sum(v * ctx.b ** i for i, v in enumerate(digits))


__all__ = [
    "pred", "sqrt_ceil", "to_base_b", "from_base_b", "normalize", "lower_equal",
    "sum_digits", "difference", "multiply", "value_of",
]
