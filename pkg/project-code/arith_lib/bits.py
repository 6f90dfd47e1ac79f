"""
🧵 位串运算

把 x 看作二进制串（0 的长度记为 1），拼接、取位、取子串、前缀/后缀判断
都化为常数个除法、指数与对数查询。xor/and/or 把两个操作数按位长一半
拆开递归，直到两边都 < B 时查表。
"""

import logging
from typing import Optional

from common.errors import DomainError
from common.meter import StepMeter

from .division import div_small_poly, divide_poly
from .power import log_poly, pow2
from .radix import Poly, Radix

logger = logging.getLogger(__name__)


def length_poly(r: Radix, x: Poly) -> int:
    """二进制长度（字）"""
    if r.is_zero(x):
        return r.m.assign(1)
    return r.m.add(log_poly(r, r.const("TWO"), x), 1)


def _bits_radix(ctx, meter: Optional[StepMeter], *families: str) -> Radix:
    ctx.require("logarithm", *families)
    return Radix(ctx, meter)


def bit_length(ctx, x: int, meter: Optional[StepMeter] = None) -> int:
    """x 的二进制长度，bit_length(0) = 1"""
    r = _bits_radix(ctx, meter)
    return length_poly(r, r.load(x))


def conc(ctx, x: int, y: int, meter: Optional[StepMeter] = None) -> int:
    """x · 2^{length(y)} + y"""
    r = _bits_radix(ctx, meter)
    xp, yp = r.load(x), r.load(y)
    shift = r.mul_digit(pow2(r, r.pred(length_poly(r, yp))), 2)
    return r.decode(r.add(r.mul(xp, shift), yp))


def bit(ctx, x: int, i: int, meter: Optional[StepMeter] = None) -> int:
    """x 的第 i 位（最低位为第 0 位）"""
    r = _bits_radix(ctx, meter)
    xp, ip = r.load(x), r.load(i)
    if r.le(r.const("LD1"), ip):
        return r.m.assign(0)
    p = pow2(r, r.word(ip))
    if p is None:
        return r.m.assign(0)
    q, _ = divide_poly(r, xp, p)
    return div_small_poly(r, q, 2)[1]


def substring(ctx, x: int, i: int, j: int, meter: Optional[StepMeter] = None) -> int:
    """第 j 位到第 i−1 位组成的数，即 (x div 2^j) mod 2^{i−j}"""
    length = max(1, x.bit_length())
    if not length >= i > j >= 0:
        raise DomainError(f"substring 要求 length(x) ≥ i > j ≥ 0，当前 length={length}, i={i}, j={j}")
    r = _bits_radix(ctx, meter)
    xp = r.load(x)
    iw, jw = r.m.assign(i), r.m.assign(j)
    q, _ = divide_poly(r, xp, pow2(r, jw))
    p = pow2(r, r.word_sub(iw, jw))
    if p is None:
        return r.decode(q)
    return r.decode(divide_poly(r, q, p)[1])


def is_prefix(ctx, x: int, y: int, meter: Optional[StepMeter] = None) -> bool:
    """x 的二进制串是否是 y 的前缀"""
    r = _bits_radix(ctx, meter)
    xp, yp = r.load(x), r.load(y)
    lx, ly = length_poly(r, xp), length_poly(r, yp)
    if r.m.lt(ly, lx):
        return False
    q, _ = divide_poly(r, yp, pow2(r, r.word_sub(ly, lx)))
    return r.eq(q, xp)


def is_suffix(ctx, x: int, y: int, meter: Optional[StepMeter] = None) -> bool:
    """x 的二进制串是否是 y 的后缀"""
    r = _bits_radix(ctx, meter)
    xp, yp = r.load(x), r.load(y)
    lx, ly = length_poly(r, xp), length_poly(r, yp)
    if r.m.lt(ly, lx):
        return False
    p = pow2(r, lx)
    tail = yp if p is None else divide_poly(r, yp, p)[1]
    return r.eq(tail, xp)


def bitwise_poly(r: Radix, x: Poly, y: Poly, table_name: str) -> Poly:
    """按位运算：X op Y = (X1 op Y1)·p + (X0 op Y0)，p = 2^{⌊length/2⌋}"""
    big_b = r.const("B")
    if r.lt(x, big_b) and r.lt(y, big_b):
        return r.from_word(r.m.read(r.t[table_name], x[0], y[0]))
    top = r.pick(r.le(x, y), y, x)
    half = r.m.read(r.t["HALF"], length_poly(r, top))
    p = pow2(r, half)
    hx, lx = divide_poly(r, x, p)
    hy, ly = divide_poly(r, y, p)
    high = bitwise_poly(r, hx, hy, table_name)
    low = bitwise_poly(r, lx, ly, table_name)
    return r.add(r.mul(high, p), low)


def _bitwise(ctx, x: int, y: int, table_name: str, meter: Optional[StepMeter]) -> int:
    r = _bits_radix(ctx, meter, "bitwise")
    return r.decode(bitwise_poly(r, r.load(x), r.load(y), table_name))


def xor(ctx, x: int, y: int, meter: Optional[StepMeter] = None) -> int:
    return _bitwise(ctx, x, y, "XOR", meter)


def and_(ctx, x: int, y: int, meter: Optional[StepMeter] = None) -> int:
    return _bitwise(ctx, x, y, "AND", meter)


def or_(ctx, x: int, y: int, meter: Optional[StepMeter] = None) -> int:
    return _bitwise(ctx, x, y, "OR", meter)


__all__ = ["bit_length", "conc", "bit", "substring", "is_prefix", "is_suffix",
           "xor", "and_", "or_", "length_poly", "bitwise_poly"]
