"""
📈 指数与对数

exponential(x, y): x^y，结果 ≥ N^d 时返回 OVERFLOW
logarithm(x, y):   ⌊log_x y⌋，x ≥ 2，y ≥ 1
"""

import logging
from typing import Optional, Union

from common.errors import DomainError
from common.meter import StepMeter

from .division import divide_poly
from .radix import OVERFLOW, Poly, Radix

logger = logging.getLogger(__name__)


def exp_poly(r: Radix, x: Poly, y: Poly) -> Optional[Poly]:
    """x^y；≥ N^d 时返回 None"""
    one, s = r.const("ONE"), r.const("S")
    if r.is_zero(y) or r.eq(x, one):
        return one
    if r.is_zero(x):
        return r.const("ZERO")
    if r.lt(y, r.const("TWO_D")):
        e = r.word(y)
        acc = r.power_word(x, e, s)
        return None if r.le(s, acc) else acc
    if r.lt(x, r.const("B")) and r.lt(y, r.const("LD1")):
        xw = r.m.assign(x[0])
        yw = r.word(y)
        if r.m.le(yw, r.m.read(r.t["BOUND"], xw)):
            return exp_table(r, xw, yw)
    return None


def exp_table(r: Radix, x: int, y: int) -> Poly:
    """EXP[x][y] 的数字"""
    p = r.zeros()
    table = r.t["EXP"]
    for k in range(r.ctx.exp_digits):
        r.m.write(p, k, r.m.read(table, x, y, k))
    return p


def pow2(r: Radix, k: int) -> Optional[Poly]:
    """2^k；≥ N^d 时返回 None"""
    if r.m.le(k, r.m.read(r.t["BOUND"], 2)):
        return exp_table(r, 2, k)
    return None


def log_poly(r: Radix, x: Poly, y: Poly) -> int:
    """⌊log_x y⌋，x ≥ 2，y ≥ 1"""
    if r.lt(y, x):
        return r.m.assign(0)
    if r.lt(y, r.const("TWO_B")):
        return r.m.read(r.t["LOGAR"], r.word(x), r.word(y))
    if r.le(x, r.const("B")):
        lx = r.m.read(r.t["LX"], r.word(x))
    else:
        lx = r.m.assign(1)
    p = exp_poly(r, x, r.from_word(lx))
    if p is None or r.lt(y, r.add(p, p)):
        # y < 2·x^{lx}，y/x < 2B
        q, _ = divide_poly(r, y, x)
        return r.m.add(log_poly(r, x, q), 1)
    q, _ = divide_poly(r, y, p)
    s = r.m.add(log_poly(r, x, q), lx)
    e = exp_poly(r, x, r.from_word(r.m.add(s, 1)))
    if e is None or r.lt(y, e):
        return s
    return r.m.add(s, 1)


def exponential(ctx, x: int, y: int, meter: Optional[StepMeter] = None) -> Union[int, str]:
    """x^y，结果 ≥ N^d 时返回 OVERFLOW"""
    ctx.require("exponential")
    r = Radix(ctx, meter)
    result = exp_poly(r, r.load(x), r.load(y))
    return OVERFLOW if result is None else r.decode(result)


def logarithm(ctx, x: int, y: int, meter: Optional[StepMeter] = None) -> int:
    """⌊log_x y⌋"""
    ctx.require("logarithm")
    if x < 2 or y < 1:
        raise DomainError(f"logarithm 要求 x ≥ 2 且 y ≥ 1，当前 x={x}, y={y}")
    r = Radix(ctx, meter)
    return log_poly(r, r.load(x), r.load(y))


__all__ = ["exponential", "logarithm", "exp_poly", "exp_table", "log_poly", "pow2"]
