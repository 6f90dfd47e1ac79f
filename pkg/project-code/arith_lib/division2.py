"""
➗ 前缀除法

另一种常数时间除法：操作数转成 K7 进制，用被除数的 3 或 4 位前缀
和除数的 3 位前缀查 DIV2 表估商（误差至多 1），修正后减去部分积并递归。
递归深度 < 7d。结果必须与 divide 完全一致。
"""

import logging
from typing import List, Optional

from common.errors import DivisionByZero, DomainError
from common.meter import StepMeter

from .division import div_small_poly, k_radix, small_divide, to_beta, to_k
from .radix import Poly, Radix

logger = logging.getLogger(__name__)


def _to_base_k(r: Radix, a: Poly) -> List[int]:
    """K7 进制数字（小端序，7d 位）：先转成 β 进制，再反复除以 K7"""
    plan = r.ctx.plans["poly"]
    rk = k_radix(r)
    cur = to_beta(rk, to_k(r, rk, a, plan), plan.kdigits // 3)
    digits = []
    for _ in range(r.ctx.k7_digits):
        cur, rem = small_divide(rk, cur, r.ctx.k7)
        digits.append(rem)
    return digits


def _length_k(r: Radix, digits: List[int]) -> int:
    """最高非零位的位置 + 1"""
    m = r.m
    length = 0
    for i in range(len(digits) - 1, -1, -1):
        if m.is_zero(length) and not m.is_zero(digits[i]):
            length = m.assign(i + 1)
    return length


def _prefix(r: Radix, digits: List[int], length: int, size: int) -> int:
    """最高 size 位组成的数（字）"""
    mulk, pred = r.t["MULK7"], r.t["PRED"]
    value, pos = 0, length
    for _ in range(size):
        pos = r.m.read(pred, pos)
        value = r.m.add(r.m.read(mulk, value), r.m.assign(digits[pos]))
    return value


def _powk(r: Radix, e: int) -> Poly:
    p = r.zeros()
    table = r.t["POWK7"]
    for i in range(r.w):
        r.m.write(p, i, r.m.read(table, e, i))
    return p


def division2_poly(r: Radix, a: Poly, b: Poly) -> Poly:
    """⌊a/b⌋，1 ≤ b"""
    if r.lt(a, b):
        return r.zeros()
    if r.lt(b, r.const("K7SQ")):
        return div_small_poly(r, a, r.word(b))[0]

    ad, bd = _to_base_k(r, a), _to_base_k(r, b)
    la, lb = _length_k(r, ad), _length_k(r, bd)
    a3, b3 = _prefix(r, ad, la, 3), _prefix(r, bd, lb, 3)
    if r.m.eq(la, lb) and r.m.eq(a3, b3):
        return r.const("ONE")

    shift = r.word_sub(la, lb)
    top = a3
    if r.m.le(a3, b3):
        # 3 位前缀不够大，多取一位
        top = _prefix(r, ad, la, 4)
        shift = r.pred(shift)
    q = r.m.read(r.t["DIV2"], top, r.m.add(b3, 1))
    base = r.mul(b, _powk(r, shift))
    q1 = r.m.add(q, 1)
    if r.le(r.mul_digit(base, q1), a):
        q = q1
    rest, _ = r.sub(a, r.mul_digit(base, q))
    return r.add(r.mul_digit(_powk(r, shift), q), division2_poly(r, rest, b))


def division2(ctx, a: int, b: int, meter: Optional[StepMeter] = None) -> int:
    """⌊a/b⌋，0 < b，a < K7^{7d} 且 a < N^d"""
    ctx.require("division2")
    if b == 0:
        raise DivisionByZero(f"{a} 除以 0")
    if a >= ctx.k7 ** ctx.k7_digits:
        raise DomainError(f"被除数 {a} 超过 K7^(7d) = {ctx.k7 ** ctx.k7_digits}")
    r = Radix(ctx, meter)
    return r.decode(division2_poly(r, r.load(a), r.load(b)))


__all__ = ["division2", "division2_poly"]
