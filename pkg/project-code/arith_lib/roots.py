"""
🌱 开方

cth_root(x, c): ⌊x^{1/c}⌋，c 在构建上下文时固定
gen_root(x, y): ⌊x^{1/y}⌋，y 是查询参数

两者共用一个递归过程：x 小于查表界限时直接查根表；否则把 x 除以 K^c
递归求根 t，根一定落在 [t·K, (t+1)·K) 内。常数守卫成立时从 g = t·K
做两次牛顿改进，再在 g 与 g−1 之间选出正确的根；守卫不成立时 K 有常数上界，
在这个区间内按位确定根。
"""

import logging
from typing import Callable, Optional

from common.errors import BuildTooSmall, DomainError, UnsupportedExponent
from common.meter import StepMeter

from .context import ROOT_BRACKET
from .division import divide_poly
from .power import exp_poly, exp_table
from .radix import Poly, Radix
from .tables import MODE_BRACKET, MODE_FACTOR, MODE_FORBIDDEN, MODE_SEARCH

logger = logging.getLogger(__name__)


def _brackets(r: Radix, g: Poly, x: Poly, e: int, cap: Poly) -> bool:
    """g^e ≤ x < (g+1)^e"""
    if not r.le(r.power_word(g, e, cap), x):
        return False
    return r.lt(x, r.power_word(r.add(g, r.const("ONE")), e, cap))


def _improve(r: Radix, g: Poly, x: Poly, e: int, cap: Poly) -> Poly:
    """g 已是根则原样返回，否则做一步牛顿：(x + (e−1)·g^e) / (e·g^{e−1})"""
    if _brackets(r, g, x, e, cap):
        return g
    ge = r.power_word(g, e, cap)
    num = r.add(x, r.mul_digit(ge, r.pred(e)))
    den = r.mul_digit(r.power_word(g, r.pred(e), cap), e)
    q, _ = divide_poly(r, num, den, "wide")
    return q


def _bracket(r: Radix, g: Poly, x: Poly, e: int, rounds: int, cap: Poly) -> Poly:
    """g 起按位加上 2^{rounds−1}, …, 1，保持 g^e ≤ x"""
    m = r.m
    steps = [m.assign(1)]
    for _ in range(rounds - 1):
        steps.append(m.add(steps[-1], steps[-1]))
    for h in reversed(steps):
        z = r.add(g, r.from_word(h))
        g = r.pick(r.le(r.power_word(z, e, cap), x), z, g)
    return g


def newton_root(r: Radix, x: Poly, e: int, k: int, kpow: Poly, limit: Poly,
                lookup: Callable[[int], int], rounds: int = 0) -> Poly:
    """x < limit 时查表，否则递归；rounds > 0 时按位确定而不做牛顿改进"""
    if r.lt(x, limit):
        return r.from_word(lookup(r.word(x)))
    s, _ = divide_poly(r, x, kpow)
    t = newton_root(r, s, e, k, kpow, limit, lookup, rounds)
    g = r.mul_digit(t, k)
    g = r.pick(r.is_zero(g), r.const("ONE"), g)
    cap = r.const("CAP_WIDE")
    if rounds:
        return _bracket(r, g, x, e, rounds, cap)
    g = _improve(r, g, x, e, cap)
    g = _improve(r, g, x, e, cap)
    if _brackets(r, g, x, e, cap):
        return g
    return r.sub(g, r.const("ONE"))[0]


def cth_root(ctx, x: int, c: int, meter: Optional[StepMeter] = None) -> int:
    """⌊x^{1/c}⌋，c 必须是构建时声明的指数"""
    ctx.require("cth_root")
    setup = ctx.roots.get(c)
    if setup is None:
        raise DomainError(f"上下文没有为指数 {c} 构建根表（已有 {sorted(ctx.roots)}）")
    if c >= ctx.b:
        raise DomainError(f"指数 {c} 必须小于 B={ctx.b}")
    if not setup.available:
        raise BuildTooSmall(f"N={ctx.n} 时开 {c} 次方的根表大小 {setup.table_size} 超过 c·N",
                            min_n=setup.min_n)
    r = Radix(ctx, meter)
    table = ctx.tables[f"ROOT{c}"]
    rounds = setup.rounds if setup.mode == ROOT_BRACKET else 0
    root = newton_root(
        r, r.load(x), c, setup.k, r.const(f"KPOW{c}"), r.const(f"ROOT_T{c}"),
        lambda v: r.m.read(table, v), rounds,
    )
    return r.decode(root)


def _search_root(r: Radix, x: Poly, y: Poly, bits: int) -> Poly:
    """按位确定 ⌊x^{1/y}⌋，结果 < 2^bits"""
    root = r.zeros()
    for k in range(bits - 1, -1, -1):
        z = r.add(root, exp_table(r, 2, k))
        p = exp_poly(r, z, y)
        if p is not None and r.le(p, x):
            root = z
    return root


def gen_root(ctx, x: int, y: int, meter: Optional[StepMeter] = None) -> int:
    """⌊x^{1/y}⌋"""
    ctx.require("gen_root")
    if y == 0:
        raise DomainError("gen_root 的指数不能为 0")
    r = Radix(ctx, meter)
    xp, yp = r.load(x), r.load(y)
    if r.eq(yp, r.const("ONE")):
        return x
    if r.lt(r.const("L"), yp):
        # y > L 时根 < 2^d
        return r.decode(_search_root(r, xp, yp, ctx.d))

    yw = r.word(yp)
    mode = r.m.read(r.t["GENMODE"], yw)
    if r.m.eq(mode, MODE_FORBIDDEN):
        raise UnsupportedExponent(f"指数 y={y} 是禁用形式 p·q（p 素数，q ≤ {ctx.d}）")
    if r.m.eq(mode, MODE_SEARCH):
        bits = r.m.read(r.t["SEARCH"], yw)
        return r.decode(_search_root(r, xp, yp, bits))
    if r.m.eq(mode, MODE_FACTOR):
        y1 = r.m.read(r.t["FACTOR"], yw)
        y2 = r.m.read(r.t["FACTOR2"], yw)
        z = _newton_for(r, xp, y1)
        return r.m.read(r.t["ROOT"], r.word(z), y2)
    return r.decode(_newton_for(r, xp, yw))


def _newton_for(r: Radix, x: Poly, y: int) -> Poly:
    """牛顿区间 y < λ 内的开 y 次方"""
    k = r.m.read(r.t["ROOTN"], y)
    cap = r.const("CAP_WIDE")
    kpow = r.power_word(r.digit(k), y, cap)
    rounds = 0
    if r.m.eq(r.m.read(r.t["GENMODE"], y), MODE_BRACKET):
        rounds = r.m.read(r.t["SEARCH"], y)
    dense = r.t["ROOT"]
    return newton_root(r, x, y, k, kpow, r.const("B_ROOT"),
                       lambda v: r.m.read(dense, v, y), rounds)


__all__ = ["cth_root", "gen_root", "newton_root"]
