"""
📋 运算登记表

名字 → (查询函数, 参数个数, 所需表族, 整数预言机)。CLI 的 op 子命令
与扫描工具都通过这里找到运算。
"""

from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence, Tuple

from common.errors import DomainError

from . import bits, digits, division, power, roots
from .division2 import division2 as division2_op
from .radix import OVERFLOW
from .tables import iroot


@dataclass(frozen=True)
class OpSpec:
    """一个可查询运算"""
    name: str
    fn: Callable
    arity: int
    families: Tuple[str, ...]
    oracle: Callable
    description: str = ""


def _exp_oracle(ctx, x: int, y: int):
    if y == 0 or x == 1:
        return 1
    if x == 0:
        return 0
    # 逐步比较，避免构造巨大的 x^y
    value = 1
    for _ in range(y):
        value *= x
        if value >= ctx.s:
            return OVERFLOW
    return value


def _log_oracle(ctx, x: int, y: int) -> int:
    s, p = 0, x
    while p <= y:
        p *= x
        s += 1
    return s


def _substring_oracle(ctx, x: int, i: int, j: int) -> int:
    return (x >> j) % (1 << (i - j))


def _prefix_oracle(ctx, x: int, y: int) -> bool:
    sx, sy = bin(x)[2:], bin(y)[2:]
    return sy.startswith(sx)


def _suffix_oracle(ctx, x: int, y: int) -> bool:
    sx, sy = bin(x)[2:], bin(y)[2:]
    return sy.endswith(sx)


def _gen_root_oracle(ctx, x: int, y: int) -> int:
    if y == 0:
        raise DomainError("gen_root 的指数不能为 0")
    return iroot(x, y)


def _cth_root_for(c: int) -> OpSpec:
    return OpSpec(
        name=f"root{c}",
        fn=lambda ctx, x, meter=None: roots.cth_root(ctx, x, c, meter),
        arity=1, families=("cth_root",),
        oracle=lambda ctx, x: iroot(x, c),
        description=f"⌊x^(1/{c})⌋",
    )


_OPS: List[OpSpec] = [
    OpSpec("pred", digits.pred, 1, ("base",), lambda ctx, x: x - 1, "x − 1"),
    OpSpec("sqrt_ceil", digits.sqrt_ceil, 1, ("base",),
           lambda ctx, x: iroot(x - 1, 2) + 1 if x > 0 else 0, "⌈√x⌉"),
    OpSpec("div_by_small", division.div_by_small, 2, ("small_division",),
           lambda ctx, a, b: (a // b, a % b), "a 除以 0 < b < β"),
    OpSpec("div_close", division.div_close, 2, ("small_division",),
           lambda ctx, a, b: a // b, "a < K·b 时的 ⌊a/b⌋"),
    OpSpec("divide", division.divide, 2, ("small_division",),
           lambda ctx, a, b: a // b, "⌊a/b⌋"),
    OpSpec("mod", division.mod, 2, ("small_division",),
           lambda ctx, a, b: a % b, "a mod b"),
    OpSpec("exponential", power.exponential, 2, ("exponential",), _exp_oracle, "x^y 或 OVERFLOW"),
    OpSpec("logarithm", power.logarithm, 2, ("logarithm",), _log_oracle, "⌊log_x y⌋"),
    OpSpec("gen_root", roots.gen_root, 2, ("gen_root",), _gen_root_oracle, "⌊x^(1/y)⌋"),
    OpSpec("bit_length", bits.bit_length, 1, ("logarithm",),
           lambda ctx, x: max(1, x.bit_length()), "二进制长度"),
    OpSpec("conc", bits.conc, 2, ("logarithm",),
           lambda ctx, x, y: (x << max(1, y.bit_length())) + y, "二进制拼接"),
    OpSpec("bit", bits.bit, 2, ("logarithm",), lambda ctx, x, i: (x >> i) & 1, "第 i 位"),
    OpSpec("substring", bits.substring, 3, ("logarithm",), _substring_oracle, "第 j..i−1 位"),
    OpSpec("is_prefix", bits.is_prefix, 2, ("logarithm",), _prefix_oracle, "前缀判断"),
    OpSpec("is_suffix", bits.is_suffix, 2, ("logarithm",), _suffix_oracle, "后缀判断"),
    OpSpec("xor", bits.xor, 2, ("bitwise",), lambda ctx, x, y: x ^ y, "按位异或"),
    OpSpec("and", bits.and_, 2, ("bitwise",), lambda ctx, x, y: x & y, "按位与"),
    OpSpec("or", bits.or_, 2, ("bitwise",), lambda ctx, x, y: x | y, "按位或"),
    OpSpec("division2", division2_op, 2, ("division2",),
           lambda ctx, a, b: a // b, "前缀法 ⌊a/b⌋"),
]


def registry(root_exponents: Sequence[int] = (2, 3)) -> Dict[str, OpSpec]:
    """全部运算；开方按指数展开为 root2、root3 ..."""
    ops = {op.name: op for op in _OPS}
    for c in root_exponents:
        spec = _cth_root_for(c)
        ops[spec.name] = spec
    return ops


def get_op(name: str, root_exponents: Sequence[int] = (2, 3)) -> OpSpec:
    ops = registry(root_exponents)
    if name not in ops:
        raise DomainError(f"未知运算: {name}（可用: {', '.join(sorted(ops))}）")
    return ops[name]


__all__ = ["OpSpec", "registry", "get_op"]
