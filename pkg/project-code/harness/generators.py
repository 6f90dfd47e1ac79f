"""
🎲 按运算定义域生成随机参数

每个运算一条 ArgDomain：
- sample     在定义域内按种子随机取一组参数
- accepts    判断一组参数是否在定义域内
- candidates 穷举用的候选参数（再经 accepts 过滤）

约定（s = N^d，ℓ = length(s)）：
- pred         1 ≤ x ≤ c·N
- sqrt_ceil    1 ≤ x ≤ N
- div_by_small 0 ≤ a < s，0 < b < B
- div_close    0 < b < s，0 ≤ a < min(s, K·b)
- divide/mod   0 ≤ a < s，0 < b < s
- exponential  x, y < s；一半样本的 y ≤ ℓ+1，结果不全是 OVERFLOW
- logarithm    2 ≤ x < s，1 ≤ y < s
- gen_root     1 ≤ y < s，跳过禁用形式（见 is_skipped）
- bit          i 一半取在 [0, ℓ+2)
- substring    length(x) ≥ i > j ≥ 0
- conc         (x << length(y)) + y < s
- division2    0 ≤ a < min(s, K7^(7d))，0 < b < s
- root<c>      0 ≤ x < s
- ca_op        每个操作数 < N^d（complement 演示自动机只有一个）
"""

import itertools
import random
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, Iterator, Optional, Tuple

from common.errors import DomainError

from arith_lib.tables import MODE_FORBIDDEN, is_forbidden

Args = Tuple[int, ...]

# 扫描里 ca_op 使用的演示自动机
CA_SWEEP_DEMO = "complement"


def _length(x: int) -> int:
    return max(1, x.bit_length())


def _mostly_small(rng: random.Random, hi: int, small: int) -> int:
    """一半概率在 [0, min(hi, small)) 内取，一半在 [0, hi) 内取"""
    if rng.random() < 0.5:
        return rng.randrange(min(hi, small))
    return rng.randrange(hi)


@dataclass(frozen=True)
class ArgDomain:
    """一个运算的参数定义域"""
    sample: Callable[[Any, random.Random], Args]
    accepts: Callable[[Any, Args], bool]
    candidates: Callable[[Any, int], Iterable[Args]]
    note: str = ""


def _limit(ctx, cap: Optional[int]) -> int:
    return ctx.s if cap is None else min(ctx.s, cap)


def _unary(lo: int = 0) -> Callable[[Any, int], Iterable[Args]]:
    return lambda ctx, hi: ((x,) for x in range(lo, hi))


def _pairs(lo_x: int = 0, lo_y: int = 0) -> Callable[[Any, int], Iterable[Args]]:
    return lambda ctx, hi: itertools.product(range(lo_x, hi), range(lo_y, hi))


def _uniform(lo: int = 0) -> Callable[[Any, random.Random], Args]:
    return lambda ctx, rng: (rng.randrange(lo, ctx.s),)


def _uniform_pair(lo_x: int = 0, lo_y: int = 0) -> Callable[[Any, random.Random], Args]:
    return lambda ctx, rng: (rng.randrange(lo_x, ctx.s), rng.randrange(lo_y, ctx.s))


def _in_range(*lows: int) -> Callable[[Any, Args], bool]:
    return lambda ctx, args: all(lo <= a < ctx.s for a, lo in zip(args, lows))


# -- 各运算的特殊定义域 ------------------------------------------------------

def _sample_div_close(ctx, rng: random.Random) -> Args:
    b = rng.randrange(1, ctx.s)
    return rng.randrange(min(ctx.s, ctx.k6 * b)), b


def _sample_exponential(ctx, rng: random.Random) -> Args:
    x = _mostly_small(rng, ctx.s, ctx.n)
    y = _mostly_small(rng, ctx.s, ctx.l_d + 2)
    return x, y


def _sample_gen_root(ctx, rng: random.Random) -> Args:
    return rng.randrange(ctx.s), 1 + _mostly_small(rng, ctx.s - 1, ctx.l + 3)


def _sample_bit(ctx, rng: random.Random) -> Args:
    return rng.randrange(ctx.s), _mostly_small(rng, ctx.s, ctx.l_d + 2)


def _sample_substring(ctx, rng: random.Random) -> Args:
    x = rng.randrange(ctx.s)
    i = rng.randint(1, _length(x))
    return x, i, rng.randrange(i)


def _substring_ok(ctx, args: Args) -> bool:
    x, i, j = args
    return 0 <= x < ctx.s and _length(x) >= i > j >= 0


def _substring_candidates(ctx, hi: int) -> Iterator[Args]:
    for x in range(hi):
        for i in range(1, _length(x) + 1):
            for j in range(i):
                yield x, i, j


def _conc_ok(ctx, args: Args) -> bool:
    x, y = args
    return 0 <= x < ctx.s and 0 <= y < ctx.s and (x << _length(y)) + y < ctx.s


def _sample_conc(ctx, rng: random.Random) -> Args:
    y = rng.randrange(ctx.s)
    top = (ctx.s - 1 - y) >> _length(y)
    return rng.randint(0, top), y


def _division2_cap(ctx) -> int:
    return min(ctx.s, ctx.k7 ** ctx.k7_digits)


def _sample_division2(ctx, rng: random.Random) -> Args:
    return rng.randrange(_division2_cap(ctx)), rng.randrange(1, ctx.s)


_DOMAINS: Dict[str, ArgDomain] = {
    "pred": ArgDomain(
        lambda ctx, rng: (rng.randint(1, ctx.bound),),
        lambda ctx, a: 1 <= a[0] <= ctx.bound,
        lambda ctx, hi: ((x,) for x in range(1, ctx.bound + 1)),
        "1 ≤ x ≤ c·N"),
    "sqrt_ceil": ArgDomain(
        lambda ctx, rng: (rng.randint(1, ctx.n),),
        lambda ctx, a: 1 <= a[0] <= ctx.n,
        lambda ctx, hi: ((x,) for x in range(1, ctx.n + 1)),
        "1 ≤ x ≤ N"),
    "div_by_small": ArgDomain(
        lambda ctx, rng: (rng.randrange(ctx.s), rng.randrange(1, ctx.beta)),
        lambda ctx, a: 0 <= a[0] < ctx.s and 0 < a[1] < ctx.beta,
        lambda ctx, hi: itertools.product(range(hi), range(1, ctx.beta)),
        "0 < b < β"),
    "div_close": ArgDomain(
        _sample_div_close,
        lambda ctx, a: 0 < a[1] < ctx.s and 0 <= a[0] < min(ctx.s, ctx.k6 * a[1]),
        _pairs(0, 1),
        "a < K·b"),
    "divide": ArgDomain(_uniform_pair(0, 1), _in_range(0, 1), _pairs(0, 1), "b > 0"),
    "mod": ArgDomain(_uniform_pair(0, 1), _in_range(0, 1), _pairs(0, 1), "b > 0"),
    "exponential": ArgDomain(_sample_exponential, _in_range(0, 0), _pairs(), "x, y < N^d"),
    "logarithm": ArgDomain(_uniform_pair(2, 1), _in_range(2, 1), _pairs(2, 1), "x ≥ 2，y ≥ 1"),
    "gen_root": ArgDomain(_sample_gen_root, _in_range(0, 1), _pairs(0, 1), "y ≥ 1，跳过禁用形式"),
    "bit_length": ArgDomain(_uniform(), _in_range(0), _unary(), "x < N^d"),
    "conc": ArgDomain(_sample_conc, _conc_ok, _pairs(), "结果 < N^d"),
    "bit": ArgDomain(_sample_bit, _in_range(0, 0), _pairs(), "x, i < N^d"),
    "substring": ArgDomain(_sample_substring, _substring_ok, _substring_candidates,
                           "length(x) ≥ i > j ≥ 0"),
    "is_prefix": ArgDomain(_uniform_pair(), _in_range(0, 0), _pairs(), ""),
    "is_suffix": ArgDomain(_uniform_pair(), _in_range(0, 0), _pairs(), ""),
    "xor": ArgDomain(_uniform_pair(), _in_range(0, 0), _pairs(), ""),
    "and": ArgDomain(_uniform_pair(), _in_range(0, 0), _pairs(), ""),
    "or": ArgDomain(_uniform_pair(), _in_range(0, 0), _pairs(), ""),
    "division2": ArgDomain(
        _sample_division2,
        lambda ctx, a: 0 <= a[0] < _division2_cap(ctx) and 0 < a[1] < ctx.s,
        _pairs(0, 1),
        "a < K7^(7d)"),
}

_ROOT_DOMAIN = ArgDomain(_uniform(), _in_range(0), _unary(), "x < N^d")


def arg_domain(name: str) -> ArgDomain:
    """运算名 → 参数定义域（root<c> 共用一条）"""
    if name in _DOMAINS:
        return _DOMAINS[name]
    if name.startswith("root") and name[4:].isdigit():
        return _ROOT_DOMAIN
    raise DomainError(f"运算 {name} 没有参数生成器")


def random_args(name: str, ctx, rng: random.Random) -> Args:
    return arg_domain(name).sample(ctx, rng)


def exhaustive_args(name: str, ctx, cap: Optional[int] = None) -> Iterator[Args]:
    """定义域内全部参数；cap 限制操作数 < cap（一元的 pred/sqrt_ceil 不受限）"""
    domain = arg_domain(name)
    hi = _limit(ctx, cap)
    for args in domain.candidates(ctx, hi):
        if domain.accepts(ctx, args):
            yield args


def is_skipped(name: str, ctx, args: Args) -> bool:
    """扫描时跳过的参数：gen_root 的禁用形式指数"""
    if name != "gen_root":
        return False
    y = args[1]
    if not 2 <= y <= ctx.l:
        return False
    mode = ctx.tables.get("GENMODE")
    if mode is None:
        return is_forbidden(y, ctx.d)
    return mode.peek(y) == MODE_FORBIDDEN


def random_operands(tables, rng: random.Random) -> Args:
    """ca_op 的随机操作数"""
    return tuple(rng.randrange(tables.operand_limit) for _ in range(tables.ca.r))


def cell_rng(seed: int, op_name: str, n: int) -> random.Random:
    """每个 (运算, N) 一个独立且可复现的随机源"""
    return random.Random(f"{seed}:{op_name}:{n}")


__all__ = [
    "Args", "ArgDomain", "CA_SWEEP_DEMO", "arg_domain", "random_args",
    "exhaustive_args", "is_skipped", "random_operands", "cell_rng",
]
