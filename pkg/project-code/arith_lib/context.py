"""
📦 预处理上下文

build_context 一次性构建查询所需的全部表；上下文构建完成后只读，
可以在多个线程的查询之间共享，每个查询使用自己的 StepMeter。

多项式整数按小端序存成定长数字列表，有两种数字表示：
B = ⌈√N⌉ 进制用于通用算术，K = ⌈N^{1/6}⌉ 进制用于除法。
"""

import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

from common.errors import BudgetExceeded, BuildTooSmall, ConfigError
from common.meter import StepMeter, Table

from .radix import DigitProfile, word_digits
from .tables import (
    BUILDERS, FAMILIES, FAMILY_DEPS, build_cth_root, ceil_sqrt, family_closure,
    iroot_ceil, root_constant_c0, root_guard, to_digits,
)

logger = logging.getLogger(__name__)

CONTEXT_FORMAT_VERSION = 2

# 开 c 次方的三种方式
ROOT_NEWTON = "newton"      # 守卫成立：两步牛顿
ROOT_TABLE = "table"        # 守卫不成立且 N^d ≤ c·N：整表查出
ROOT_BRACKET = "bracket"    # 守卫不成立：初值所在区间内按位确定


@dataclass
class DivPlan:
    """一种除法容量：操作数 < cap，B 进制 bwidth 位，K 进制 kdigits 位（cap ≤ K^kdigits）"""
    name: str
    cap: int
    bwidth: int
    kdigits: int


@dataclass
class RootSetup:
    """开 c 次方的常数"""
    c: int
    k: int
    m: int
    c0: int
    threshold: int       # c0^{2c} + c0^c
    m_prime: int         # max(M, threshold)
    table_size: int      # 根表大小，也是查表的界限
    guard: bool          # K ≥ 1 + 2√c₂
    mode: str
    rounds: int          # bracket 方式的按位轮数
    available: bool
    min_n: int


def cth_root_constants(n: int, c: int) -> Dict[str, int]:
    """开 c 次方使用的常数 K, M, c0, 阈值, M'"""
    k = iroot_ceil(n, 2 * c)
    m = k ** (2 * c)
    c0 = root_constant_c0(c)
    threshold = c0 ** (2 * c) + c0 ** c
    return {"K": k, "M": m, "c0": c0, "threshold": threshold, "M_prime": max(m, threshold)}


def root_setup(n: int, c: int, reg_c: int, d: int) -> RootSetup:
    """N 与寄存器上界 reg_c·N 下开 c 次方的方式与根表大小"""
    info = cth_root_constants(n, c)
    k = info["K"]
    guard = root_guard(k, c)
    bound, s = reg_c * n, n ** d
    if guard:
        mode, size, rounds = ROOT_NEWTON, info["M_prime"], 0
    elif s <= bound:
        mode, size, rounds = ROOT_TABLE, s, 0
    else:
        mode, size, rounds = ROOT_BRACKET, info["M_prime"], max(1, (k - 1).bit_length())
    return RootSetup(
        c=c, k=k, m=info["M"], c0=info["c0"], threshold=info["threshold"],
        m_prime=info["M_prime"], table_size=size, guard=guard, mode=mode,
        rounds=rounds, available=size <= bound, min_n=n,
    )


def _first_n(n: int, ok) -> int:
    """≥ n 的第一个满足 ok 的 N"""
    while not ok(n):
        n += 1
    return n


@dataclass
class PreprocContext:
    """预处理结果：常数与只读表"""
    n: int
    c: int
    d: int
    root_exponents: Tuple[int, ...] = (2, 3)
    families: Tuple[str, ...] = FAMILIES
    tables: Dict[str, Table] = field(default_factory=dict)
    consts: Dict[str, Dict[str, list]] = field(default_factory=dict)
    profiles: Dict[str, DigitProfile] = field(default_factory=dict)
    plans: Dict[str, DivPlan] = field(default_factory=dict)
    roots: Dict[int, RootSetup] = field(default_factory=dict)
    build_steps: Dict[str, int] = field(default_factory=dict)
    flags: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        n, d = self.n, self.d
        self.b = max(2, ceil_sqrt(n))
        self.k6 = iroot_ceil(n, 6)
        self.k7 = iroot_ceil(n, 7)
        self.l = n.bit_length() - 1
        self.s = n ** d
        self.l_d = (self.s - 1).bit_length()          # ⌈d·log₂N⌉
        self.exp_digits = 2 * d
        self.w = 4 * d + 6
        self.wk = 6 * d + 9
        self.word_digits = word_digits(self.bound, self.b)
        self.b_root = max(iroot_ceil(n, 4) ** 3, iroot_ceil(n, d + 1) ** d + 1)
        # λ = L / (12·⌈log₂L⌉)，以整数比较 y·12⌈log₂L⌉ < L 判断 y < λ
        self.lambda_den = 12 * (self.l - 1).bit_length() if self.l > 1 else 0
        self.k7_digits = 7 * d

    # -- 派生常数 ----------------------------------------------------------

    @property
    def bound(self) -> int:
        """寄存器上界 c·N"""
        return self.c * self.n

    @property
    def beta(self) -> int:
        return self.k6 ** 3

    @property
    def lam(self) -> float:
        return self.l / self.lambda_den if self.lambda_den else 0.0

    def below_lambda(self, y: int) -> bool:
        return self.lambda_den > 0 and y * self.lambda_den < self.l

    def gen_root_guard(self, y: int) -> bool:
        """牛顿区间内指数 y 的常数条件是否成立"""
        k = iroot_ceil(self.n, 3 * y)
        c0 = root_constant_c0(y)
        return (self.b_root >= k ** (2 * y)
                and self.b_root >= c0 ** (2 * y) + c0 ** y
                and root_guard(k, y))

    def has(self, family: str) -> bool:
        return family in self.families

    def require(self, *families: str):
        """查询前检查所需表族已构建且在当前 N 下可用"""
        for family in families:
            if family not in self.families:
                raise ConfigError(f"上下文未构建表族 {family}")
            if "small_division" in family_closure([family]) and not self.flags["small_division"]:
                raise BuildTooSmall(f"N={self.n} 时 2β−1 = {2 * self.beta - 1} 超过 c·N",
                                    min_n=self.flags["small_division_min_n"])
            if family == "gen_root" and not self.flags["gen_root"]:
                raise BuildTooSmall(f"N={self.n} 太小，广义开方的稠密根表超过 c·N",
                                    min_n=self.flags["gen_root_min_n"])
            if family == "division2" and not self.flags["division2"]:
                raise BuildTooSmall(f"N={self.n} 时 K7⁴ 超过 c·N",
                                    min_n=self.flags["division2_min_n"])

    @property
    def preproc_steps(self) -> int:
        return sum(self.build_steps.values())

    def steps_for(self, families: Sequence[str]) -> int:
        """若干表族及其依赖的构建步数之和"""
        return sum(self.build_steps.get(f, 0) for f in family_closure(families))

    def query_meter(self, limit: Optional[int] = None) -> StepMeter:
        """查询用的私有计步器（加法结果受 c·N 约束）"""
        return StepMeter(bound=self.bound, limit=limit)

    def summary(self) -> Dict[str, Any]:
        return {
            "n": self.n, "c": self.c, "d": self.d, "B": self.b,
            "K6": self.k6, "beta": self.beta, "K7": self.k7, "L": self.l,
            "lambda": round(self.lam, 4),
            "roots": {c: s.mode for c, s in self.roots.items()},
            "families": list(self.families),
            "preproc_steps": self.preproc_steps,
            "build_steps": dict(self.build_steps),
            "flags": {k: v for k, v in self.flags.items()},
        }


# ---------------------------------------------------------------------------
# 常数
# ---------------------------------------------------------------------------

def _profiles(ctx: PreprocContext) -> Dict[str, DigitProfile]:
    return {
        "B": DigitProfile(
            name="B", base=ctx.b, width=ctx.w, word_digits=ctx.word_digits,
            mod="MODB", div="DIVB", mult="MULTB", lo="LO", hi="HI",
            diff="DIFF", under="UNDER", cmp="CMP"),
        "K": DigitProfile(
            name="K", base=ctx.k6, width=ctx.wk, word_digits=word_digits(ctx.bound, ctx.k6),
            mod="MODK", div="DIVK", mult="MULTK", lo="LOK", hi="HIK",
            diff="DIFFK", under="UNDERK", cmp="CMPK"),
    }


def _small_division_ok(n: int, c: int) -> bool:
    return 2 * iroot_ceil(n, 6) ** 3 - 1 <= c * n


def _setup_constants(ctx: PreprocContext):
    b, w, d, n = ctx.b, ctx.w, ctx.d, ctx.n
    ctx.profiles = _profiles(ctx)
    # 牛顿步的分子 x + (c−1)·g^c 不超过 S·B²
    wide_cap = ctx.s * b * b
    values = {
        "ZERO": 0, "ONE": 1, "TWO": 2, "B": b, "TWO_B": 2 * b,
        "TWO_D": 2 * d, "S": ctx.s, "N": n, "L": ctx.l,
        "LD1": ctx.l_d + 1, "K": ctx.k6, "CAP_WIDE": wide_cap,
        "B_ROOT": ctx.b_root, "K7SQ": ctx.k7 ** 2,
    }
    k_values = {"ZERO": 0, "ONE": 1, "BETA": ctx.beta, "B": b}
    ctx.consts = {
        "B": {name: to_digits(v, b, w) for name, v in values.items()},
        "K": {name: to_digits(v, ctx.k6, ctx.wk) for name, v in k_values.items()},
    }
    # B ≤ K³ 且 N ≤ K⁶，所以两种容量的位数都只与 d 有关
    ctx.plans = {
        "poly": DivPlan(name="poly", cap=ctx.s, bwidth=2 * d + 2, kdigits=6 * d),
        "wide": DivPlan(name="wide", cap=wide_cap, bwidth=2 * d + 4, kdigits=6 * d + 6),
    }

    ctx.flags["small_division"] = _small_division_ok(n, ctx.c)
    ctx.flags["small_division_min_n"] = _first_n(n, lambda m: _small_division_ok(m, ctx.c))

    for c in ctx.root_exponents:
        setup = root_setup(n, c, ctx.c, d)
        if not setup.available:
            setup.min_n = _first_n(n, lambda m: root_setup(m, c, ctx.c, d).available)
        ctx.roots[c] = setup
        ctx.consts["B"][f"KPOW{c}"] = to_digits(setup.k ** c, b, w)
        ctx.consts["B"][f"ROOT_T{c}"] = to_digits(setup.table_size, b, w)
        ctx.flags[f"root{c}_guard"] = setup.guard
        ctx.flags[f"root{c}_mode"] = setup.mode
        if setup.mode != ROOT_NEWTON:
            logger.warning("N=%d 时 K=%d 不满足开 %d 次方的常数守卫，改用 %s 方式",
                           n, setup.k, c, setup.mode)

    ctx.flags["gen_root"] = ctx.b_root <= ctx.bound
    ctx.flags["gen_root_min_n"] = n if ctx.flags["gen_root"] else _first_n(
        n, lambda m: max(iroot_ceil(m, 4) ** 3, iroot_ceil(m, d + 1) ** d + 1) <= ctx.c * m)
    ctx.flags["division2"] = ctx.k7 ** 4 <= ctx.bound
    ctx.flags["division2_min_n"] = _first_n(n, lambda m: iroot_ceil(m, 7) ** 4 <= ctx.c * m)


# ---------------------------------------------------------------------------
# 构建
# ---------------------------------------------------------------------------

def linear_budget(ctx: PreprocContext) -> int:
    """预处理步数的保护上界"""
    return 64 * ctx.c * ctx.d * ctx.n + 2 ** 16


def build_context(n: int, c: int = 8, d: int = 3,
                  root_exponents: Sequence[int] = (2, 3),
                  families: Optional[Sequence[str]] = None) -> PreprocContext:
    """
    构建预处理上下文

    Args:
        n: 输入规模 N（≥ 2）
        c: 寄存器上界倍数
        d: 多项式次数，操作数 < N^d
        root_exponents: 需要开 c 次方表的指数
        families: 只构建这些表族（及其依赖）；None 表示全部

    Returns:
        PreprocContext
    """
    if n < 2:
        raise ConfigError(f"N 必须 ≥ 2，当前为 {n}")
    if c < 2 or d < 1:
        raise ConfigError(f"需要 c ≥ 2 且 d ≥ 1，当前 c={c}, d={d}")
    wanted = family_closure(families if families is not None else FAMILIES)
    ctx = PreprocContext(n=n, c=c, d=d, root_exponents=tuple(root_exponents),
                         families=tuple(wanted))
    _setup_constants(ctx)

    started = time.time()
    budget = linear_budget(ctx)
    for family in wanted:
        meter = StepMeter()
        if family == "small_division" and not ctx.flags["small_division"]:
            logger.warning("N=%d, c=%d 时 β=%d 的小除数表超过 c·N，除法相关表族不可用",
                           n, c, ctx.beta)
        elif family == "cth_root":
            for exp in ctx.root_exponents:
                if ctx.roots[exp].available:
                    build_cth_root(ctx, meter, exp)
                else:
                    logger.warning("N=%d 时开 %d 次方的根表大小 %d 超过 c·N，需要 N ≥ %d",
                                   n, exp, ctx.roots[exp].table_size, ctx.roots[exp].min_n)
        elif family == "gen_root" and not ctx.flags["gen_root"]:
            logger.warning("N=%d 时稠密根表大小 %d 超过 c·N，广义开方不可用", n, ctx.b_root)
        elif family == "division2" and not ctx.flags["division2"]:
            logger.warning("N=%d 时 K7=%d 太大，前缀除法不可用", n, ctx.k7)
        else:
            BUILDERS[family](ctx, meter)
        ctx.build_steps[family] = meter.steps
        logger.debug("表族 %s 构建完成: %d 步", family, meter.steps)

    total = ctx.preproc_steps
    if total > budget:
        raise BudgetExceeded(f"预处理步数 {total} 超过线性保护上界 {budget}（N={n}）",
                             steps=total, budget=budget)
    logger.info("上下文构建完成: N=%d, c=%d, d=%d, 表族 %d 个, %d 步, 用时 %.2fs",
                n, c, d, len(wanted), total, time.time() - started)
    return ctx


def context_from_config(n: int, config, families: Optional[Sequence[str]] = None) -> PreprocContext:
    """按 RamConfig 的 c、d、root_exponents 构建"""
    return build_context(n, c=config.c, d=config.d,
                         root_exponents=config.root_exponents, families=families)


# ---------------------------------------------------------------------------
# 序列化
# ---------------------------------------------------------------------------

def save_context(ctx: PreprocContext, path: Path):
    """保存为 JSON：头部 N,c,d + 全部表 + 构建步数"""
    data = {
        "version": CONTEXT_FORMAT_VERSION,
        "header": {"n": ctx.n, "c": ctx.c, "d": ctx.d,
                   "root_exponents": list(ctx.root_exponents)},
        "families": list(ctx.families),
        "tables": {name: {"shape": list(t.shape), "data": t.to_list()}
                   for name, t in ctx.tables.items()},
        "build_steps": ctx.build_steps,
        "flags": ctx.flags,
    }
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, ensure_ascii=False)


def load_context(path: Path) -> PreprocContext:
    """读取 save_context 的输出；常数由头部重新计算"""
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"无法读取上下文文件 {path}: {e}")
    if data.get("version") != CONTEXT_FORMAT_VERSION:
        raise ConfigError(f"上下文文件版本 {data.get('version')} 不受支持"
                          f"（期望 {CONTEXT_FORMAT_VERSION}）")
    header = data["header"]
    ctx = PreprocContext(n=header["n"], c=header["c"], d=header["d"],
                         root_exponents=tuple(header["root_exponents"]),
                         families=tuple(data["families"]))
    _setup_constants(ctx)
    for name, item in data["tables"].items():
        ctx.tables[name] = Table.from_list(name, item["shape"], item["data"], ctx.bound)
    ctx.build_steps = {k: int(v) for k, v in data["build_steps"].items()}
    ctx.flags.update(data.get("flags", {}))
    return ctx


__all__ = [
    "PreprocContext", "DivPlan", "RootSetup", "build_context", "context_from_config",
    "cth_root_constants", "save_context", "load_context", "linear_budget",
    "CONTEXT_FORMAT_VERSION", "FAMILY_DEPS", "root_setup",
    "ROOT_NEWTON", "ROOT_TABLE", "ROOT_BRACKET",
]
