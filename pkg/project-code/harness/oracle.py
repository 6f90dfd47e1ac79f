"""
🔍 与精确整数运算对照

把运算结果与登记表里的整数预言机逐个比较。穷举模式枚举定义域内的
全部参数（只适合小 N），随机模式按种子抽样。查询抛出的异常
同样计为不一致，并记录在报告里。
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional

from common.config import RamConfig
from common.errors import ConfigError

from arith_lib import context_from_config, get_op
from ca_compile import build_ca_tables, ca_op, demo_ca, simulate_op

from .generators import (
    CA_SWEEP_DEMO, cell_rng, exhaustive_args, is_skipped, random_args, random_operands,
)
from .sweep import CA_OP

logger = logging.getLogger(__name__)

MODES = ("exhaustive", "random")
# 报告里最多保留的反例个数
MAX_EXAMPLES = 20


@dataclass
class OracleReport:
    """一次对照的结果"""
    op: str
    n: int
    d: int
    mode: str
    checked: int = 0
    mismatches: int = 0
    skipped: int = 0
    examples: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.mismatches == 0

    def record(self, args, expected, actual):
        self.mismatches += 1
        if len(self.examples) < MAX_EXAMPLES:
            self.examples.append({"args": list(args), "expected": expected, "actual": actual})

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["ok"] = self.ok
        return data


def _normalize(value):
    """div_by_small 返回元组，JSON 里写成列表"""
    return list(value) if isinstance(value, tuple) else value


def _check_arith(report: OracleReport, op_name: str, ctx, mode: str, count: int,
                 seed: int, cap: Optional[int], root_exponents) -> OracleReport:
    op = get_op(op_name, root_exponents)
    if mode == "exhaustive":
        cases = exhaustive_args(op_name, ctx, cap)
    else:
        rng = cell_rng(seed, op_name, ctx.n)
        cases = (random_args(op_name, ctx, rng) for _ in range(count))

    for args in cases:
        if is_skipped(op_name, ctx, args):
            report.skipped += 1
            continue
        report.checked += 1
        expected = _normalize(op.oracle(ctx, *args))
        try:
            actual = _normalize(op.fn(ctx, *args))
        except Exception as e:  # 表被改坏时可能抛出任何异常
            report.record(args, expected, f"{type(e).__name__}: {e}")
            continue
        if actual != expected:
            report.record(args, expected, actual)
    return report


def _check_ca(report: OracleReport, n: int, d: int, count: int, seed: int,
              budget: int) -> OracleReport:
    ca = demo_ca(CA_SWEEP_DEMO)
    tables = build_ca_tables(ca, n, d, budget)
    rng = cell_rng(seed, CA_OP, n)
    for _ in range(count):
        operands = random_operands(tables, rng)
        report.checked += 1
        expected = simulate_op(ca, n, operands, d)
        try:
            actual = ca_op(tables, *operands)
        except Exception as e:
            report.record(operands, expected, f"{type(e).__name__}: {e}")
            continue
        if actual != expected:
            report.record(operands, expected, actual)
    return report


def oracle_check(op_name: str, n: int, d: Optional[int] = None, mode: str = "random",
                 count: int = 1000, seed: int = 7, cap: Optional[int] = None,
                 config: Optional[RamConfig] = None, ctx=None) -> OracleReport:
    """
    运算与整数预言机对照

    Args:
        op_name: 运算名，或 "ca_op"（只支持随机模式，对照直接模拟的投影）
        n: 输入规模 N
        d: 多项式次数（默认取 config.d）
        mode: exhaustive 或 random
        count: 随机模式的样本数
        seed: 随机种子
        cap: 穷举时操作数的上限（默认 N^d）
        config: 运行配置
        ctx: 已构建的上下文（故障注入测试用），给出时忽略 n、d

    Returns:
        OracleReport
    """
    if mode not in MODES:
        raise ConfigError(f"未知的对照模式: {mode}（可用: {', '.join(MODES)}）")
    config = config or RamConfig()
    d = d if d is not None else config.d

    if op_name == CA_OP:
        if mode == "exhaustive":
            raise ConfigError("ca_op 只支持随机对照")
        report = _check_ca(OracleReport(CA_OP, n, d, mode), n, d, count, seed,
                           config.ca_table_budget)
    else:
        op = get_op(op_name, config.root_exponents)
        if ctx is None:
            ctx = context_from_config(n, config.with_overrides(d=d), families=op.families)
        report = OracleReport(op_name, ctx.n, ctx.d, mode)
        _check_arith(report, op_name, ctx, mode, count, seed, cap, config.root_exponents)

    if report.ok:
        logger.info("%s 对照 %d 组参数，全部一致", op_name, report.checked)
    else:
        logger.warning("%s 对照 %d 组参数，%d 组不一致", op_name, report.checked, report.mismatches)
    return report


__all__ = ["MODES", "OracleReport", "oracle_check"]
