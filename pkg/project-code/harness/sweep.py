"""
📈 步数扫描：预处理是否线性、查询是否常数

对一组 N 各构建一次上下文，跑若干个随机查询，记录预处理步数与查询步数。
每个 N 是独立的格子，可以放进进程池并行；汇总按 N 的顺序进行。

判定规则：
- 常数查询：最大 N 上的最大查询步数 ≤ 最小 N 上的最大查询步数
  （ca_op 另外要求每个 N 上都不超过编译器给出的静态上界）
- 线性预处理：相邻两个 N、2N（N ≥ 2^10）的构建步数之比 ≤ 2.5，
  对运算所需的每个表族分别检查
"""

import concurrent.futures
import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from common.config import RamConfig
from common.errors import BuildTooSmall, ConfigError, RamError

from arith_lib import context_from_config, family_closure, get_op
from ca_compile import build_ca_tables, ca_op, demo_ca, query_step_bound

from .generators import CA_SWEEP_DEMO, cell_rng, is_skipped, random_args, random_operands

logger = logging.getLogger(__name__)

CA_OP = "ca_op"
LINEAR_RATIO = 2.5
LINEAR_FROM = 2 ** 10


@dataclass
class SweepCell:
    """一个 N 上的测量结果"""
    n: int
    preproc_steps: int = 0
    family_steps: Dict[str, int] = field(default_factory=dict)
    query_steps_max: int = 0
    query_steps_mean: float = 0.0
    samples: int = 0
    skipped_args: int = 0
    built: bool = True
    reason: str = ""


@dataclass
class SweepResult:
    """一次扫描的汇总"""
    op: str
    seed: int
    n_values: List[int] = field(default_factory=list)
    preproc_steps: Dict[int, int] = field(default_factory=dict)
    family_steps: Dict[int, Dict[str, int]] = field(default_factory=dict)
    query_steps_max: Dict[int, int] = field(default_factory=dict)
    query_steps_mean: Dict[int, float] = field(default_factory=dict)
    samples: int = 0
    skipped_args: int = 0
    skipped_n: List[int] = field(default_factory=list)
    query_bound: Optional[int] = None
    verdict_linear_preproc: bool = True
    verdict_constant_query: bool = True
    notes: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.verdict_linear_preproc and self.verdict_constant_query

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        # JSON 的键只能是字符串
        for key in ("preproc_steps", "family_steps", "query_steps_max", "query_steps_mean"):
            data[key] = {str(n): v for n, v in data[key].items()}
        data["ok"] = self.ok
        return data


def _measure(cell: SweepCell, steps: List[int]):
    cell.samples = len(steps)
    if steps:
        cell.query_steps_max = max(steps)
        cell.query_steps_mean = round(sum(steps) / len(steps), 3)


def _arith_cell(op_name: str, n: int, samples: int, seed: int, config: RamConfig) -> SweepCell:
    op = get_op(op_name, config.root_exponents)
    cell = SweepCell(n=n)
    try:
        ctx = context_from_config(n, config, families=op.families)
        ctx.require(*op.families)
    except BuildTooSmall as e:
        return SweepCell(n=n, built=False, reason=str(e))
    cell.preproc_steps = ctx.steps_for(op.families)
    cell.family_steps = {f: ctx.build_steps.get(f, 0) for f in family_closure(op.families)}

    rng = cell_rng(seed, op_name, n)
    steps: List[int] = []
    for i in range(samples):
        args = random_args(op_name, ctx, rng)
        if is_skipped(op_name, ctx, args):
            cell.skipped_args += 1
            continue
        meter = ctx.query_meter()
        try:
            op.fn(ctx, *args, meter=meter)
        except BuildTooSmall as e:
            return SweepCell(n=n, built=False, reason=str(e))
        except RamError as e:
            e.context.update(n=n, sample=i, args=list(args))
            raise
        steps.append(meter.steps)
    _measure(cell, steps)
    return cell


def _ca_cell(n: int, samples: int, seed: int, config: RamConfig) -> SweepCell:
    ca = demo_ca(CA_SWEEP_DEMO)
    try:
        tables = build_ca_tables(ca, n, config.d, config.ca_table_budget)
    except BuildTooSmall as e:
        return SweepCell(n=n, built=False, reason=str(e))
    cell = SweepCell(n=n, preproc_steps=tables.preproc_steps, family_steps=dict(tables.build_steps))
    rng = cell_rng(seed, CA_OP, n)
    steps: List[int] = []
    for i in range(samples):
        operands = random_operands(tables, rng)
        meter = tables.query_meter()
        try:
            ca_op(tables, *operands, meter=meter)
        except RamError as e:
            e.context.update(n=n, sample=i, args=list(operands))
            raise
        steps.append(meter.steps)
    _measure(cell, steps)
    return cell


def sweep_cell(op_name: str, n: int, samples: int, seed: int, config: RamConfig) -> SweepCell:
    """单个 N 的测量（进程池的工作函数）"""
    if op_name == CA_OP:
        return _ca_cell(n, samples, seed, config)
    return _arith_cell(op_name, n, samples, seed, config)


def _run_cells(op_name: str, n_set: Sequence[int], samples: int, seed: int,
               config: RamConfig) -> List[SweepCell]:
    if config.workers <= 1 or len(n_set) <= 1:
        return [sweep_cell(op_name, n, samples, seed, config) for n in n_set]
    workers = min(config.workers, len(n_set))
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(sweep_cell, op_name, n, samples, seed, config) for n in n_set]
        return [f.result() for f in futures]


def linear_ok(steps: Dict[int, int], ratio: float = LINEAR_RATIO,
              from_n: int = LINEAR_FROM) -> bool:
    """相邻 N、2N（N ≥ from_n）的步数之比都 ≤ ratio"""
    for n, value in steps.items():
        if n < from_n or 2 * n not in steps or value == 0:
            continue
        if steps[2 * n] > ratio * value:
            return False
    return True


def constant_ok(query_max: Dict[int, int]) -> bool:
    if not query_max:
        return True
    ns = sorted(query_max)
    return query_max[ns[-1]] <= query_max[ns[0]]


def _verdicts(result: SweepResult):
    measured = sorted(result.query_steps_max)
    if len(measured) < 2:
        note = f"只有 {len(measured)} 个可用的 N，判定平凡成立"
        logger.warning("%s: %s", result.op, note)
        result.notes.append(note)
        return

    result.verdict_constant_query = constant_ok(result.query_steps_max)
    if result.query_bound is not None:
        over = [n for n in measured if result.query_steps_max[n] > result.query_bound]
        if over:
            result.verdict_constant_query = False
            result.notes.append(f"N={over} 的查询步数超过静态上界 {result.query_bound}")

    families = sorted({f for steps in result.family_steps.values() for f in steps})
    for family in families:
        per_n = {n: result.family_steps[n].get(family, 0) for n in measured}
        if not linear_ok(per_n):
            result.verdict_linear_preproc = False
            result.notes.append(f"表族 {family} 的构建步数增长超过 {LINEAR_RATIO} 倍")
    if not linear_ok(result.preproc_steps):
        result.verdict_linear_preproc = False


def sweep(op_name: str, n_set: Sequence[int], samples: int = 1000, seed: int = 7,
          config: Optional[RamConfig] = None) -> SweepResult:
    """
    对一个运算做 N 扫描

    Args:
        op_name: 登记表里的运算名，或 "ca_op"（complement 演示自动机）
        n_set: 升序的 N 集合
        samples: 每个 N 的随机查询数
        seed: 随机种子（相同种子得到相同结果）
        config: 运行配置（c、d、开方指数、进程数、CA 表预算）

    Returns:
        SweepResult
    """
    config = config or RamConfig()
    ns = sorted(set(n_set))
    if list(n_set) != ns:
        logger.warning("N 集合不是严格升序，已排序去重: %s", ns)
    if op_name != CA_OP:
        get_op(op_name, config.root_exponents)

    started = time.time()
    logger.info("扫描 %s: N ∈ %s，每个 N %d 个样本，种子 %d", op_name, ns, samples, seed)
    cells = _run_cells(op_name, ns, samples, seed, config)

    result = SweepResult(op=op_name, seed=seed)
    if op_name == CA_OP:
        result.query_bound = query_step_bound(demo_ca(CA_SWEEP_DEMO), config.d)
    for cell in cells:
        if not cell.built:
            result.skipped_n.append(cell.n)
            logger.warning("跳过 N=%d: %s", cell.n, cell.reason)
            continue
        result.n_values.append(cell.n)
        result.preproc_steps[cell.n] = cell.preproc_steps
        result.family_steps[cell.n] = cell.family_steps
        result.samples += cell.samples
        result.skipped_args += cell.skipped_args
        if cell.samples:
            result.query_steps_max[cell.n] = cell.query_steps_max
            result.query_steps_mean[cell.n] = cell.query_steps_mean
    if result.skipped_args:
        logger.info("%s 跳过了 %d 个禁用形式的参数", op_name, result.skipped_args)

    _verdicts(result)
    logger.info("扫描 %s 完成: 常数查询=%s，线性预处理=%s，用时 %.2fs",
                op_name, result.verdict_constant_query, result.verdict_linear_preproc,
                time.time() - started)
    return result


def parse_n_set(text: str) -> List[int]:
    """
    解析 N 集合

    - "128..65536"  按 2 倍几何级数
    - "64,128,1000" 逗号分隔
    """
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(part) for part in text.split("..", 1))
            if lo < 2 or hi < lo:
                raise ValueError(f"区间 {lo}..{hi} 非法")
            ns, n = [], lo
            while n <= hi:
                ns.append(n)
                n *= 2
            return ns
        return sorted({int(part) for part in text.split(",") if part.strip()})
    except ValueError as e:
        raise ConfigError(f"无法解析 N 集合 {text!r}: {e}")


__all__ = [
    "CA_OP", "LINEAR_RATIO", "LINEAR_FROM", "SweepCell", "SweepResult",
    "sweep", "sweep_cell", "linear_ok", "constant_ok", "parse_n_set",
]
