"""
🔍 忠实仿真检查

两个程序在同一输入上锁步执行：源程序每执行一条指令，目标程序执行对应的
整个指令块。在每个块的结束处检查：
- 块内步数 ≤ k
- 目标 pc 落在源 pc 对应块的起点
- 输出序列一致
- 每个被写过的源位置与其映射位置的值相等
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence

from common.errors import RamError
from common.meter import StepMeter
from ram_core.instructions import Program
from ram_core.machine import DEFAULT_C, RamInput, initial_config, step
from .emap import EmulationMap, config_locs, read_loc

logger = logging.getLogger(__name__)


@dataclass
class Counterexample:
    """第一个违反忠实仿真的位置"""
    input_index: int
    source_step: int
    source_pc: int
    reason: str
    location: Optional[str] = None
    expected: Optional[int] = None
    actual: Optional[int] = None


@dataclass
class FaithfulVerdict:
    ok: bool
    checked: int
    k: int
    max_block_steps: int = 0
    source_steps: int = 0
    target_steps: int = 0
    counterexample: Optional[Counterexample] = None

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["verdict"] = "ok" if self.ok else "counterexample"
        return data


@dataclass
class _Trace:
    counterexample: Optional[Counterexample]
    source_steps: int
    target_steps: int
    max_block_steps: int


def _lockstep(m1: Program, m2: Program, emap: EmulationMap, inp: RamInput, index: int,
              c: int, max_steps: int) -> _Trace:
    cfg1, cfg2 = initial_config(m1), initial_config(m2)
    cfg2.pc = emap.start(0)
    meter1, meter2 = StepMeter(), StepMeter()
    out1: List[int] = []
    out2: List[int] = []
    c2 = emap.target_c(c)
    widest = 0

    def fail(reason: str, **extra) -> _Trace:
        cx = Counterexample(index, meter1.steps, cfg1.pc, reason, **extra)
        return _Trace(cx, meter1.steps, meter2.steps, widest)

    while cfg1.pc < m1.r:
        if meter1.steps >= max_steps:
            return fail(f"源程序 {max_steps} 步内未停机")
        s, e = emap.block(cfg1.pc)
        if cfg2.pc != s:
            return fail("目标 pc 不在块起点", expected=s, actual=cfg2.pc)
        try:
            _, o = step(cfg1, m1, inp, meter1, c)
        except RamError as err:
            return fail(f"源程序出错: {err}")
        if o is not None:
            out1.append(o)

        taken = 0
        while cfg2.pc < m2.r:
            try:
                _, o = step(cfg2, m2, inp, meter2, c2)
            except RamError as err:
                return fail(f"目标程序出错: {err}")
            taken += 1
            if o is not None:
                out2.append(o)
            if not s < cfg2.pc < e or taken > emap.k:
                break
        widest = max(widest, taken)
        if taken > emap.k:
            return fail(f"块内执行 {taken} 步，超过 k={emap.k}")

        expected_pc = emap.start(cfg1.pc)
        if cfg2.pc != expected_pc:
            return fail("控制流不一致", expected=expected_pc, actual=cfg2.pc)
        if out1 != out2:
            return fail("输出序列不一致")
        for loc, value in config_locs(cfg1).items():
            actual = read_loc(cfg2, emap.map_loc(loc))
            if actual != value:
                return fail("寄存器值不一致", location=f"{loc[0]}[{loc[1]}]",
                            expected=value, actual=actual)

    if meter2.steps > emap.k * meter1.steps:
        return fail(f"目标步数 {meter2.steps} 超过 k·源步数 = {emap.k * meter1.steps}")
    return _Trace(None, meter1.steps, meter2.steps, widest)


def check_faithful(m1: Program, m2: Program, emap: EmulationMap, inputs: Sequence[RamInput],
                   c: int = DEFAULT_C, max_steps: int = 10 ** 6, workers: int = 1) -> FaithfulVerdict:
    """
    检查 m2 是否通过 emap 忠实仿真 m1

    Args:
        m1: 源程序
        m2: 目标程序
        emap: 仿真映射
        inputs: 样本输入
        c: 源程序的上界倍数（目标使用 emap.target_c(c)）
        max_steps: 源程序步数上限
        workers: 并行检查的线程数

    Returns:
        FaithfulVerdict；失败时带第一个反例（按输入顺序）
    """
    def one(item):
        index, inp = item
        return _lockstep(m1, m2, emap, inp, index, c, max_steps)

    items = list(enumerate(inputs))
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(one, items))
    else:
        traces = [one(item) for item in items]

    verdict = FaithfulVerdict(True, 0, emap.k)
    for trace in traces:
        verdict.checked += 1
        verdict.source_steps += trace.source_steps
        verdict.target_steps += trace.target_steps
        verdict.max_block_steps = max(verdict.max_block_steps, trace.max_block_steps)
        if trace.counterexample is not None:
            verdict.ok = False
            verdict.counterexample = trace.counterexample
            logger.debug("忠实仿真反例: %s", trace.counterexample)
            break
    return verdict
