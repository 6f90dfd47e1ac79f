"""
⚙️ 三种指令集的解释器

单位代价：每执行一条指令计 1 步。所有寄存器写入都检查 ≤ c·N。
"""

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from common.errors import (
    DomainError, HaltReached, RamError, StepBudgetExceeded, ValueBoundExceeded,
)
from common.meter import StepMeter
from .instructions import (
    OPS, ArrayElem, Const, InputElem, Instr, InstrSet, JzeroExpr, OpExpr,
    OutputExpr, Program, SetElem, SetVar, SizeN, Var,
)

DEFAULT_C = 8
DEFAULT_MAX_STEPS = 10 ** 9


@dataclass(frozen=True)
class RamInput:
    """输入 (N, I[0..N-1])；cells 恰好 N 个"""
    n: int
    cells: Tuple[int, ...]

    def __post_init__(self):
        if self.n <= 0:
            raise DomainError(f"N 必须为正整数，当前为 {self.n}")
        if len(self.cells) != self.n:
            raise DomainError(f"输入长度 {len(self.cells)} 与 N={self.n} 不符")
        if any(x < 0 for x in self.cells):
            raise DomainError("输入寄存器不能为负")

    def validate(self, c: int):
        """检查 0 ≤ I[j] ≤ c·N"""
        bound = c * self.n
        for j, x in enumerate(self.cells):
            if x > bound:
                raise ValueBoundExceeded(f"输入 I[{j}]={x} 超过上界 c·N={bound}")

    def read(self, j: int) -> int:
        """I[j]；j ≥ N 时读到 0"""
        return self.cells[j] if 0 <= j < len(self.cells) else 0

    @classmethod
    def size_only(cls, n: int) -> "RamInput":
        """只给出 N 的输入：I[0..N-1] 全为 0"""
        return cls(n, (0,) * n)

    @classmethod
    def parse(cls, text: str) -> "RamInput":
        """第一行 N，第二行 I[0..N-1]"""
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise DomainError("输入文件为空")
        try:
            n = int(lines[0])
            cells = tuple(int(x) for x in lines[1].split()) if len(lines) > 1 else ()
        except ValueError as e:
            raise DomainError(f"输入文件格式错误: {e}")
        return cls(n, cells)

    def to_text(self) -> str:
        return f"{self.n}\n{' '.join(str(x) for x in self.cells)}\n"


@dataclass
class ConfigurationAB:
    a: int = 0
    b: int = 0
    pc: int = 0
    memory: Dict[int, int] = field(default_factory=dict)


@dataclass
class ConfigurationR:
    pc: int = 0
    memory: Dict[int, int] = field(default_factory=dict)


@dataclass
class ConfigurationArray:
    pc: int = 0
    variables: Dict[int, int] = field(default_factory=dict)
    arrays: Dict[int, Dict[int, int]] = field(default_factory=dict)

    def elem(self, array: int, index: int) -> int:
        return self.arrays.get(array, {}).get(index, 0)


Configuration = Union[ConfigurationAB, ConfigurationR, ConfigurationArray]


def initial_config(program: Program) -> Configuration:
    """全零初始格局"""
    if program.iset is InstrSet.AB:
        return ConfigurationAB()
    if program.iset is InstrSet.R:
        return ConfigurationR()
    return ConfigurationArray()


@dataclass
class RunResult:
    outputs: List[int]
    steps: int
    halted: bool
    final_config: Optional[Configuration] = None

    def to_dict(self) -> dict:
        return {"outputs": list(self.outputs), "steps": self.steps, "halted": self.halted}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)


class _Word:
    """c·N 上界检查"""

    def __init__(self, bound: int):
        self.bound = bound

    def __call__(self, value: int) -> int:
        if value > self.bound:
            raise ValueBoundExceeded(f"值 {value} 超过上界 c·N={self.bound}")
        return value


def _apply_op(name: str, args: Sequence[int], program: Program, word: _Word) -> int:
    if name not in program.op_set:
        raise DomainError(f"运算 {name} 不在程序的运算集合中")
    return word(OPS[name].fn(*args))


def _step_ab(cfg: ConfigurationAB, ins: Instr, program: Program, inp: RamInput, word: _Word):
    op = ins.op
    out = None
    nxt = cfg.pc + 1
    if op == "CST":
        cfg.a = word(ins.args[0])
    elif op == "Buffer":
        cfg.b = cfg.a
    elif op == "Store":
        cfg.memory[cfg.a] = cfg.b
    elif op == "Load":
        cfg.a = cfg.memory.get(cfg.a, 0)
    elif op == "Jzero":
        nxt = ins.args[0] if cfg.a == 0 else ins.args[1]
    elif op == "getN":
        cfg.a = inp.n
    elif op == "Input":
        cfg.a = inp.read(cfg.a)
    elif op == "Output":
        out = cfg.a
    else:
        spec = OPS[op]
        args = (cfg.a, cfg.b)[:spec.arity]
        cfg.a = _apply_op(op, args, program, word)
    cfg.pc = nxt
    return out


def _step_r(cfg: ConfigurationR, ins: Instr, program: Program, inp: RamInput, word: _Word):
    op = ins.op
    mem = cfg.memory
    a = ins.args
    out = None
    nxt = cfg.pc + 1
    if op == "CST":
        mem[a[0]] = word(a[1])
    elif op == "Move":
        mem[a[0]] = mem.get(a[1], 0)
    elif op == "Store":
        mem[mem.get(a[0], 0)] = mem.get(a[1], 0)
    elif op == "Load":
        mem[a[0]] = mem.get(mem.get(a[1], 0), 0)
    elif op == "Jzero":
        nxt = a[1] if mem.get(a[0], 0) == 0 else a[2]
    elif op == "getN":
        mem[a[0]] = inp.n
    elif op == "Input":
        mem[a[0]] = inp.read(mem.get(a[1], 0))
    elif op == "Output":
        out = mem.get(a[0], 0)
    else:
        spec = OPS[op]
        mem[0] = _apply_op(op, [mem.get(i, 0) for i in range(spec.arity)], program, word)
    cfg.pc = nxt
    return out


def eval_expr(expr, cfg: ConfigurationArray, program: Program, inp: RamInput, word: _Word) -> int:
    """计算数组指令集的表达式"""
    if isinstance(expr, Const):
        return word(expr.value)
    if isinstance(expr, SizeN):
        return inp.n
    if isinstance(expr, Var):
        return cfg.variables.get(expr.index, 0)
    if isinstance(expr, ArrayElem):
        return cfg.elem(expr.array, eval_expr(expr.index, cfg, program, inp, word))
    if isinstance(expr, InputElem):
        return inp.read(eval_expr(expr.index, cfg, program, inp, word))
    if isinstance(expr, OpExpr):
        args = [eval_expr(e, cfg, program, inp, word) for e in expr.args]
        return _apply_op(expr.name, args, program, word)
    raise DomainError(f"未知表达式 {expr!r}")


def _step_array(cfg: ConfigurationArray, ins, program: Program, inp: RamInput, word: _Word):
    out = None
    nxt = cfg.pc + 1
    if isinstance(ins, SetVar):
        cfg.variables[ins.var] = eval_expr(ins.value, cfg, program, inp, word)
    elif isinstance(ins, SetElem):
        index = eval_expr(ins.index, cfg, program, inp, word)
        value = eval_expr(ins.value, cfg, program, inp, word)
        cfg.arrays.setdefault(ins.array, {})[index] = value
    elif isinstance(ins, JzeroExpr):
        nxt = ins.l0 if eval_expr(ins.cond, cfg, program, inp, word) == 0 else ins.l1
    elif isinstance(ins, OutputExpr):
        out = eval_expr(ins.value, cfg, program, inp, word)
    cfg.pc = nxt
    return out


_STEPPERS = {
    InstrSet.AB: _step_ab,
    InstrSet.R: _step_r,
    InstrSet.ARRAY: _step_array,
}


def step(config: Configuration, program: Program, inp: RamInput, meter: StepMeter,
         c: int = DEFAULT_C) -> Tuple[Configuration, Optional[int]]:
    """
    执行 pc 处的一条指令（原地修改格局）

    Returns:
        (格局, 输出值或 None)

    Raises:
        HaltReached: pc = r
        ValueBoundExceeded: 写入值超过 c·N
    """
    if config.pc >= program.r:
        raise HaltReached("程序已停机", pc=config.pc)
    word = _Word(c * inp.n)
    pc = config.pc
    try:
        out = _STEPPERS[program.iset](config, program.instructions[pc], program, inp, word)
    except RamError as e:
        config.pc = pc
        raise e.with_pc(pc)
    meter.tick("instr")
    return config, out


def run(program: Program, inp: RamInput, c: int = DEFAULT_C, max_steps: int = DEFAULT_MAX_STEPS,
        config: Optional[Configuration] = None, meter: Optional[StepMeter] = None) -> RunResult:
    """
    从初始格局运行到停机

    Args:
        program: 程序
        inp: 输入
        c: 上界倍数
        max_steps: 步数上限
        config: 可选的起始格局（默认全零）
        meter: 可选的计步器

    Raises:
        StepBudgetExceeded: 超过 max_steps 仍未停机
    """
    inp.validate(c)
    cfg = config if config is not None else initial_config(program)
    meter = meter if meter is not None else StepMeter()
    start = meter.steps
    outputs: List[int] = []
    r = program.r
    while cfg.pc < r:
        if meter.steps - start >= max_steps:
            raise StepBudgetExceeded(f"执行超过 {max_steps} 步仍未停机", pc=cfg.pc)
        _, out = step(cfg, program, inp, meter, c)
        if out is not None:
            outputs.append(out)
    return RunResult(outputs, meter.steps - start, cfg.pc == r, cfg)
