"""
🔁 指令集之间的三个翻译

- AB -> 数组：A、B 变成变量 C0、C1，内存 R 变成数组 T0，逐条翻译
- R -> AB：每条 R 指令展开成固定的 AB 指令序列（二元运算 9 条）
- 数组 -> R：寄存器布局为 k 个暂存 + v 个变量 + t 个交错数组，
  T_j[x] 存放在 R[k+v+t·x+j]，每次数组访问展开为 t+3 条指令
"""

import logging
from typing import List, Tuple

from common.errors import UnsupportedConstruct
from ram_core.instructions import (
    OPS, ArrayElem, Const, InputElem, Instr, InstrSet, JzeroExpr, OpExpr,
    OutputExpr, Program, SetElem, SetVar, SizeN, Var, expr_children, instr_exprs,
)
from .emap import EmulationMap, LocRule

logger = logging.getLogger(__name__)

# R -> AB 的静态扩张常数（二元运算的 9 条指令）
R_TO_AB_K = 9


def _assemble(pieces: List[List], iset: InstrSet, op_set) -> Tuple[Program, Tuple[Tuple[int, int], ...], int]:
    """
    拼接各源指令的展开块，并把跳转目标（源下标）改写为目标下标

    pieces[i] 是第 i 条源指令的展开；其中跳转指令的目标仍是源下标。
    """
    blocks = []
    pos = 0
    for piece in pieces:
        blocks.append((pos, pos + len(piece)))
        pos += len(piece)
    halt = pos

    def start(src: int) -> int:
        return blocks[src][0] if src < len(blocks) else halt

    out = []
    for piece in pieces:
        for ins in piece:
            if isinstance(ins, (Instr, JzeroExpr)) and ins.is_jump():
                l0, l1 = ins.targets()
                ins = ins.with_targets(start(l0), start(l1))
            out.append(ins)
    return Program(iset, tuple(out), op_set), tuple(blocks), halt


# ---------------------------------------------------------------------------
# AB -> 数组
# ---------------------------------------------------------------------------

_A, _B = Var(0), Var(1)


def _ab_to_array(ins: Instr):
    op = ins.op
    if op == "CST":
        return SetVar(0, Const(ins.args[0]))
    if op == "Buffer":
        return SetVar(1, _A)
    if op == "Store":
        return SetElem(0, _A, _B)
    if op == "Load":
        return SetVar(0, ArrayElem(0, _A))
    if op == "Jzero":
        return JzeroExpr(_A, ins.args[0], ins.args[1])
    if op == "getN":
        return SetVar(0, SizeN())
    if op == "Input":
        return SetVar(0, InputElem(_A))
    if op == "Output":
        return OutputExpr(_A)
    arity = OPS[op].arity
    return SetVar(0, OpExpr(op, (_A, _B)[:arity]))


def lower_ab_to_array(program: Program) -> Tuple[Program, EmulationMap]:
    """AB 程序 -> 数组程序（逐条翻译，k=1）"""
    if program.iset is not InstrSet.AB:
        raise UnsupportedConstruct(f"需要 AB 程序，收到 {program.iset.value}")
    pieces = [[_ab_to_array(ins)] for ins in program.instructions]
    target, blocks, halt = _assemble(pieces, InstrSet.ARRAY, program.op_set)
    reg_map = {"A": LocRule("C", 0), "B": LocRule("C", 1), "R": LocRule("T0")}
    return target, EmulationMap(blocks, halt, reg_map, k=1)


# ---------------------------------------------------------------------------
# R -> AB
# ---------------------------------------------------------------------------

def _store_a_into(i: int) -> List[Instr]:
    """R[i] <- A"""
    return [Instr("Buffer"), Instr("CST", (i,)), Instr("Store")]


def _r_to_ab(ins: Instr) -> List[Instr]:
    op, a = ins.op, ins.args
    if op == "CST":
        return [Instr("CST", (a[1],))] + _store_a_into(a[0])
    if op == "Move":
        return [Instr("CST", (a[1],)), Instr("Load")] + _store_a_into(a[0])
    if op == "Load":
        return [Instr("CST", (a[1],)), Instr("Load"), Instr("Load")] + _store_a_into(a[0])
    if op == "Store":
        return [Instr("CST", (a[1],)), Instr("Load"), Instr("Buffer"),
                Instr("CST", (a[0],)), Instr("Load"), Instr("Store")]
    if op == "getN":
        return [Instr("getN")] + _store_a_into(a[0])
    if op == "Input":
        return [Instr("CST", (a[1],)), Instr("Load"), Instr("Input")] + _store_a_into(a[0])
    if op == "Output":
        return [Instr("CST", (a[0],)), Instr("Load"), Instr("Output")]
    if op == "Jzero":
        return [Instr("CST", (a[0],)), Instr("Load"), Instr("Jzero", (a[1], a[2]))]
    arity = OPS[op].arity
    if arity == 2:
        return [Instr("CST", (1,)), Instr("Load"), Instr("Buffer"),
                Instr("CST", (0,)), Instr("Load"), Instr(op)] + _store_a_into(0)
    if arity == 1:
        return [Instr("CST", (0,)), Instr("Load"), Instr(op)] + _store_a_into(0)
    raise UnsupportedConstruct(f"AB 指令集无法表达 {arity} 元运算 {op}")


def _register_literals(program: Program) -> int:
    """R 程序中作为寄存器编号出现的最大常数"""
    largest = 0
    for ins in program.instructions:
        regs = ins.args[:1] if ins.op in ("CST", "getN", "Output", "Jzero") else ins.args
        largest = max([largest, *regs])
    return largest


def lower_r_to_ab(program: Program) -> Tuple[Program, EmulationMap]:
    """R 程序 -> AB 程序（R 寄存器原样放在 AB 的内存中）"""
    if program.iset is not InstrSet.R:
        raise UnsupportedConstruct(f"需要 R 程序，收到 {program.iset.value}")
    pieces = [_r_to_ab(ins) for ins in program.instructions]
    target, blocks, halt = _assemble(pieces, InstrSet.AB, program.op_set)
    emap = EmulationMap(blocks, halt, {"R": LocRule("R")}, k=R_TO_AB_K,
                        c_add=_register_literals(program))
    logger.debug("R->AB: %d 条指令展开为 %d 条", len(program), len(target))
    return target, emap


# ---------------------------------------------------------------------------
# 数组 -> R
# ---------------------------------------------------------------------------

class _Flattener:
    """把一条数组指令拆成只含原子操作数的简单步骤，必要时引入临时变量"""

    def __init__(self, first_temp: int):
        self.first_temp = first_temp
        self.used = 0
        self.steps: List[tuple] = []

    def temp(self) -> int:
        index = self.first_temp + self.used
        self.used += 1
        return index

    def atom(self, expr) -> int:
        if isinstance(expr, Var):
            return expr.index
        h = self.temp()
        self.into(h, expr)
        return h

    def into(self, h: int, expr):
        if isinstance(expr, Var):
            self.steps.append(("move", h, expr.index))
        elif isinstance(expr, Const):
            self.steps.append(("const", h, expr.value))
        elif isinstance(expr, SizeN):
            self.steps.append(("size", h))
        elif isinstance(expr, ArrayElem):
            self.steps.append(("read", h, expr.array, self.atom(expr.index)))
        elif isinstance(expr, InputElem):
            self.steps.append(("input", h, self.atom(expr.index)))
        elif isinstance(expr, OpExpr):
            args = tuple(self.atom(a) for a in expr.args)
            self.steps.append(("op", h, expr.name, args))
        else:
            raise UnsupportedConstruct(f"未知表达式 {expr!r}")

    def instruction(self, ins) -> List[tuple]:
        if isinstance(ins, SetVar):
            self.into(ins.var, ins.value)
        elif isinstance(ins, SetElem):
            i = self.atom(ins.index)
            h = self.atom(ins.value)
            self.steps.append(("write", ins.array, i, h))
        elif isinstance(ins, JzeroExpr):
            self.steps.append(("jz", self.atom(ins.cond), ins.l0, ins.l1))
        elif isinstance(ins, OutputExpr):
            self.steps.append(("out", self.atom(ins.value)))
        return self.steps


def _array_shape(program: Program) -> Tuple[int, int]:
    """(变量个数 v, 数组个数 t)"""
    v = t = 0

    def visit(expr):
        nonlocal v, t
        if isinstance(expr, Var):
            v = max(v, expr.index + 1)
        if isinstance(expr, ArrayElem):
            t = max(t, expr.array + 1)
        for child in expr_children(expr):
            visit(child)

    for ins in program.instructions:
        if isinstance(ins, SetVar):
            v = max(v, ins.var + 1)
        if isinstance(ins, SetElem):
            t = max(t, ins.array + 1)
        for e in instr_exprs(ins):
            visit(e)
    return v, t


def lower_array_to_r(program: Program) -> Tuple[Program, EmulationMap]:
    """
    数组程序 -> R 程序

    暂存寄存器个数 k = 最大运算元数 + 1；变量 C_i 放在 R[k+i]；
    T_j[x] 放在 R[k+v+t·x+j]。
    """
    if program.iset is not InstrSet.ARRAY:
        raise UnsupportedConstruct(f"需要数组程序，收到 {program.iset.value}")
    if "add" not in program.op_set:
        raise UnsupportedConstruct("数组寻址需要加法运算")
    v_src, t = _array_shape(program)
    k = max(OPS[name].arity for name in program.op_set) + 1

    flat = []
    temps = 0
    for ins in program.instructions:
        flattener = _Flattener(v_src)
        flat.append(flattener.instruction(ins))
        temps = max(temps, flattener.used)
    v = v_src + temps

    def reg(var: int) -> int:
        return k + var

    def address(j: int, i: int) -> List[Instr]:
        return [Instr("Move", (1, reg(i))), Instr("CST", (0, k + v + j))] + [Instr("add")] * t

    pieces = []
    for steps in flat:
        piece: List[Instr] = []
        for s in steps:
            kind = s[0]
            if kind == "const":
                piece.append(Instr("CST", (reg(s[1]), s[2])))
            elif kind == "size":
                piece.append(Instr("getN", (reg(s[1]),)))
            elif kind == "move":
                piece.append(Instr("Move", (reg(s[1]), reg(s[2]))))
            elif kind == "read":
                piece += address(s[2], s[3]) + [Instr("Load", (reg(s[1]), 0))]
            elif kind == "input":
                piece.append(Instr("Input", (reg(s[1]), reg(s[2]))))
            elif kind == "op":
                piece += [Instr("Move", (p, reg(a))) for p, a in enumerate(s[3])]
                piece += [Instr(s[2]), Instr("Move", (reg(s[1]), 0))]
            elif kind == "write":
                piece += address(s[1], s[2]) + [Instr("Store", (0, reg(s[3])))]
            elif kind == "jz":
                piece.append(Instr("Jzero", (reg(s[1]), s[2], s[3])))
            elif kind == "out":
                piece.append(Instr("Output", (reg(s[1]),)))
        pieces.append(piece)

    target, blocks, halt = _assemble(pieces, InstrSet.R, program.op_set)
    reg_map = {"C": LocRule("R", k)}
    for j in range(t):
        reg_map[f"T{j}"] = LocRule("R", k + v + j, t)
    emap = EmulationMap(blocks, halt, reg_map, k=max(1, max((e - s for s, e in blocks), default=1)),
                        c_mul=max(1, t), c_add=k + v + t)
    logger.debug("数组->R: k=%d v=%d t=%d，%d 条指令展开为 %d 条", k, v, t, len(program), len(target))
    return target, emap
