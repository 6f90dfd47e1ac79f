"""
🏗️ 结构化程序 -> 数组程序

- 条件 α = β 用 Eq 数组判断：Eq[α] <- 1; Eq[β] <- 0; Jzero Eq[α]（α=β 当且仅当 Eq[α]=0）
- 循环编译为回跳；goto 编译为 Jzero 0 L L
- 函数使用栈数组 S 与帧指针 F；帧布局 S[F]=返回点，S[F+1]=调用者 F，
  S[F+2]=帧大小，S[F+3..] 为参数、局部变量与循环的隐藏槽
- 动态数组从 DATA 分配，nbCellsUsed 记录已用单元数
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from common.errors import UnsupportedConstruct
from ram_core.instructions import (
    ArrayElem, Const, InputElem, InstrSet, JzeroExpr, OpExpr, OutputExpr,
    Program, SetElem, SetVar, SizeN, Var,
)
from .structured import (
    Alloc, Assign, Call, Cond, Deref, Elem, For, FuncDef, Goto, If, Inp, Label,
    Name, Num, Op, Output, Return, Size, StructuredProgram, While, walk,
)

logger = logging.getLogger(__name__)

HALT = "__halt"
RESERVED_ARRAYS = ("Eq", "S", "DATA", "__pred")
RESERVED_VARS = ("F", "nbCellsUsed", "__nf", "__ret", "__site", "__ga", "__gb")


@dataclass
class _Jump:
    cond: object
    l0: str
    l1: str


@dataclass
class _Mark:
    name: str


@dataclass
class CompiledProgram:
    """编译结果与名字到下标的符号表"""
    program: Program
    variables: Dict[str, int] = field(default_factory=dict)
    arrays: Dict[str, int] = field(default_factory=dict)

    def snapshot(self, config, names: Optional[List[str]] = None) -> Dict[str, object]:
        """读取具名变量与数组（数组只保留非零单元）"""
        result: Dict[str, object] = {}
        for name, idx in self.variables.items():
            if names is None or name in names:
                result[name] = config.variables.get(idx, 0)
        for name, idx in self.arrays.items():
            if names is None or name in names:
                cells = config.arrays.get(idx, {})
                result[name] = {x: v for x, v in sorted(cells.items()) if v != 0}
        return result


class _Compiler:

    def __init__(self, sp: StructuredProgram):
        self.sp = sp
        self.op_set = frozenset(sp.op_set) | {"add"}
        self.variables: Dict[str, int] = {}
        self.arrays: Dict[str, int] = {}
        self.funcs: Dict[str, FuncDef] = {}
        self.code: List[object] = []
        self.labels = 0
        self.sites: Dict[str, List[Tuple[int, str]]] = {}
        self.next_site = 1
        # 当前函数的帧槽位：名字 -> 相对 F 的偏移
        self.frame: Optional[Dict[str, int]] = None
        self.prefix = ""
        self.hidden: List[str] = []

        for name in sp.variables:
            self._declare(name, self.variables, RESERVED_VARS)
        for name in sp.arrays:
            self._declare(name, self.arrays, RESERVED_ARRAYS)
        for f in sp.functions:
            if f.name in self.funcs:
                raise UnsupportedConstruct(f"函数 {f.name} 重复定义")
            self.funcs[f.name] = f

    @staticmethod
    def _declare(name: str, table: Dict[str, int], reserved):
        if name in table or name in reserved or name.startswith("__"):
            raise UnsupportedConstruct(f"名字 {name} 重复或为保留名")
        table[name] = len(table)

    # -- 符号 ----------------------------------------------------------------

    def var(self, name: str) -> int:
        if name not in self.variables:
            if name not in RESERVED_VARS and not name.startswith("__hidden"):
                raise UnsupportedConstruct(f"未声明的变量 {name}")
            self.variables[name] = len(self.variables)
        return self.variables[name]

    def array(self, name: str) -> int:
        if name not in self.arrays:
            if name not in RESERVED_ARRAYS:
                raise UnsupportedConstruct(f"未声明的数组 {name}")
            self.arrays[name] = len(self.arrays)
        return self.arrays[name]

    def fresh(self, hint: str) -> str:
        self.labels += 1
        return f"__{hint}{self.labels}"

    def hidden_slot(self) -> str:
        """循环的隐藏槽：顶层为全局变量，函数内为帧槽"""
        name = self.hidden.pop(0) if self.frame is not None else f"__hidden{self.labels}_{len(self.variables)}"
        if self.frame is None:
            self.var(name)
        return name

    # -- 表达式 --------------------------------------------------------------

    def slot(self, offset: int):
        return ArrayElem(self.array("S"), OpExpr("add", (Var(self.var("F")), Const(offset))))

    def expr(self, e):
        if isinstance(e, Num):
            return Const(e.value)
        if isinstance(e, Name):
            if self.frame is not None and e.id in self.frame:
                return self.slot(self.frame[e.id])
            if e.id in self.sp.constants:
                return Const(self.sp.constants[e.id])
            return Var(self.var(e.id))
        if isinstance(e, Size):
            return SizeN()
        if isinstance(e, Inp):
            return InputElem(self.expr(e.index))
        if isinstance(e, Elem):
            return ArrayElem(self.array(e.array), self.expr(e.index))
        if isinstance(e, Deref):
            return ArrayElem(self.array("DATA"), OpExpr("add", (self.expr(e.ptr), self.expr(e.index))))
        if isinstance(e, Op):
            if e.name not in self.op_set:
                raise UnsupportedConstruct(f"运算 {e.name} 不在运算集合中")
            return OpExpr(e.name, tuple(self.expr(a) for a in e.args))
        raise UnsupportedConstruct(f"未知表达式 {e!r}")

    # -- 发射 ----------------------------------------------------------------

    def emit(self, ins):
        self.code.append(ins)

    def mark(self, name: str):
        self.code.append(_Mark(name))

    def goto(self, name: str):
        self.code.append(_Jump(Const(0), name, name))

    def assign(self, target, value):
        if isinstance(target, Name):
            if self.frame is not None and target.id in self.frame:
                slot = self.slot(self.frame[target.id])
                self.emit(SetElem(slot.array, slot.index, value))
            elif target.id in self.sp.constants:
                raise UnsupportedConstruct(f"常量 {target.id} 不能被赋值")
            else:
                self.emit(SetVar(self.var(target.id), value))
        elif isinstance(target, Elem):
            self.emit(SetElem(self.array(target.array), self.expr(target.index), value))
        elif isinstance(target, Deref):
            index = OpExpr("add", (self.expr(target.ptr), self.expr(target.index)))
            self.emit(SetElem(self.array("DATA"), index, value))
        else:
            raise UnsupportedConstruct(f"赋值目标非法: {target!r}")

    def branch(self, cond: Cond, if_true: str, if_false: str):
        """cond 成立跳 if_true，否则跳 if_false"""
        if cond.negate:
            if_true, if_false = if_false, if_true
        left, right = cond.left, cond.right
        if right == Num(0) or left == Num(0):
            operand = left if right == Num(0) else right
            self.code.append(_Jump(self.expr(operand), if_true, if_false))
            return
        eq = self.array("Eq")
        a, b = self.expr(left), self.expr(right)
        self.emit(SetElem(eq, a, Const(1)))
        self.emit(SetElem(eq, b, Const(0)))
        self.code.append(_Jump(ArrayElem(eq, a), if_true, if_false))

    # -- 语句 ----------------------------------------------------------------

    def block(self, stmts):
        for s in stmts:
            self.stmt(s)

    def stmt(self, s):
        if isinstance(s, Assign):
            self.assign(s.target, self.expr(s.value))
        elif isinstance(s, If):
            yes, no, end = self.fresh("then"), self.fresh("else"), self.fresh("fi")
            self.branch(s.cond, yes, no)
            self.mark(yes)
            self.block(s.then)
            self.goto(end)
            self.mark(no)
            self.block(s.orelse)
            self.mark(end)
        elif isinstance(s, While):
            top, body, end = self.fresh("while"), self.fresh("do"), self.fresh("done")
            self.mark(top)
            self.branch(s.cond, body, end)
            self.mark(body)
            self.block(s.body)
            self.goto(top)
            self.mark(end)
        elif isinstance(s, For):
            self.for_loop(s)
        elif isinstance(s, Call):
            self.call(s)
        elif isinstance(s, Return):
            self.ret(s)
        elif isinstance(s, Alloc):
            used = Var(self.var("nbCellsUsed"))
            self.assign(Name(s.var), used)
            self.emit(SetVar(used.index, OpExpr("add", (used, self.expr(s.size)))))
        elif isinstance(s, Output):
            self.emit(OutputExpr(self.expr(s.value)))
        elif isinstance(s, Label):
            self.mark(self.prefix + s.name)
        elif isinstance(s, Goto):
            self.goto(self.prefix + s.name)
        else:
            raise UnsupportedConstruct(f"未知语句 {s!r}")

    def for_loop(self, s: For):
        """
        先用两个计数器同步上数判断区间是否为空：a 从 lo 数到 hi，b 从 hi 数到 lo，
        谁先到达决定结果，代价与 |hi-lo| 成正比；倒序循环顺便填写 __pred。
        """
        lo, hi = Name(self.hidden_slot()), Name(self.hidden_slot())
        self.assign(lo, self.expr(s.start))
        self.assign(hi, self.expr(s.end))
        ga, gb = Name("__ga"), Name("__gb")
        self.assign(ga, self.expr(lo))
        self.assign(gb, self.expr(hi))
        guard, below, count = self.fresh("guard"), self.fresh("below"), self.fresh("count")
        enter, body, step, end = self.fresh("enter"), self.fresh("body"), self.fresh("step"), self.fresh("rof")
        self.mark(guard)
        self.branch(Cond(ga, hi), enter, below)
        self.mark(below)
        self.branch(Cond(gb, lo), end, count)
        self.mark(count)
        if s.down:
            self.emit(SetElem(self.array("__pred"), self.expr(Op("add", (ga, Num(1)))), self.expr(ga)))
        self.assign(ga, self.expr(Op("add", (ga, Num(1)))))
        self.assign(gb, self.expr(Op("add", (gb, Num(1)))))
        self.goto(guard)

        var = Name(s.var)
        self.mark(enter)
        self.assign(var, self.expr(hi if s.down else lo))
        self.mark(body)
        self.block(s.body)
        self.branch(Cond(var, lo if s.down else hi), end, step)
        self.mark(step)
        if s.down:
            self.assign(var, ArrayElem(self.array("__pred"), self.expr(var)))
        else:
            self.assign(var, self.expr(Op("add", (var, Num(1)))))
        self.goto(body)
        self.mark(end)

    def call(self, s: Call):
        f = self.funcs.get(s.func)
        if f is None:
            raise UnsupportedConstruct(f"未定义的函数 {s.func}")
        if len(s.args) != len(f.params):
            raise UnsupportedConstruct(f"函数 {f.name} 需要 {len(f.params)} 个参数，收到 {len(s.args)} 个")
        site, back = self.next_site, self.fresh("back")
        self.next_site += 1
        self.sites.setdefault(f.name, []).append((site, back))

        stack = self.array("S")
        F, nf = Var(self.var("F")), Var(self.var("__nf"))
        self.emit(SetVar(nf.index, OpExpr("add", (F, self.slot(2)))))
        for i, arg in enumerate(s.args):
            self.emit(SetElem(stack, OpExpr("add", (nf, Const(3 + i))), self.expr(arg)))
        self.emit(SetElem(stack, nf, Const(site)))
        self.emit(SetElem(stack, OpExpr("add", (nf, Const(1))), F))
        self.emit(SetElem(stack, OpExpr("add", (nf, Const(2))), Const(_frame_size(f))))
        self.emit(SetVar(F.index, nf))
        self.goto(f"__fn_{f.name}")
        self.mark(back)
        if s.dest is not None:
            self.assign(Name(s.dest), Var(self.var("__ret")))

    def ret(self, s: Return):
        value = self.expr(s.value)
        if self.frame is None:
            self.emit(OutputExpr(value))
            self.goto(HALT)
            return
        F = self.var("F")
        self.emit(SetVar(self.var("__ret"), value))
        self.emit(SetVar(self.var("__site"), self.slot(0)))
        self.emit(SetVar(F, self.slot(1)))
        self.goto(f"__dispatch_{self.prefix}")

    def function(self, f: FuncDef):
        layout = list(f.params) + list(f.locals) + _hidden_names(f)
        if len(set(layout)) != len(layout):
            raise UnsupportedConstruct(f"函数 {f.name} 的参数或局部变量重名")
        self.frame = {name: 3 + i for i, name in enumerate(layout)}
        self.hidden = _hidden_names(f)
        self.prefix = f.name
        self.mark(f"__fn_{f.name}")
        for name in f.locals:
            self.assign(Name(name), Const(0))
        self.block(f.body)
        self.ret(Return(Num(0)))
        self.frame = None
        self.prefix = ""

    def dispatch(self, f: FuncDef):
        """按返回点编号跳回调用处"""
        self.mark(f"__dispatch_{f.name}")
        sites = self.sites.get(f.name, [])
        if not sites:
            self.goto(HALT)
            return
        for site, back in sites[:-1]:
            nxt = self.fresh("site")
            self.branch(Cond(Name("__site"), Num(site)), back, nxt)
            self.mark(nxt)
        self.goto(sites[-1][1])

    def compile(self) -> CompiledProgram:
        if self.sp.functions:
            self.emit(SetElem(self.array("S"), Const(2), Const(3)))
        self.block(self.sp.body)
        if self.sp.functions:
            self.goto(HALT)
            for f in self.sp.functions:
                self.function(f)
            for f in self.sp.functions:
                self.dispatch(f)
        return CompiledProgram(self.resolve(), dict(self.variables), dict(self.arrays))

    def resolve(self) -> Program:
        positions: Dict[str, int] = {}
        count = 0
        for item in self.code:
            if isinstance(item, _Mark):
                if item.name in positions:
                    raise UnsupportedConstruct(f"标签 {item.name} 重复")
                positions[item.name] = count
            else:
                count += 1
        positions[HALT] = count

        def target(name: str) -> int:
            if name not in positions:
                raise UnsupportedConstruct(f"未定义的标签 {name}")
            return positions[name]

        out = []
        for item in self.code:
            if isinstance(item, _Mark):
                continue
            if isinstance(item, _Jump):
                item = JzeroExpr(item.cond, target(item.l0), target(item.l1))
            out.append(item)
        return Program(InstrSet.ARRAY, tuple(out), self.op_set)


def _hidden_names(f: FuncDef) -> List[str]:
    loops = sum(1 for s in walk(f.body) if isinstance(s, For))
    return [f"__hidden{i}" for i in range(2 * loops)]


def _frame_size(f: FuncDef) -> int:
    return f.frame_size + len(_hidden_names(f))


def compile_structured(sp: StructuredProgram) -> CompiledProgram:
    """编译并返回符号表"""
    compiled = _Compiler(sp).compile()
    logger.debug("结构化程序编译为 %d 条数组指令", len(compiled.program))
    return compiled


def lower_structured(sp: StructuredProgram) -> Program:
    """结构化程序 -> 数组程序"""
    return compile_structured(sp).program
