"""
♻️ 可恢复包装

把一个常数时间过程改写为"调用前后内存完全相同"的版本：
- 每次赋值之前把旧值、目标编号、下标记入日志（OldVal / Dest / Index），NbWrite 加一
- PRED 表懒填写：NbWrite 增加时写 PRED[NbWrite+1] <- NbWrite
- return e 改为 ReturnValue <- e 并跳到结尾
- 结尾按 NbWrite 倒序重放日志，最后返回 ReturnValue

变量编号 0..k，数组编号 k+1..k'；ReturnValue 是唯一不恢复的位置。
for 循环先被展开成 while（循环变量的更新也要记日志）。
"""

import logging
from typing import List, Tuple

from common.errors import UnsupportedConstruct
from .structured import (
    Alloc, Assign, Call, Cond, Deref, Elem, For, Goto, If, Label, Name, Num,
    Return, StructuredProgram, While, add, walk,
)

logger = logging.getLogger(__name__)

NB_WRITE = "_nbwrite"
RETURN_VALUE = "_retval"
OLD_VAL = "_oldval"
DEST = "_dest"
INDEX = "_index"
PRED = "_pred"
FOR_PRED = "_fpred"
FINAL = "_final"


class _ForExpander:
    """把 for 循环展开为 while + 显式赋值"""

    def __init__(self):
        self.count = 0
        self.variables: List[str] = []
        self.needs_pred = False

    def fresh(self, role: str) -> Name:
        name = f"_f{self.count}_{role}"
        self.variables.append(name)
        return Name(name)

    def block(self, stmts) -> List:
        out = []
        for s in stmts:
            out.extend(self.stmt(s))
        return out

    def stmt(self, s) -> List:
        if isinstance(s, If):
            return [If(s.cond, self.block(s.then), self.block(s.orelse))]
        if isinstance(s, While):
            return [While(s.cond, self.block(s.body))]
        if not isinstance(s, For):
            return [s]

        lo, hi = self.fresh("lo"), self.fresh("hi")
        ga, gb = self.fresh("a"), self.fresh("b")
        ok, stop, run = self.fresh("ok"), self.fresh("stop"), self.fresh("run")
        self.count += 1
        grow = [Assign(ga, add(ga, 1)), Assign(gb, add(gb, 1))]
        if s.down:
            self.needs_pred = True
            grow.insert(0, Assign(Elem(FOR_PRED, add(ga, 1)), ga))
        guard = While(Cond(stop), [
            If(Cond(ga, hi), [Assign(ok, Num(1)), Assign(stop, Num(1))], [
                If(Cond(gb, lo), [Assign(stop, Num(1))], grow),
            ]),
        ])
        var = Name(s.var)
        advance = Assign(var, Elem(FOR_PRED, var)) if s.down else Assign(var, add(var, 1))
        loop = If(Cond(ok, negate=True), [
            Assign(var, hi if s.down else lo),
            Assign(run, Num(1)),
            While(Cond(run, negate=True), self.block(s.body) + [
                If(Cond(var, lo if s.down else hi), [Assign(run, Num(0))], [advance]),
            ]),
        ])
        return [
            Assign(lo, s.start), Assign(hi, s.end), Assign(ga, lo), Assign(gb, hi),
            Assign(ok, Num(0)), Assign(stop, Num(0)), guard, loop,
        ]


def desugar_for(sp: StructuredProgram) -> StructuredProgram:
    """展开所有 for 循环，隐藏变量加入声明"""
    expander = _ForExpander()
    body = expander.block(sp.body)
    arrays = list(sp.arrays) + ([FOR_PRED] if expander.needs_pred else [])
    return StructuredProgram(list(sp.variables) + expander.variables, arrays,
                             dict(sp.constants), list(sp.functions), body, sp.op_set)


class _Logger:

    def __init__(self, variables: List[str], arrays: List[str]):
        self.var_ids = {name: i for i, name in enumerate(variables)}
        self.array_ids = {name: len(variables) + i for i, name in enumerate(arrays)}

    def log(self, dest_id: int, old, index) -> List:
        nb = Name(NB_WRITE)
        return [
            Assign(Elem(OLD_VAL, nb), old),
            Assign(Elem(DEST, nb), Num(dest_id)),
            Assign(Elem(INDEX, nb), index),
            Assign(Elem(PRED, add(nb, 1)), nb),
            Assign(nb, add(nb, 1)),
        ]

    def block(self, stmts) -> List:
        out = []
        for s in stmts:
            out.extend(self.stmt(s))
        return out

    def stmt(self, s) -> List:
        if isinstance(s, Assign):
            target = s.target
            if isinstance(target, Name) and target.id in self.var_ids:
                return self.log(self.var_ids[target.id], target, Num(0)) + [s]
            if isinstance(target, Elem) and target.array in self.array_ids:
                return self.log(self.array_ids[target.array], target, target.index) + [s]
            raise UnsupportedConstruct(f"赋值目标不在过程声明中: {target!r}")
        if isinstance(s, If):
            return [If(s.cond, self.block(s.then), self.block(s.orelse))]
        if isinstance(s, While):
            return [While(s.cond, self.block(s.body))]
        if isinstance(s, Return):
            return [Assign(Name(RETURN_VALUE), s.value), Goto(FINAL)]
        return [s]

    def replay(self) -> List:
        """按 Dest 分派的恢复链"""
        nb = Name(NB_WRITE)
        old = Elem(OLD_VAL, nb)
        chain: List = []
        targets: List[Tuple[int, object]] = [
            (i, Assign(Name(name), old)) for name, i in self.var_ids.items()
        ] + [
            (i, Assign(Elem(name, Elem(INDEX, nb)), old)) for name, i in self.array_ids.items()
        ]
        for dest_id, restore in reversed(targets):
            chain = [If(Cond(Elem(DEST, nb), Num(dest_id)), [restore], chain)]
        return [While(Cond(nb, negate=True), [Assign(nb, Elem(PRED, nb))] + chain)]


def wrap_restorable(proc: StructuredProgram) -> StructuredProgram:
    """
    返回可重复调用的包装过程

    Raises:
        UnsupportedConstruct: 过程含函数、动态分配，或使用了包装器的保留名
    """
    if proc.functions:
        raise UnsupportedConstruct("可恢复包装只接受不含函数的过程")
    for s in walk(proc.body):
        if isinstance(s, (Alloc, Call)):
            raise UnsupportedConstruct(f"可恢复包装不支持 {type(s).__name__}")
        if isinstance(s, Assign) and isinstance(s.target, Deref):
            raise UnsupportedConstruct("可恢复包装不支持动态数组写入")
        if isinstance(s, Label) and s.name == FINAL:
            raise UnsupportedConstruct(f"标签 {FINAL} 为保留名")
    reserved = {NB_WRITE, RETURN_VALUE, OLD_VAL, DEST, INDEX, PRED, FOR_PRED}
    clash = reserved & (set(proc.variables) | set(proc.arrays))
    clash |= {n for n in proc.variables if n.startswith("_f")}
    if clash:
        raise UnsupportedConstruct(f"过程使用了保留名: {sorted(clash)}")

    expanded = desugar_for(proc)
    writer = _Logger(expanded.variables, expanded.arrays)
    body = [Assign(Name(RETURN_VALUE), Num(0))]
    body += writer.block(expanded.body)
    body += [Goto(FINAL), Label(FINAL)]
    body += writer.replay()
    body += [Return(Name(RETURN_VALUE))]
    logger.debug("可恢复包装：%d 个变量，%d 个数组", len(writer.var_ids), len(writer.array_ids))
    return StructuredProgram(
        variables=list(expanded.variables) + [NB_WRITE, RETURN_VALUE],
        arrays=list(expanded.arrays) + [OLD_VAL, DEST, INDEX, PRED],
        constants=dict(expanded.constants),
        functions=[],
        body=body,
        op_set=expanded.op_set,
    )
