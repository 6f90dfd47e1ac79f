"""
🔤 程序文本解析

文本格式：每行一条指令，'#' 之后为注释，空行忽略。
- AB / R 指令：助记符 + 空格分隔的十进制参数（助记符大小写无关）
- 数组指令："Tj[expr] <- expr"、"Cj <- expr"、"Jzero expr l0 l1"、"Output expr"
"""

from typing import FrozenSet, Iterable, List, Optional, Tuple

import regex

from common.errors import ParseError
from .instructions import (
    CANONICAL, MNEMONICS, OPS, ArrayElem, Const, InputElem, Instr, InstrSet,
    JzeroExpr, OpExpr, OutputExpr, Program, SetElem, SetVar, SizeN, Var,
    expr_ops, instr_exprs,
)

_TOKEN = regex.compile(r"\d+|[A-Za-z_]\w*|[\[\](),]|\S")
_VAR = regex.compile(r"^C(\d+)$")
_ARR = regex.compile(r"^T(\d+)$")
_ASSIGN = regex.compile(r"^(?<target>.+?)\s*<-\s*(?<value>.+)$")
_JZERO = regex.compile(r"^jzero\s+(?<cond>.+?)\s+(?<l0>\d+)\s+(?<l1>\d+)$", regex.IGNORECASE)
_OUTPUT = regex.compile(r"^output\s+(?<value>.+)$", regex.IGNORECASE)


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _source_lines(text: str) -> Iterable[Tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if line:
            yield lineno, line


# ---------------------------------------------------------------------------
# AB / R
# ---------------------------------------------------------------------------

def _parse_plain(line: str, lineno: int, iset: InstrSet) -> Instr:
    parts = line.split()
    name = CANONICAL.get(parts[0].lower())
    if name is None:
        raise ParseError(f"未知助记符 '{parts[0]}'", line=lineno)
    try:
        args = tuple(int(p) for p in parts[1:])
    except ValueError:
        raise ParseError(f"参数必须是十进制整数: '{line}'", line=lineno)
    if any(a < 0 for a in args):
        raise ParseError(f"参数不能为负: '{line}'", line=lineno)
    if name in OPS:
        expected = 0
    else:
        expected = MNEMONICS[name][0 if iset is InstrSet.AB else 1]
        if expected is None:
            raise ParseError(f"{iset.value} 指令集没有指令 {name}", line=lineno)
    if len(args) != expected:
        raise ParseError(f"{name} 需要 {expected} 个参数，收到 {len(args)} 个", line=lineno)
    return Instr(name, args)


# ---------------------------------------------------------------------------
# 数组指令集的表达式
# ---------------------------------------------------------------------------

class _ExprParser:
    def __init__(self, text: str, lineno: int):
        self.tokens: List[str] = _TOKEN.findall(text)
        self.pos = 0
        self.lineno = lineno
        self.text = text

    def fail(self, message: str):
        raise ParseError(f"{message}: '{self.text}'", line=self.lineno)

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: Optional[str] = None) -> str:
        tok = self.peek()
        if tok is None:
            self.fail("表达式意外结束")
        if expected is not None and tok != expected:
            self.fail(f"期望 '{expected}'，得到 '{tok}'")
        self.pos += 1
        return tok

    def done(self):
        if self.peek() is not None:
            self.fail(f"多余的符号 '{self.peek()}'")

    def bracketed(self):
        self.take("[")
        inner = self.expr()
        self.take("]")
        return inner

    def expr(self):
        tok = self.take()
        if tok.isdigit():
            return Const(int(tok))
        if tok == "N":
            return SizeN()
        if tok == "I":
            return InputElem(self.bracketed())
        m = _VAR.match(tok)
        if m:
            return Var(int(m.group(1)))
        m = _ARR.match(tok)
        if m:
            return ArrayElem(int(m.group(1)), self.bracketed())
        name = CANONICAL.get(tok.lower())
        if name in OPS:
            self.take("(")
            args = [self.expr()]
            while self.peek() == ",":
                self.take(",")
                args.append(self.expr())
            self.take(")")
            if len(args) != OPS[name].arity:
                self.fail(f"{name} 需要 {OPS[name].arity} 个参数")
            return OpExpr(name, tuple(args))
        self.fail(f"无法识别的符号 '{tok}'")


def parse_expr(text: str, lineno: int = 0):
    parser = _ExprParser(text, lineno)
    result = parser.expr()
    parser.done()
    return result


def _parse_array(line: str, lineno: int):
    m = _JZERO.match(line)
    if m:
        return JzeroExpr(parse_expr(m.group("cond"), lineno), int(m.group("l0")), int(m.group("l1")))
    m = _OUTPUT.match(line)
    if m:
        return OutputExpr(parse_expr(m.group("value"), lineno))
    m = _ASSIGN.match(line)
    if not m:
        raise ParseError(f"无法识别的数组指令 '{line}'", line=lineno)
    target = parse_expr(m.group("target"), lineno)
    value = parse_expr(m.group("value"), lineno)
    if isinstance(target, Var):
        return SetVar(target.index, value)
    if isinstance(target, ArrayElem):
        return SetElem(target.array, target.index, value)
    raise ParseError(f"赋值目标必须是 Cj 或 Tj[expr]: '{line}'", line=lineno)


# ---------------------------------------------------------------------------
# 入口
# ---------------------------------------------------------------------------

def _used_ops(instructions, iset: InstrSet) -> set:
    if iset is InstrSet.ARRAY:
        names = set()
        for ins in instructions:
            for e in instr_exprs(ins):
                names |= expr_ops(e)
        return names
    return {ins.op for ins in instructions if ins.op in OPS}


def parse_program(text: str, iset: InstrSet, op_set: Optional[FrozenSet[str]] = None) -> Program:
    """
    解析程序文本

    Args:
        text: 程序源文本
        iset: 指令集
        op_set: 允许的运算集合（默认：加法 + 程序中出现的运算）

    Returns:
        Program

    Raises:
        ParseError: 未知助记符、参数错误、跳转目标越界
    """
    instructions = []
    lines: List[int] = []
    for lineno, line in _source_lines(text):
        if iset is InstrSet.ARRAY:
            instructions.append(_parse_array(line, lineno))
        else:
            instructions.append(_parse_plain(line, lineno, iset))
        lines.append(lineno)

    r = len(instructions)
    for ins, lineno in zip(instructions, lines):
        if isinstance(ins, (Instr, JzeroExpr)) and ins.is_jump():
            for target in ins.targets():
                if not 0 <= target <= r:
                    raise ParseError(f"跳转目标 {target} 超出范围 [0, {r}]", line=lineno)

    used = _used_ops(instructions, iset)
    if op_set is None:
        op_set = frozenset({"add"} | used)
    else:
        op_set = frozenset(op_set)
        missing = used - op_set
        if missing:
            raise ParseError(f"程序使用了未允许的运算: {', '.join(sorted(missing))}")
    return Program(iset, tuple(instructions), op_set)


def format_program(program: Program) -> str:
    """把程序还原为文本格式"""
    return "\n".join(str(ins) for ins in program.instructions) + ("\n" if len(program) else "")
