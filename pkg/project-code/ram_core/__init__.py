"""
🖥️ RAM 核心模块

三种指令集（AB / R / 数组）的语法、解析与单位代价解释器。
"""

from .instructions import (
    InstrSet, Instr, Program, OPS, DEFAULT_OP_SET,
    Const, SizeN, Var, ArrayElem, InputElem, OpExpr,
    SetVar, SetElem, JzeroExpr, OutputExpr,
)
from .parser import parse_program, parse_expr, format_program
from .machine import (
    RamInput, ConfigurationAB, ConfigurationR, ConfigurationArray,
    RunResult, initial_config, step, run,
)
from .graph_input import encode_graph_input
from .examples import FILL_AND_ECHO_AB, fill_and_echo

__all__ = [
    "InstrSet", "Instr", "Program", "OPS", "DEFAULT_OP_SET",
    "Const", "SizeN", "Var", "ArrayElem", "InputElem", "OpExpr",
    "SetVar", "SetElem", "JzeroExpr", "OutputExpr",
    "parse_program", "parse_expr", "format_program",
    "RamInput", "ConfigurationAB", "ConfigurationR", "ConfigurationArray",
    "RunResult", "initial_config", "step", "run",
    "encode_graph_input", "FILL_AND_ECHO_AB", "fill_and_echo",
]
