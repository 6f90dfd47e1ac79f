"""
🔁 翻译与忠实仿真模块

三种指令集之间的翻译、结构化程序编译、可恢复包装与锁步检查。
"""

from .emap import EmulationMap, LocRule, compose_emaps, identity_emap, config_locs, read_loc
from .passes import lower_ab_to_array, lower_r_to_ab, lower_array_to_r, R_TO_AB_K
from .faithful import check_faithful, Counterexample, FaithfulVerdict
from .structured import (
    StructuredProgram, FuncDef, Num, Name, Size, Inp, Elem, Deref, Op, Cond, add,
    Assign, If, While, For, Call, Return, Alloc, Output, Label, Goto,
)
from .compiler import lower_structured, compile_structured, CompiledProgram
from .restore import wrap_restorable, desugar_for
from .corpus import corpus, random_program, random_inputs, lower_pipeline, CORPUS_N, CORPUS_C

__all__ = [
    "EmulationMap", "LocRule", "compose_emaps", "identity_emap", "config_locs", "read_loc",
    "lower_ab_to_array", "lower_r_to_ab", "lower_array_to_r", "R_TO_AB_K",
    "check_faithful", "Counterexample", "FaithfulVerdict",
    "StructuredProgram", "FuncDef", "Num", "Name", "Size", "Inp", "Elem", "Deref",
    "Op", "Cond", "add", "Assign", "If", "While", "For", "Call", "Return", "Alloc",
    "Output", "Label", "Goto",
    "lower_structured", "compile_structured", "CompiledProgram",
    "wrap_restorable", "desugar_for",
    "corpus", "random_program", "random_inputs", "lower_pipeline", "CORPUS_N", "CORPUS_C",
]
