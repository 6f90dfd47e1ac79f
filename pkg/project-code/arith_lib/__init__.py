"""
🧮 常数时间算术库

线性时间预处理一组表，之后每个算术查询的步数与 N 无关：
除法、取模、指数、对数、开方、位串与按位运算。
"""

from .context import (
    PreprocContext, DivPlan, RootSetup, build_context, context_from_config,
    cth_root_constants, save_context, load_context, linear_budget,
    CONTEXT_FORMAT_VERSION, ROOT_NEWTON, ROOT_TABLE, ROOT_BRACKET,
)
from .tables import FAMILIES, FAMILY_DEPS, family_closure
from .radix import Radix, OVERFLOW
from .digits import (
    pred, sqrt_ceil, to_base_b, from_base_b, normalize, lower_equal,
    sum_digits, difference, multiply, value_of,
)
from .division import div_by_small, div_close, divide, mod, divide_mod
from .power import exponential, logarithm
from .roots import cth_root, gen_root
from .bits import bit_length, conc, bit, substring, is_prefix, is_suffix, xor, and_, or_
from .division2 import division2
from .registry import OpSpec, registry, get_op

__all__ = [
    "PreprocContext", "DivPlan", "RootSetup", "build_context", "context_from_config",
    "cth_root_constants", "save_context", "load_context", "linear_budget",
    "CONTEXT_FORMAT_VERSION", "ROOT_NEWTON", "ROOT_TABLE", "ROOT_BRACKET",
    "FAMILIES", "FAMILY_DEPS", "family_closure", "Radix", "OVERFLOW",
    "pred", "sqrt_ceil", "to_base_b", "from_base_b", "normalize", "lower_equal",
    "sum_digits", "difference", "multiply", "value_of",
    "div_by_small", "div_close", "divide", "mod", "divide_mod",
    "exponential", "logarithm", "cth_root", "gen_root",
    "bit_length", "conc", "bit", "substring", "is_prefix", "is_suffix",
    "xor", "and_", "or_", "division2",
    "OpSpec", "registry", "get_op",
]
