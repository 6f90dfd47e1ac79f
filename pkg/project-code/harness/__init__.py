"""
📏 测量工具模块

- 按定义域生成随机参数
- N 扫描：线性预处理与常数查询的判定
- 与精确整数运算的对照
- CSV / JSON 报告
"""

from .generators import (
    ArgDomain, CA_SWEEP_DEMO, arg_domain, random_args, exhaustive_args, is_skipped,
    random_operands, cell_rng,
)
from .sweep import (
    CA_OP, LINEAR_RATIO, LINEAR_FROM, SweepCell, SweepResult, sweep, sweep_cell,
    linear_ok, constant_ok, parse_n_set,
)
from .oracle import MODES, OracleReport, oracle_check
from .report import CSV_COLUMNS, csv_rows, to_csv, to_json, save_result, load_results

__all__ = [
    "ArgDomain", "CA_SWEEP_DEMO", "arg_domain", "random_args", "exhaustive_args",
    "is_skipped", "random_operands", "cell_rng",
    "CA_OP", "LINEAR_RATIO", "LINEAR_FROM", "SweepCell", "SweepResult", "sweep",
    "sweep_cell", "linear_ok", "constant_ok", "parse_n_set",
    "MODES", "OracleReport", "oracle_check",
    "CSV_COLUMNS", "csv_rows", "to_csv", "to_json", "save_result", "load_results",
]
