"""
🔲 元胞自动机编译模块

- 一维自动机的模拟、精确线性时间约定检查与组合
- 回显 / 取反 / 前缀异或三个自带同步层的演示自动机
- 分块模拟：预处理局部转移表，之后常数步算出自动机的输出
"""

from .automaton import (
    CellularAutomaton, WordConfig, ca_step, ca_run, project_config,
    ContractVerdict, check_word, check_linear_contract, default_samples,
    require_contract, compose, ca_to_dict, ca_from_dict, save_ca, load_ca,
    CA_FORMAT_VERSION,
)
from .demos import (
    Sync, DEMOS, ECHO_FORWARD, echo_ca, complement_ca, parity_ca, demo_ca, demo_oracle,
)
from .compiler import (
    CaParams, CaTables, ca_params, min_admissible_n, query_step_bound,
    code_entry, encode_input, sharp_block, build_ca_tables, ca_op, block_row,
    simulate_op, DEFAULT_TABLE_BUDGET,
)

__all__ = [
    "CellularAutomaton", "WordConfig", "ca_step", "ca_run", "project_config",
    "ContractVerdict", "check_word", "check_linear_contract", "default_samples",
    "require_contract", "compose", "ca_to_dict", "ca_from_dict", "save_ca", "load_ca",
    "CA_FORMAT_VERSION",
    "Sync", "DEMOS", "ECHO_FORWARD", "echo_ca", "complement_ca", "parity_ca",
    "demo_ca", "demo_oracle",
    "CaParams", "CaTables", "ca_params", "min_admissible_n", "query_step_bound",
    "code_entry", "encode_input", "sharp_block", "build_ca_tables", "ca_op",
    "block_row", "simulate_op", "DEFAULT_TABLE_BUDGET",
]
