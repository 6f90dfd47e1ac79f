"""
🧮 RAM+

带加法的 RAM 模型：解释器、指令集之间的忠实翻译、
线性预处理后常数时间的算术查询，以及测量工具
"""

__version__ = "1.0.0"
__author__ = "RAM+ Team"
