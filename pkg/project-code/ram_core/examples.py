"""
📚 示例程序

FILL_AND_ECHO：R[N]←0; i←1; while R[N]=0 { R[i]←I[0]; R[i+1]←i+1; i←i+1 }; output I[1]。
第 24 行的无条件跳转回到第 8 行重新读取 R[N]。
"""

from .instructions import InstrSet, Program
from .parser import parse_program

FILL_AND_ECHO_AB = """\
# R[N] <- 0
CST 0
Buffer
getN
Store
# i <- 1  (i 存放在 R[0])
CST 1
Buffer
CST 0
Store
# 循环测试 R[N] = 0
getN
Load
Jzero 11 25
# R[i] <- I[0]
CST 0
Input
Buffer
CST 0
Load
Store
# R[i+1] <- i+1
Buffer
CST 1
add
Buffer
Store
# i <- i+1
CST 0
Store
JZero 8 8
# output I[1]
CST 1
Input
Output
"""


def fill_and_echo() -> Program:
    """28 条指令的 AB 示例程序"""
    return parse_program(FILL_AND_ECHO_AB, InstrSet.AB)
