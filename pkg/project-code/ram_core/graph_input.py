"""
🕸️ 图的标准输入编码

N = 2m+2，I[0]=m，I[1]=n，I[2j]=a_j，I[2j+1]=b_j（边从 j=1 开始编号）。
"""

from typing import Iterable, Tuple

from common.errors import DomainError, VertexOutOfRange
from .machine import RamInput


def encode_graph_input(edges: Iterable[Tuple[int, int]], n: int) -> RamInput:
    """
    把无孤立点的图编码为 RAM 输入

    Args:
        edges: 边列表 (a, b)，顶点编号 1..n
        n: 顶点数

    Raises:
        VertexOutOfRange: 顶点不在 1..n
        DomainError: 没有边，或存在孤立点
    """
    edges = list(edges)
    if not edges:
        raise DomainError("边集为空：m=0 时 n ≤ 2m 不成立")
    if n <= 0:
        raise DomainError(f"顶点数必须为正: {n}")
    touched = set()
    cells = [len(edges), n]
    for a, b in edges:
        for v in (a, b):
            if not 1 <= v <= n:
                raise VertexOutOfRange(f"顶点 {v} 不在 1..{n} 中")
            touched.add(v)
        cells.extend((a, b))
    if len(touched) != n:
        isolated = sorted(set(range(1, n + 1)) - touched)
        raise DomainError(f"存在孤立点: {isolated}")
    return RamInput(2 * len(edges) + 2, tuple(cells))
