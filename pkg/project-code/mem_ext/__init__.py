"""
🗄️ 内存模型扩展

- 惰性数组：未初始化内存上的常数时间 store / fetch
- trie 数组：k 维数组压到一张二维节点表上
"""

from .lazy import LazyArray, lazy_store, lazy_fetch, init_cell
from .trie import (
    TrieArray, ArrayFamily, trie_get, trie_set, multi_array_key,
    trie_radix, trie_depth, ENCODINGS,
)

__all__ = [
    "LazyArray", "lazy_store", "lazy_fetch", "init_cell",
    "TrieArray", "ArrayFamily", "trie_get", "trie_set", "multi_array_key",
    "trie_radix", "trie_depth", "ENCODINGS",
]
