"""
🗄️ 内存扩展测试

惰性数组与 trie 数组
"""

import random
import sys
import unittest
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

# 添加父目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from common.errors import AllocationExhausted, DomainError
from common.meter import StepMeter
from mem_ext import (
    ArrayFamily, LazyArray, TrieArray, init_cell, lazy_fetch, lazy_store,
    multi_array_key, trie_depth, trie_get, trie_radix, trie_set,
)


class TestLazyArray(unittest.TestCase):
    """惰性数组"""

    def test_fetch_before_store_ignores_garbage(self):
        """垃圾预填充下，未写单元读出 0"""
        arr = LazyArray((16, 16), garbage=random.Random(3))
        garbage = [arr.raw(i, j) for i in range(16) for j in range(16)]
        self.assertTrue(any(v != 0 for v in garbage))
        for i in range(16):
            for j in range(16):
                self.assertEqual(lazy_fetch(arr, i, j), 0)
                self.assertFalse(init_cell(arr, i, j))

    def test_store_then_fetch(self):
        """store(5,7,42) 后读回 42"""
        arr = LazyArray((10, 10), garbage=random.Random(1))
        lazy_store(arr, 5, 7, 42)
        self.assertEqual(lazy_fetch(arr, 5, 7), 42)
        self.assertTrue(init_cell(arr, 5, 7))
        self.assertEqual(arr.count, 1)

    def test_overwrite_counts_once(self):
        """重复写同一单元只登记一次"""
        arr = LazyArray((8, 8))
        for v in range(5):
            arr.store(2, 3, v)
        self.assertEqual(arr.count, 1)
        self.assertEqual(arr.fetch(2, 3), 4)

    def test_generic_dimension(self):
        """三维惰性数组"""
        arr = LazyArray((4, 5, 6), garbage=random.Random(9))
        arr.store(3, 4, 5, 11)
        arr.store(0, 0, 0, 7)
        self.assertEqual(arr.fetch(3, 4, 5), 11)
        self.assertEqual(arr.fetch(0, 0, 0), 7)
        self.assertEqual(arr.fetch(1, 2, 3), 0)

    def test_out_of_shape(self):
        """下标越界报 DomainError"""
        arr = LazyArray((4, 4))
        with self.assertRaises(DomainError):
            arr.fetch(4, 0)
        with self.assertRaises(DomainError):
            arr.store(1, 7)

    def test_constant_steps(self):
        """每次 store / fetch 的步数不随形状增长"""
        small, large = StepMeter(), StepMeter()
        a = LazyArray((8, 8), meter=small)
        b = LazyArray((512, 512), meter=large)
        for arr in (a, b):
            arr.store(3, 3, 9)
            arr.fetch(3, 3)
            arr.fetch(1, 2)
        self.assertEqual(small.steps, large.steps)

    @settings(max_examples=60, deadline=None)
    @given(
        seed=st.integers(min_value=0, max_value=10 ** 6),
        ops=st.lists(
            st.tuples(st.booleans(), st.integers(0, 11), st.integers(0, 11), st.integers(0, 1000)),
            max_size=80,
        ),
    )
    def test_matches_zero_initialized_map(self, seed, ops):
        """任意交错的 store / fetch 与零初始化字典一致，计数与集合一致"""
        arr = LazyArray((12, 12), garbage=random.Random(seed))
        oracle = {}
        for is_store, i, j, v in ops:
            if is_store:
                arr.store(i, j, v)
                oracle[(i, j)] = v
            else:
                self.assertEqual(arr.fetch(i, j), oracle.get((i, j), 0))
        self.assertEqual(arr.count, len(oracle))


class TestTrieArray(unittest.TestCase):
    """trie 数组"""

    def test_radix_and_depth(self):
        """N=2^12, d=2: B̂=8, k=3 时深度 12"""
        self.assertEqual(trie_radix(4096, 2), 8)
        self.assertEqual(trie_depth(4096, 3, 8), 12)
        self.assertEqual(trie_radix(2, 3), 2)

    def test_fresh_get_is_zero(self):
        """空 trie 读出 0 且不分配节点"""
        t = TrieArray(100, 2)
        self.assertEqual(trie_get(t, (3, 9)), 0)
        self.assertEqual(t.nb_nodes, 1)
        self.assertNotIn((3, 9), t)

    def test_set_then_get(self):
        """set((3,9),5) 后读回 5"""
        t = TrieArray(100, 2, garbage=random.Random(4))
        trie_set(t, (3, 9), 5)
        self.assertEqual(trie_get(t, (3, 9)), 5)
        self.assertEqual(trie_get(t, (9, 3)), 0)
        self.assertIn((3, 9), t)

    def test_e_encoding(self):
        """E 重编码与原节点表行为一致"""
        plain = TrieArray(256, 2, d=2, c=16)
        encoded = TrieArray(256, 2, d=2, c=16, encoding="E")
        self.assertEqual(encoded._nodes.shape, (256, 16 * encoded.radix))
        rng = random.Random(12)
        for _ in range(200):
            key = (rng.randrange(256), rng.randrange(256))
            v = rng.randrange(1000)
            plain.set(key, v)
            encoded.set(key, v)
        for _ in range(300):
            key = (rng.randrange(256), rng.randrange(256))
            self.assertEqual(plain.get(key), encoded.get(key))

    def test_key_component_range(self):
        """键分量 ≥ N 或个数不对报 DomainError"""
        t = TrieArray(50, 2)
        with self.assertRaises(DomainError):
            t.set((50, 0), 1)
        with self.assertRaises(DomainError):
            t.get((1,))
        with self.assertRaises(DomainError):
            TrieArray(50, 2, encoding="hash")

    def test_allocation_exhausted(self):
        """节点数超过 c·N 报 AllocationExhausted"""
        t = TrieArray(16, 3, d=1, c=1)
        with self.assertRaises(AllocationExhausted):
            for a in range(16):
                for b in range(16):
                    t.set((a, b, 0), 1)

    def test_steps_independent_of_n(self):
        """d=2, k=3 时 N=2^12 与 N=2^16 的访问步数相同"""
        steps = []
        for n in (2 ** 12, 2 ** 16):
            meter = StepMeter()
            t = TrieArray(n, 3, d=2, c=2, meter=meter)
            t.set((1, 2, 3), 7)
            before = meter.steps
            self.assertEqual(t.get((1, 2, 3)), 7)
            steps.append(meter.steps - before)
        self.assertEqual(steps[0], steps[1])
        self.assertLessEqual(steps[0], 4 * 2 * 3 * 10)

    @pytest.mark.slow
    def test_random_ops_vs_map(self):
        """N=2^12, k=3, d=2 下 10^4 次随机读写与字典一致"""
        n = 2 ** 12
        t = TrieArray(n, 3, d=2, c=32)
        oracle = {}
        rng = random.Random(2024)
        pool = [tuple(rng.randrange(n) for _ in range(3)) for _ in range(2000)]
        for _ in range(10 ** 4):
            key = rng.choice(pool) if rng.random() < 0.7 else tuple(rng.randrange(n) for _ in range(3))
            if rng.random() < 0.5:
                v = rng.randrange(10 ** 6)
                t.set(key, v)
                oracle[key] = v
            else:
                self.assertEqual(t.get(key), oracle.get(key, 0))


class TestArrayFamily(unittest.TestCase):
    """多数组归约到一棵 trie"""

    def test_multi_array_key(self):
        """(i, v div c, v mod c, ...)"""
        self.assertEqual(multi_array_key(2, (7, 10), 3), (2, 2, 1, 3, 1))

    def test_arrays_are_independent(self):
        """同一键在不同数组中互不干扰"""
        fam = ArrayFamily(3, 64, 2, scale=2, d=2, c=16)
        fam.set(0, (100, 5), 1)
        fam.set(1, (100, 5), 2)
        fam.set(2, (127, 127), 3)
        self.assertEqual(fam.get(0, (100, 5)), 1)
        self.assertEqual(fam.get(1, (100, 5)), 2)
        self.assertEqual(fam.get(2, (100, 5)), 0)
        self.assertEqual(fam.get(2, (127, 127)), 3)

    def test_family_ranges(self):
        """编号或分量越界报 DomainError"""
        fam = ArrayFamily(2, 16, 1, scale=2)
        with self.assertRaises(DomainError):
            fam.get(2, (0,))
        with self.assertRaises(DomainError):
            fam.set(0, (32,), 1)
        with self.assertRaises(DomainError):
            ArrayFamily(40, 16, 1)


if __name__ == "__main__":
    unittest.main()
