"""
🔲 元胞自动机编译测试

模拟、精确时间约定、组合、分块表与常数时间查询
"""

import random
import sys
import tempfile
import unittest
from pathlib import Path

import pytest

# 添加父目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from common.errors import (
    BuildTooSmall, CompositionError, ContractViolation, DomainError, OperandOutOfRange,
)
from common.meter import StepMeter, audit
from ca_compile import (
    CellularAutomaton, ECHO_FORWARD, Sync, WordConfig, block_row, build_ca_tables,
    ca_op, ca_params, ca_run, ca_step, check_linear_contract, check_word, code_entry,
    complement_ca, compose, default_samples, demo_ca, demo_oracle, echo_ca,
    encode_input, load_ca, min_admissible_n, parity_ca, project_config,
    query_step_bound, require_contract, save_ca, sharp_block, simulate_op,
)
from ca_compile.demos import encode

SHARP, Q_SHARP, OUT0, OUT1 = 4, 5, 6, 7


def _small_ca(rule, c=1, name="small"):
    """r=1 的 8 状态自动机：0..3 字母, 4 ♯, 5 q♯, 6/7 输出"""
    return CellularAutomaton.from_rule(8, rule, r=1, c=c, q_out=(Q_SHARP, OUT0, OUT1),
                                       q_sharp=Q_SHARP, pi={OUT1: 1}, name=name)


def identity_ca():
    return _small_ca(lambda a, b, x: b, name="identity")


def flip_ca():
    """t=1 时每个字母直接变成 out(X₁ 位)"""
    def rule(a, b, x):
        if b < 4:
            return OUT0 + ((b >> 1) & 1)
        return b
    return _small_ca(rule, name="flip")


def growth_ca():
    """♯ 右边有非 ♯ 时长出字母 0，每步向左扩一格"""
    def rule(a, b, x):
        if b == SHARP and x != SHARP:
            return 0
        return b
    return _small_ca(rule, name="growth")


def word_of(x: int, n: int):
    """X₁ = x 的长 n 字（N 位取 0）"""
    return [2 * ((x >> i) & 1) for i in range(n - 1, -1, -1)]


def middle_block_direct(ca, triple, ell, rho):
    """直接对三块做 rho 步同步更新，读出中间块"""
    s = ca.s
    cells = []
    for _ in range(3 * ell):
        triple, q = divmod(triple, s)
        cells.append(q)
    cfg = ca_run(ca, WordConfig(tuple(cells), ca.sharp), rho)
    value = 0
    for i in range(2 * ell - 1, ell - 1, -1):
        value = value * s + cfg[i]
    return value


class TestSimulation(unittest.TestCase):
    """单步与多步模拟"""

    def test_all_sharp_stays(self):
        """全 ♯ 格局一步后仍为全 ♯"""
        ca = echo_ca()
        cfg = ca_step(WordConfig((), ca.sharp), ca)
        self.assertEqual(cfg.width, 0)

    def test_identity_keeps_single_cell(self):
        """恒等规则下单细胞字不变"""
        ca = identity_ca()
        self.assertEqual(ca_run(ca, [2], 5).to_word(), [2])

    def test_run_zero_steps(self):
        """t=0 即初始字，细胞 0 是最右字母"""
        ca = echo_ca()
        cfg = ca_run(ca, [3, 0, 2], 0)
        self.assertEqual(cfg.cells, (2, 0, 3))
        self.assertEqual(cfg[5], ca.sharp)

    def test_run_composes(self):
        """ca_run(a+b) = ca_run(ca_run(a), b)"""
        ca = parity_ca()
        word = [2, 0, 2, 2, 0]
        self.assertEqual(ca_run(ca, word, 9), ca_run(ca, ca_run(ca, word, 4), 5))

    def test_demo_first_step(self):
        """回显自动机第一步：细胞 0 成为预备将军，其余进入 I0"""
        ca = echo_ca()
        cfg = ca_run(ca, [3, 0, 2], 1)
        self.assertEqual(cfg.to_word(), [encode(Sync.I0, 1), encode(Sync.I0, 0), encode(Sync.P, 1)])

    def test_negative_steps(self):
        """负步数报 DomainError"""
        with self.assertRaises(DomainError):
            ca_run(echo_ca(), [1], -1)


class TestDemos(unittest.TestCase):
    """自带同步层的演示自动机"""

    @classmethod
    def setUpClass(cls):
        cls.cas = {name: demo_ca(name) for name in ("echo", "complement", "parity")}

    def test_contract_on_default_samples(self):
        """三个演示自动机在默认样本上满足精确时间约定"""
        for name, ca in self.cas.items():
            verdict = check_linear_contract(ca, default_samples(ca))
            self.assertTrue(verdict.ok, f"{name}: {verdict.reason}")
            self.assertEqual(verdict.checked, 4 + 16 + 64 + 256 + 8 * 4)

    def test_fires_exactly_at_3n(self):
        """n = 1..24 时 3n−1 步无输出、3n 步全部输出"""
        ca = self.cas["echo"]
        rng = random.Random(5)
        for n in range(1, 25):
            word = [rng.randrange(4) for _ in range(n)]
            before = ca_run(ca, word, 3 * n - 1)
            self.assertFalse(any(ca.is_output(q) for q in before.cells))
            after = ca_step(before, ca)
            self.assertEqual(after.width, n)
            self.assertTrue(all(q in (OUT0, OUT1) for q in after.cells))

    def test_outputs_match_oracle(self):
        """输出等于回显、取反、前缀异或"""
        rng = random.Random(11)
        for name, ca in self.cas.items():
            for _ in range(30):
                n = rng.randrange(1, 14)
                x = rng.randrange(1 << n)
                got = project_config(ca, ca_run(ca, word_of(x, n), 3 * n))
                self.assertEqual(got, demo_oracle(name, x, n), f"{name} x={x} n={n}")

    def test_parity_oracle_values(self):
        """前缀异或：0b1011 → 0b1101"""
        self.assertEqual(demo_oracle("parity", 0b1011, 4), 0b1101)
        self.assertEqual(demo_oracle("complement", 0b1011, 4), 0b0100)

    def test_unknown_demo(self):
        """未知名字报 DomainError"""
        with self.assertRaises(DomainError):
            demo_ca("multiply")


class TestContract(unittest.TestCase):
    """约定检查的反例"""

    def test_early_output(self):
        """t=1 就输出的自动机在 n=2 时违反约定"""
        ca = flip_ca()
        self.assertTrue(check_linear_contract(ca, [(2,)]).ok)
        verdict = check_linear_contract(ca, [(2,), (2, 0)])
        self.assertFalse(verdict.ok)
        self.assertEqual(verdict.t, 1)
        self.assertEqual(verdict.sample, (2, 0))
        self.assertEqual(verdict.checked, 2)

    def test_width_overrun(self):
        """向左生长的自动机在 t=1 宽度越界"""
        t, reason = check_word(growth_ca(), [1])
        self.assertEqual(t, 1)
        self.assertIn("宽度", reason)

    def test_require_contract_raises(self):
        """require_contract 把违反转成 ContractViolation"""
        with self.assertRaises(ContractViolation):
            require_contract(flip_ca(), [(1, 1, 1)])

    def test_sharp_must_be_permanent(self):
        """δ(q,♯,♯) ≠ ♯ 或从字母产生 ♯ 都被拒绝"""
        with self.assertRaises(ContractViolation):
            _small_ca(lambda a, b, x: 0 if b == SHARP else b)
        with self.assertRaises(ContractViolation):
            _small_ca(lambda a, b, x: SHARP if b == 1 else b)

    def test_bad_samples(self):
        """空字或非字母样本报 DomainError"""
        with self.assertRaises(DomainError):
            check_word(flip_ca(), [])
        with self.assertRaises(DomainError):
            check_word(flip_ca(), [SHARP])


class TestCompose(unittest.TestCase):
    """自动机组合"""

    def test_flip_then_flip(self):
        """flip∘flip 在 3n 步时输出 X₁"""
        both = compose(flip_ca(), {OUT0: 0, OUT1: 2}, flip_ca())
        self.assertEqual(both.s, 15)
        self.assertEqual(both.c, 3)
        for x, n in ((2, 2), (5, 3), (0, 1), (13, 4)):
            cfg = ca_run(both, word_of(x, n), 3 * n)
            self.assertEqual(project_config(both, cfg), x)

    def test_demo_composition_matches_sequential(self):
        """parity 再 complement 等于分两次运行"""
        first, second = parity_ca(), complement_ca().with_prefix("b:")
        both = compose(first, ECHO_FORWARD, second)
        rng = random.Random(3)
        for _ in range(8):
            n = rng.randrange(1, 9)
            x = rng.randrange(1 << n)
            mid = ca_run(first, word_of(x, n), 3 * n)
            relabelled = [ECHO_FORWARD[q] for q in mid.to_word()]
            expected = project_config(second, ca_run(second, relabelled, 3 * n))
            got = project_config(both, ca_run(both, word_of(x, n), both.c * n))
            self.assertEqual(got, expected)
            self.assertEqual(got, demo_oracle("complement", demo_oracle("parity", x, n), n))

    def test_overlapping_labels(self):
        """状态名重叠报 CompositionError"""
        with self.assertRaises(CompositionError):
            compose(echo_ca(), ECHO_FORWARD, echo_ca())

    def test_bad_forward_map(self):
        """pi1 缺少输出状态或映射到非字母"""
        with self.assertRaises(CompositionError):
            compose(flip_ca(), {OUT0: 0}, flip_ca())
        with self.assertRaises(CompositionError):
            compose(flip_ca(), {OUT0: 0, OUT1: 9}, flip_ca())


class TestSerialization(unittest.TestCase):
    """JSON 读写"""

    def test_save_load(self):
        """保存后读回与原自动机相同"""
        ca = complement_ca()
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "complement.json"
            save_ca(ca, path)
            self.assertEqual(load_ca(path), ca)


class TestParams(unittest.TestCase):
    """分块参数与编码"""

    def test_code_golden(self):
        """code(13, 7, 9) 的 γ 进制数字为 (5,3,2,7)"""
        self.assertEqual(encode_input(13, (7, 9), 1), [5, 3, 2, 7])
        self.assertEqual(code_entry((13, 7, 9), 4), 2775)

    def test_params_at_2048(self):
        """s=48, c=3, d=1, N=2048: D=17, L=12, ℓ=1, c0=51"""
        p = ca_params(complement_ca(), 2048, 1)
        self.assertEqual((p.D, p.L, p.ell, p.c0, p.c1, p.rho, p.lam), (17, 12, 1, 51, 17, 0, 0))
        self.assertTrue(p.admissible)
        self.assertEqual(p.round_steps(), [1] * 36 + [0] * 15)
        self.assertEqual(p.block_widths(), [1] * 12 + [0] * 5)

    def test_block_counts_fixed_across_n(self):
        """c0、c1 只由 (s, c, d) 决定，轮步数之和为 c·L"""
        ca = complement_ca()
        for n in (2048, 8192, 65536, 2 ** 20):
            p = ca_params(ca, n, 1)
            self.assertEqual((p.c0, p.c1), (51, 17))
            self.assertEqual(sum(p.round_steps()), 3 * p.L)
            self.assertEqual(sum(p.block_widths()), p.L)
            self.assertLessEqual(max(p.round_steps()), p.ell)
        p = ca_params(ca, 2 ** 20, 1)
        self.assertEqual((p.L, p.ell, p.rho, p.lam), (21, 2, 1, 1))

    def test_build_too_small(self):
        """N=1024 放不下 48³ 的局部转移表，最小可用 N=1728"""
        ca = complement_ca()
        self.assertEqual(min_admissible_n(ca, 1), 1728)
        with self.assertRaises(BuildTooSmall) as cm:
            build_ca_tables(ca, 1024, 1)
        self.assertEqual(cm.exception.min_n, 1728)

    def test_sharp_block(self):
        """ℓ=1 时 ♯ 块就是 γ"""
        self.assertEqual(sharp_block(complement_ca(), 1), 4)


class TestCaOp(unittest.TestCase):
    """常数时间查询"""

    N, D = 2048, 1

    @classmethod
    def setUpClass(cls):
        cls.ca = complement_ca()
        cls.tables = build_ca_tables(cls.ca, cls.N, cls.D)

    def test_small_tables(self):
        """PROJECT(♯ 块)=0，CONVERT 在 ℓ=1 时不变"""
        t = self.tables.tables
        self.assertEqual(t["PROJECT"].peek(sharp_block(self.ca, 1)), 0)
        self.assertEqual(t["PROJECT"].peek(OUT1), 1)
        for u in range(4):
            self.assertEqual(t["CONVERT"].peek(1, u), u)
        self.assertEqual(t["CONVERT"].peek(0, 0), 0)
        self.assertEqual(t["CODE"].peek(0, 0), 0)

    def test_lt_matches_direct_simulation(self):
        """100 个随机三块的 LT 与直接模拟一致"""
        lt = self.tables.tables["LT"]
        rng = random.Random(8)
        for _ in range(100):
            triple = rng.randrange(self.ca.s ** 3)
            self.assertEqual(lt.peek(1, triple), middle_block_direct(self.ca, triple, 1, 1))
            self.assertEqual(lt.peek(0, triple), triple // self.ca.s % self.ca.s)

    def test_complement_random(self):
        """200 个随机 X₁ 的结果等于 L 位取反"""
        rng = random.Random(21)
        L = self.tables.params.L
        for _ in range(200):
            x = rng.randrange(self.N)
            self.assertEqual(ca_op(self.tables, x), (1 << L) - 1 - x)

    def test_zero_operand(self):
        """全零操作数等于直接模拟"""
        self.assertEqual(ca_op(self.tables, 0), simulate_op(self.ca, self.N, (0,), self.D))

    def test_rows_match_block_decomposition(self):
        """每轮之后的块行等于直接运行到 min(iℓ, c·L) 的分块"""
        p = self.tables.params
        x = 1234
        trace = []
        ca_op(self.tables, x, trace=trace)
        word = encode_input(self.N, (x,), self.D)
        self.assertEqual(len(trace), p.c0 + 1)
        for i, row in enumerate(trace):
            t = min(i * p.ell, self.ca.c * p.L)
            cfg = ca_run(self.ca, word, t)
            self.assertEqual(row, block_row(self.ca, cfg, p.ell, p.c0), f"第 {i} 行")

    def test_operand_range(self):
        """操作数越界或个数不对报 OperandOutOfRange"""
        with self.assertRaises(OperandOutOfRange):
            ca_op(self.tables, self.N)
        with self.assertRaises(OperandOutOfRange):
            ca_op(self.tables)
        with self.assertRaises(OperandOutOfRange):
            ca_op(self.tables, 1, 2)

    def test_query_steps_bounded(self):
        """查询步数相同且恰好等于只依赖 (s,c,d,r) 的上界"""
        steps = set()
        for x in (0, 1, 777, self.N - 1):
            meter = StepMeter()
            ca_op(self.tables, x, meter=meter)
            steps.add(meter.steps)
        self.assertEqual(len(steps), 1)
        self.assertEqual(steps.pop(), query_step_bound(self.ca, self.D))

    def test_every_table_read_is_metered(self):
        """审计计数等于按块数推出的查表次数"""
        p = self.tables.params
        with audit() as reads:
            ca_op(self.tables, 99)
        self.assertEqual(reads[0], 2 * p.c1 + p.c0 * p.c0 + p.c0)

    @pytest.mark.slow
    def test_complement_thousand(self):
        """10³ 个随机 X₁ 与直接模拟一致"""
        rng = random.Random(1000)
        for _ in range(1000):
            x = rng.randrange(self.N)
            self.assertEqual(ca_op(self.tables, x), simulate_op(self.ca, self.N, (x,), self.D))


@pytest.mark.slow
class TestCaOpSlow(unittest.TestCase):
    """更大的表与 ℓ=2 的分块"""

    def test_echo_and_parity_end_to_end(self):
        """回显与前缀异或的 ca_op 等于 t=cL 的直接投影"""
        rng = random.Random(44)
        for ca in (echo_ca(), parity_ca()):
            tables = build_ca_tables(ca, 2048, 1)
            for _ in range(100):
                x = rng.randrange(2048)
                self.assertEqual(ca_op(tables, x), simulate_op(ca, 2048, (x,), 1))

    def test_steps_flat_across_n(self):
        """N=2048、8192、65536 的查询步数完全相同，且等于上界"""
        ca = complement_ca()
        bound = query_step_bound(ca, 1)
        steps = set()
        for n in (2048, 8192, 65536):
            tables = build_ca_tables(ca, n, 1)
            meter = StepMeter()
            ca_op(tables, n - 1, meter=meter)
            steps.add(meter.steps)
            self.assertEqual(ca_op(tables, n - 1), simulate_op(ca, n, (n - 1,), 1))
        self.assertEqual(steps, {bound})

    def test_two_cell_blocks(self):
        """s=8, N=4096: ℓ=2、ρ=1、λ=1 的分块与直接模拟一致"""
        ca = flip_ca()
        tables = build_ca_tables(ca, 4096, 1)
        p = tables.params
        self.assertEqual((p.ell, p.rho, p.lam), (2, 1, 1))
        lt = tables.tables["LT"]
        rng = random.Random(6)
        for _ in range(100):
            triple = rng.randrange(ca.s ** 6)
            for rho in (0, 1, 2):
                self.assertEqual(lt.peek(rho, triple), middle_block_direct(ca, triple, 2, rho))
        for _ in range(100):
            x = rng.randrange(4096)
            self.assertEqual(ca_op(tables, x), simulate_op(ca, 4096, (x,), 1))
            self.assertEqual(ca_op(tables, x), x)


if __name__ == "__main__":
    unittest.main()
