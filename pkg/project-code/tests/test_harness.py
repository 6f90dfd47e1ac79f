"""
📏 测量工具与命令行测试

测试参数生成、N 扫描判定、预言机对照（含故障注入）、报告与 CLI 退出码
"""

import functools
import json
import random
import sys
import tempfile
import unittest
from pathlib import Path

import pytest
from click.testing import CliRunner

# 添加父目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from common.config import RamConfig
from common.errors import BuildTooSmall, ConfigError, DomainError
from arith_lib import build_context, get_op, registry
from ram_core import FILL_AND_ECHO_AB
from harness import (
    CA_OP, CSV_COLUMNS, SweepResult, arg_domain, cell_rng, constant_ok, exhaustive_args,
    is_skipped, linear_ok, load_results, oracle_check, parse_n_set, random_args,
    save_result, sweep, to_csv, to_json,
)
from cli import EXIT_INPUT, cli

SERIAL = RamConfig(d=2, workers=1)


@functools.lru_cache(maxsize=None)
def _ctx(n: int, d: int = 2):
    return build_context(n, d=d)


class TestGenerators(unittest.TestCase):
    """按定义域生成参数"""

    @classmethod
    def setUpClass(cls):
        cls.ctx = _ctx(1024)

    def test_samples_in_domain(self):
        """每个运算的随机参数都在自己的定义域内"""
        rng = random.Random(3)
        for name, spec in registry((2, 3)).items():
            domain = arg_domain(name)
            for _ in range(50):
                args = domain.sample(self.ctx, rng)
                self.assertEqual(len(args), spec.arity, name)
                self.assertTrue(domain.accepts(self.ctx, args), f"{name}{args}")

    def test_unknown_op(self):
        """没有生成器的运算"""
        with self.assertRaises(DomainError):
            arg_domain("sqrt_floor")
        self.assertIs(arg_domain("root5"), arg_domain("root2"))

    def test_exhaustive_substring(self):
        """x < 8 时 substring 的全部参数"""
        cases = list(exhaustive_args("substring", self.ctx, cap=8))
        self.assertEqual(len(cases), 1 + 1 + 2 * 3 + 4 * 6)
        self.assertIn((5, 3, 1), cases)
        self.assertNotIn((5, 4, 1), cases)

    def test_exhaustive_division_excludes_zero(self):
        """除数不取 0"""
        cases = list(exhaustive_args("divide", self.ctx, cap=4))
        self.assertEqual(len(cases), 4 * 3)
        self.assertTrue(all(b > 0 for _, b in cases))

    def test_gen_root_skips_forbidden(self):
        """N=1024, d=2 时 7 是禁用形式，8 走按位二分"""
        self.assertTrue(is_skipped("gen_root", self.ctx, (100, 7)))
        self.assertFalse(is_skipped("gen_root", self.ctx, (100, 8)))
        self.assertFalse(is_skipped("gen_root", self.ctx, (100, 1)))
        self.assertFalse(is_skipped("divide", self.ctx, (100, 7)))

    def test_cell_rng_reproducible(self):
        """同一 (种子, 运算, N) 得到同一序列"""
        a = [random_args("xor", self.ctx, cell_rng(7, "xor", 1024)) for _ in range(3)]
        b = [random_args("xor", self.ctx, cell_rng(7, "xor", 1024)) for _ in range(3)]
        self.assertEqual(a, b)
        other = random_args("xor", self.ctx, cell_rng(8, "xor", 1024))
        self.assertNotEqual(a[0], other)


class TestVerdictRules(unittest.TestCase):
    """判定规则"""

    def test_linear(self):
        """相邻 N、2N 的比值不超过 2.5"""
        self.assertTrue(linear_ok({1024: 100, 2048: 210, 4096: 500}))
        self.assertFalse(linear_ok({1024: 100, 2048: 200, 4096: 600}))
        # N < 2^10 的一对不参与判定
        self.assertTrue(linear_ok({256: 10, 512: 100}))
        # 不相邻的 N 不比较
        self.assertTrue(linear_ok({1024: 10, 4096: 1000}))

    def test_constant(self):
        """最大 N 的最大步数不超过最小 N"""
        self.assertTrue(constant_ok({128: 50, 256: 60, 512: 50}))
        self.assertFalse(constant_ok({128: 50, 512: 51}))
        self.assertTrue(constant_ok({}))

    def test_parse_n_set(self):
        """几何区间与逗号列表"""
        self.assertEqual(parse_n_set("128..1024"), [128, 256, 512, 1024])
        self.assertEqual(parse_n_set("128..65536")[-1], 65536)
        self.assertEqual(parse_n_set("64, 128,64"), [64, 128])
        for bad in ("abc", "100..10", "1..8"):
            with self.assertRaises(ConfigError):
                parse_n_set(bad)


class TestSweep(unittest.TestCase):
    """N 扫描"""

    def test_divide_constant_query(self):
        """divide 在 N=128 与 N=4096 上的查询步数判定通过"""
        result = sweep("divide", [128, 4096], samples=10, seed=7, config=SERIAL)
        self.assertEqual(result.n_values, [128, 4096])
        self.assertTrue(result.verdict_constant_query)
        self.assertEqual(result.samples, 20)
        self.assertGreater(result.preproc_steps[4096], result.preproc_steps[128])
        self.assertIn("small_division", result.family_steps[128])

    def test_reproducible(self):
        """相同种子的报告逐字节相同"""
        first = sweep("xor", [1024, 2048], samples=5, seed=11, config=SERIAL)
        second = sweep("xor", [1024, 2048], samples=5, seed=11, config=SERIAL)
        self.assertEqual(to_json([first]), to_json([second]))

    def test_single_n_is_vacuous(self):
        """只有一个 N 时判定平凡成立并留下说明"""
        result = sweep("divide", [128], samples=3, config=SERIAL)
        self.assertTrue(result.ok)
        self.assertEqual(len(result.notes), 1)

    def test_too_small_n_is_skipped(self):
        """N=70 时开 3 次方的根表 M′=729 超过 c·N，跳过"""
        result = sweep("root3", [70, 128], samples=3, config=SERIAL)
        self.assertEqual(result.skipped_n, [70])
        self.assertEqual(result.n_values, [128])

    def test_divide_small_n(self):
        """N=16 的除法也能测量"""
        result = sweep("divide", [16, 128], samples=3, config=SERIAL)
        self.assertEqual(result.skipped_n, [])
        self.assertEqual(result.n_values, [16, 128])
        self.assertTrue(result.verdict_constant_query)

    def test_gen_root_counts_skips(self):
        """gen_root 跳过禁用形式的指数并计数"""
        result = sweep("gen_root", [1024], samples=40, seed=7, config=SERIAL)
        self.assertGreater(result.skipped_args, 0)
        self.assertEqual(result.samples + result.skipped_args, 40)

    def test_unknown_op(self):
        """未知运算"""
        with self.assertRaises(DomainError):
            sweep("sqrt_floor", [128], config=SERIAL)

    def test_ca_op(self):
        """ca_op：N=1024 放不下表被跳过，N=2048 与 4096 的步数相同且等于静态上界"""
        config = RamConfig(d=1, workers=1)
        result = sweep(CA_OP, [1024, 2048, 4096], samples=3, config=config)
        self.assertEqual(result.skipped_n, [1024])
        self.assertEqual(result.n_values, [2048, 4096])
        self.assertEqual(set(result.query_steps_max.values()), {result.query_bound})
        self.assertTrue(result.verdict_constant_query, result.notes)

    @pytest.mark.slow
    def test_process_pool(self):
        """进程池与串行的结果一致"""
        parallel = sweep("xor", [1024, 2048, 4096], samples=5, seed=3,
                         config=RamConfig(d=2, workers=2))
        serial = sweep("xor", [1024, 2048, 4096], samples=5, seed=3, config=SERIAL)
        self.assertEqual(to_json([parallel]), to_json([serial]))

    @pytest.mark.slow
    def test_acceptance_divide(self):
        """divide 在 2^7..2^16 上两项判定都通过"""
        result = sweep("divide", parse_n_set("128..65536"), samples=1000, seed=7,
                       config=RamConfig(d=2))
        self.assertTrue(result.verdict_constant_query, result.notes)
        self.assertTrue(result.verdict_linear_preproc, result.notes)


class TestOracle(unittest.TestCase):
    """与整数预言机对照"""

    def test_exhaustive_small(self):
        """N=64, d=2 的一元运算穷举"""
        for name, expected in [("sqrt_ceil", 64), ("pred", 8 * 64)]:
            report = oracle_check(name, 64, d=2, mode="exhaustive", config=SERIAL)
            self.assertTrue(report.ok, report.examples)
            self.assertEqual(report.checked, expected)

    def test_exhaustive_divide_capped(self):
        """N=64, d=2 时操作数 < 16 的除法穷举"""
        report = oracle_check("divide", 64, d=2, mode="exhaustive", cap=16, config=SERIAL)
        self.assertTrue(report.ok, report.examples)
        self.assertEqual(report.checked, 16 * 15)

    @pytest.mark.slow
    def test_exhaustive_n64_all_ops(self):
        """N=64, d=2 时各运算在受限操作数上穷举"""
        ctx = _ctx(64)
        caps = {"divide": 16, "mod": 16, "div_by_small": 64, "div_close": 32, "division2": 16,
                "logarithm": 32, "root2": 512, "root3": 512, "xor": 32, "and": 32, "or": 32,
                "conc": 64, "bit": 64, "substring": 16}
        checked = []
        for name, cap in caps.items():
            op = get_op(name)
            try:
                ctx.require(*op.families)
            except BuildTooSmall:
                continue
            if name.startswith("root") and not ctx.roots[int(name[4:])].available:
                continue
            report = oracle_check(name, 64, mode="exhaustive", cap=cap, ctx=ctx, config=SERIAL)
            with self.subTest(op=name):
                self.assertTrue(report.ok, report.examples)
                self.assertGreater(report.checked, 0)
            checked.append(name)
        self.assertLessEqual({"divide", "mod", "div_by_small", "div_close", "xor"}, set(checked))

    def test_random_xor(self):
        """随机异或"""
        report = oracle_check("xor", 1024, d=2, count=50, config=SERIAL)
        self.assertTrue(report.ok, report.examples)
        self.assertEqual(report.checked, 50)

    def test_injected_diff_fault(self):
        """改坏 DIFFK 表的一个元素后出现不一致"""
        ctx = build_context(64, d=2, families=("small_division",))
        k = ctx.k6
        # 0 − 0 无借位：DIFFK[K][0] 本应为 K
        self.assertEqual(ctx.tables["DIFFK"].peek(k, 0), k)
        ctx.tables["DIFFK"].corrupt(k, 0, k + 1)
        report = oracle_check("divide", 64, count=50, ctx=ctx, config=SERIAL)
        self.assertGreater(report.mismatches, 0)
        self.assertFalse(report.to_dict()["ok"])
        self.assertLessEqual(len(report.examples), 20)

    def test_ca_op_matches_direct_run(self):
        """ca_op 与直接模拟的投影一致"""
        report = oracle_check(CA_OP, 2048, d=1, count=5, config=SERIAL)
        self.assertTrue(report.ok, report.examples)
        self.assertEqual(report.checked, 5)

    def test_bad_mode(self):
        """未知模式与 ca_op 穷举"""
        with self.assertRaises(ConfigError):
            oracle_check("xor", 64, mode="all")
        with self.assertRaises(ConfigError):
            oracle_check(CA_OP, 2048, mode="exhaustive")

    @pytest.mark.slow
    def test_random_xor_10k(self):
        """10⁴ 对随机异或"""
        report = oracle_check("xor", 1024, d=2, count=10 ** 4, config=SERIAL)
        self.assertEqual(report.mismatches, 0)

    @pytest.mark.slow
    def test_exhaustive_bits_n64(self):
        """N=64, d=2 时位串运算在操作数 < 256 上穷举"""
        for name in ("bit_length", "conc", "xor", "and", "or"):
            report = oracle_check(name, 64, d=2, mode="exhaustive", cap=256, config=SERIAL)
            self.assertTrue(report.ok, f"{name}: {report.examples}")


class TestReport(unittest.TestCase):
    """CSV / JSON 报告"""

    def _result(self) -> SweepResult:
        return SweepResult(
            op="divide", seed=7, n_values=[128, 256],
            preproc_steps={128: 10, 256: 20},
            family_steps={128: {"base": 10}, 256: {"base": 20}},
            query_steps_max={128: 5, 256: 5}, query_steps_mean={128: 4.5, 256: 5.0},
            samples=40,
        )

    def test_csv(self):
        """表头与每个 N 一行"""
        lines = to_csv([self._result()]).splitlines()
        self.assertEqual(lines[0], ",".join(CSV_COLUMNS))
        self.assertEqual(lines[1], "divide,128,10,5,4.5,40,linear=ok;constant=ok")
        self.assertEqual(len(lines), 3)

    def test_failed_verdict_text(self):
        """失败的判定写成 fail"""
        result = self._result()
        result.verdict_constant_query = False
        self.assertTrue(to_csv([result]).splitlines()[1].endswith("linear=ok;constant=fail"))
        self.assertFalse(json.loads(to_json([result]))["ok"])

    def test_save_and_load(self):
        """写出后再读入，CSV 不变"""
        result = self._result()
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "divide.json"
            save_result(result, path)
            loaded = load_results([path])
        self.assertEqual(to_csv(loaded), to_csv([result]))

    def test_load_rejects_other_json(self):
        """不是扫描结果的文件"""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "x.json"
            path.write_text('{"a": 1}', encoding='utf-8')
            with self.assertRaises(ConfigError):
                load_results([path])


class TestCli(unittest.TestCase):
    """命令行"""

    BASE = ["-q", "--log-level", "ERROR", "--workers", "1"]

    def setUp(self):
        self.runner = CliRunner()
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.program = self.dir / "echo.ab"
        self.program.write_text(FILL_AND_ECHO_AB, encoding='utf-8')
        self.input = self.dir / "in.txt"
        self.input.write_text("3\n2 1 0\n", encoding='utf-8')

    def tearDown(self):
        self.tmp.cleanup()

    def invoke(self, *args):
        return self.runner.invoke(cli, self.BASE + [str(a) for a in args])

    def json_of(self, result):
        self.assertEqual(result.exit_code, 0, result.output)
        return json.loads(result.output)

    def test_run(self):
        """示例程序在 N=3, I=[2,1,0] 上输出 I[1]"""
        data = self.json_of(self.invoke("run", self.program, "--input", self.input))
        self.assertEqual(data["outputs"], [1])
        self.assertEqual(data["steps"], 48)
        self.assertTrue(data["halted"])

    def test_run_with_size_only(self):
        """--n 给出全 0 输入；缺少 I 行的输入文件报输入错误"""
        echo = self.dir / "echo1.ab"
        echo.write_text("CST 1\nInput\nOutput\n", encoding='utf-8')
        data = self.json_of(self.invoke("run", echo, "--n", 3))
        self.assertEqual(data["outputs"], [0])
        self.assertTrue(data["halted"])
        short = self.dir / "short.txt"
        short.write_text("3\n", encoding='utf-8')
        self.assertEqual(self.invoke("run", self.program, "--input", short).exit_code, EXIT_INPUT)

    def test_lower_and_check(self):
        """AB -> 数组翻译与锁步检查"""
        data = self.json_of(self.invoke("lower", self.program))
        self.assertEqual((data["source"], data["target"]), ("ab", "array"))
        self.assertEqual(data["emap"]["k"], 1)
        verdict = self.json_of(self.invoke("check", self.program, "--input", self.input,
                                           "--random", 3, "--n", 3))
        self.assertTrue(verdict["ok"])
        self.assertEqual(verdict["checked"], 4)

    def test_op(self):
        """单次查询与预言机一致"""
        data = self.json_of(self.invoke("-d", 2, "op", "divide", 1000, 7, "--n", 128))
        self.assertEqual(data["result"], 142)
        self.assertTrue(data["match"])
        self.assertGreater(data["steps"], 0)

    def test_input_errors_exit_4(self):
        """除数为 0、参数个数不对、配置文件不存在"""
        self.assertEqual(self.invoke("-d", 2, "op", "divide", 5, 0, "--n", 128).exit_code,
                         EXIT_INPUT)
        self.assertEqual(self.invoke("-d", 2, "op", "divide", 5, "--n", 128).exit_code,
                         EXIT_INPUT)
        self.assertEqual(self.invoke("--config", self.dir / "missing.json", "ops").exit_code,
                         EXIT_INPUT)
        bad = self.dir / "bad.ab"
        bad.write_text("Jump 3\n", encoding='utf-8')
        self.assertEqual(self.invoke("run", bad, "--n", 1).exit_code, EXIT_INPUT)

    def test_config_file(self):
        """配置文件里的 d 生效，命令行覆盖优先"""
        path = self.dir / "config.json"
        RamConfig(d=2).save(path)
        data = self.json_of(self.invoke("--config", path, "op", "xor", 12, 10, "--n", 1024))
        self.assertEqual((data["d"], data["result"]), (2, 6))
        data = self.json_of(self.invoke("--config", path, "-d", 3, "op", "pred", 5, "--n", 1024))
        self.assertEqual((data["d"], data["result"]), (3, 4))

    def test_sweep_and_report(self):
        """扫描写出结果文件，report 汇总成 CSV"""
        out = self.dir / "divide.json"
        data = self.json_of(self.invoke("-d", 2, "sweep", "divide", "--n", "128,4096",
                                        "--samples", 5, "--out", out))
        self.assertTrue(data["ok"])
        result = self.invoke("report", out, "--csv")
        self.assertEqual(result.exit_code, 0, result.output)
        lines = result.output.splitlines()
        self.assertEqual(lines[0], ",".join(CSV_COLUMNS))
        self.assertEqual([ln.split(",")[1] for ln in lines[1:]], ["128", "4096"])

    def test_oracle(self):
        """oracle 子命令"""
        data = self.json_of(self.invoke("-d", 2, "oracle", "xor", "--n", 1024, "--count", 30))
        self.assertEqual((data["checked"], data["mismatches"]), (30, 0))

    def test_ca_commands(self):
        """自动机约定检查、查询与保存"""
        verdict = self.json_of(self.invoke("ca", "check", "--demo", "complement"))
        self.assertTrue(verdict["ok"])
        self.assertEqual(verdict["checked"], 372)
        x = 0b101101
        data = self.json_of(self.invoke("-d", 1, "ca", "op", x, "--demo", "complement",
                                        "--n", 2048))
        self.assertTrue(data["match"])
        self.assertEqual(data["result"], (1 << 12) - 1 - x)
        self.assertLessEqual(data["steps"], data["query_bound"])

    def test_ca_requires_source(self):
        """没有 --demo 也没有 --spec"""
        self.assertEqual(self.invoke("ca", "check").exit_code, EXIT_INPUT)

    def test_ops_listing(self):
        """列出运算"""
        data = self.json_of(self.invoke("ops"))
        self.assertIn("divide", data)
        self.assertIn("root3", data)
        self.assertIn(CA_OP, data)


if __name__ == '__main__':
    unittest.main()
