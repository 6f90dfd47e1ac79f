"""
🧰 公共模块测试

测试配置、计步器、只读表与审计影子计数
"""

import json
import sys
import tempfile
import unittest
from pathlib import Path

# 添加父目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from common.config import RamConfig
from common.errors import (
    BudgetExceeded, ConfigError, DomainError, ParseError, RamError, ValueBoundExceeded,
)
from common.meter import StepMeter, Table, audit


class TestConfig(unittest.TestCase):
    """RamConfig 测试"""

    def test_defaults(self):
        """默认值"""
        cfg = RamConfig()
        self.assertEqual((cfg.c, cfg.d, cfg.max_steps), (8, 3, 10 ** 9))
        self.assertTrue(1 <= cfg.workers <= 4)

    def test_invalid_value(self):
        """非法值报 ConfigError"""
        with self.assertRaises(ConfigError):
            RamConfig(c=0)
        with self.assertRaises(ConfigError):
            RamConfig(root_exponents=[1])

    def test_overrides(self):
        """覆盖字段，None 忽略"""
        cfg = RamConfig().with_overrides(c=4, d=None)
        self.assertEqual((cfg.c, cfg.d), (4, 3))
        with self.assertRaises(ConfigError):
            RamConfig().with_overrides(colour="red")

    def test_save_load(self):
        """JSON 保存与加载"""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "config.json"
            RamConfig(c=5, seed=11).save(path)
            loaded = RamConfig.load(path)
            self.assertEqual((loaded.c, loaded.seed), (5, 11))

    def test_unknown_key_in_file(self):
        """配置文件中的未知项"""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "config.json"
            path.write_text(json.dumps({"c": 2, "speed": 3}), encoding="utf-8")
            with self.assertRaises(ConfigError):
                RamConfig.load(path)


class TestErrors(unittest.TestCase):
    """异常层次测试"""

    def test_pc_in_message(self):
        """pc 出现在消息中且不被覆盖"""
        err = RamError("坏了").with_pc(3).with_pc(9)
        self.assertEqual(err.pc, 3)
        self.assertIn("pc=3", str(err))

    def test_parse_error_line(self):
        """ParseError 带行号"""
        err = ParseError("未知助记符", line=7)
        self.assertEqual(err.line, 7)
        self.assertTrue(str(err).startswith("第 7 行"))


class TestMeter(unittest.TestCase):
    """StepMeter 测试"""

    def test_categories(self):
        """每类操作计 1 步"""
        meter = StepMeter()
        meter.add(1, 2)
        meter.eq(1, 1)
        meter.assign(5)
        cells = [0, 0]
        meter.write(cells, 1, 4)
        self.assertEqual(meter.steps, 4)
        self.assertEqual(cells, [0, 4])
        self.assertEqual(meter.counts["test"], 1)

    def test_add_bound(self):
        """加法结果上界"""
        meter = StepMeter(bound=10)
        self.assertEqual(meter.add(4, 6), 10)
        with self.assertRaises(ValueBoundExceeded):
            meter.add(5, 6)

    def test_limit(self):
        """保护上限"""
        meter = StepMeter(limit=5)
        meter.charge(5)
        with self.assertRaises(BudgetExceeded):
            meter.tick("add")

    def test_snapshot(self):
        """快照包含总步数"""
        meter = StepMeter()
        meter.charge(7, "DIFF")
        snap = meter.snapshot()
        self.assertEqual((snap["steps"], snap["DIFF"]), (7, 7))


class TestTable(unittest.TestCase):
    """只读表测试"""

    def test_set_and_read(self):
        """写入、冻结、读取"""
        table = Table("T", (2, 3), bound=10)
        table.set(1, 2, 9)
        table.freeze()
        meter = StepMeter()
        self.assertEqual(meter.read(table, 1, 2), 9)
        self.assertEqual(meter.counts["lookup"], 1)
        with self.assertRaises(RuntimeError):
            table.set(0, 0, 1)

    def test_bounds(self):
        """下标越界与值越界"""
        table = Table("T", (4,), bound=3)
        with self.assertRaises(ValueBoundExceeded):
            table.set(0, 4)
        with self.assertRaises(DomainError):
            table.peek(4)

    def test_audit_counts_reads(self):
        """审计影子与计步器读取次数一致"""
        table = Table("T", (5,)).freeze()
        meter = StepMeter()
        with audit() as reads:
            for i in range(5):
                meter.read(table, i)
            table.peek(0)
        self.assertEqual(reads[0], 5)
        self.assertEqual(meter.counts["lookup"], 5)

    def test_from_list(self):
        """从列表恢复并冻结"""
        table = Table.from_list("T", (2, 2), [1, 2, 3, 4])
        self.assertTrue(table.frozen)
        self.assertEqual(table.peek(1, 0), 3)


if __name__ == "__main__":
    unittest.main()
