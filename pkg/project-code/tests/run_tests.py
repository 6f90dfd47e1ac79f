"""
🧪 测试运行器

用 pytest 跑测试，按模块汇总通过/失败/跳过数与耗时

用法:
    python tests/run_tests.py              全部测试
    python tests/run_tests.py --fast       跳过 @pytest.mark.slow
    python tests/run_tests.py test_arith   单个模块
"""

import sys
import time
from collections import defaultdict
from pathlib import Path
from typing import Dict, List

import pytest
from rich.console import Console
from rich.table import Table

TESTS_DIR = Path(__file__).parent

# 添加父目录到路径
sys.path.insert(0, str(TESTS_DIR.parent))

MODULES = (
    "test_common", "test_ram_core", "test_lowering", "test_arith",
    "test_mem_ext", "test_ca_compile", "test_harness",
)
OUTCOMES = ("passed", "failed", "skipped")


class ModuleTally:
    """pytest 插件：按模块累计每个测试的结果与耗时"""

    def __init__(self):
        self.counts: Dict[str, Dict[str, int]] = defaultdict(lambda: dict.fromkeys(OUTCOMES, 0))
        self.seconds: Dict[str, float] = defaultdict(float)

    def pytest_runtest_logreport(self, report):
        module = Path(report.nodeid.split("::")[0]).stem
        self.seconds[module] += report.duration
        # setup 阶段的跳过与出错也算一个测试
        if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
            self.counts[module][report.outcome] += 1


def _render(tally: ModuleTally, elapsed: float, console: Console):
    table = Table(title="📈 模块统计")
    table.add_column("模块")
    for name in OUTCOMES:
        table.add_column(name, justify="right")
    table.add_column("耗时(s)", justify="right")
    for module in sorted(tally.counts):
        row = tally.counts[module]
        table.add_row(module, *(str(row[k]) for k in OUTCOMES), f"{tally.seconds[module]:.2f}")
    console.print(table)
    failed = sum(row["failed"] for row in tally.counts.values())
    status = "[red]❌ 有失败[/red]" if failed else "[green]✅ 全部通过[/green]"
    console.print(f"{status}  总耗时 {elapsed:.2f}s")


def run(modules: List[str], fast: bool = False) -> int:
    console = Console()
    args = [str(TESTS_DIR / f"{m}.py") for m in modules] + ["-q", "-p", "no:cacheprovider"]
    if fast:
        args += ["-m", "not slow"]
    console.rule("📋 RAM+ 测试套件")
    tally = ModuleTally()
    started = time.time()
    code = pytest.main(args, plugins=[tally])
    _render(tally, time.time() - started, console)
    return int(code)


if __name__ == "__main__":
    names = [a for a in sys.argv[1:] if not a.startswith("--")]
    unknown = [n for n in names if n not in MODULES]
    if unknown:
        print(f"未知的测试模块: {', '.join(unknown)}（可用: {', '.join(MODULES)}）")
        sys.exit(2)
    sys.exit(run(names or list(MODULES), fast="--fast" in sys.argv))
