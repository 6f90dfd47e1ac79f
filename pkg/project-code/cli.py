#!/usr/bin/env python3
"""
⌨️ RAM+ 命令行

子命令：run | lower | check | op | oracle | sweep | ca (build/op/check) | report

机器可读的结果（JSON / CSV）写到 stdout，提示信息写到 stderr。

退出码：
    0  正常
    2  判定失败（扫描判定、忠实仿真反例、自动机约定）
    3  与整数预言机不一致
    4  输入错误（解析、定义域、配置、命令行参数）
"""

import json
import logging
import random
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import click
from rich.console import Console

from common.config import RamConfig
from common.errors import RamError
from common.logger import icon_for, setup_logging

from ram_core import InstrSet, RamInput, format_program, parse_program, run as run_program
from lowering import (
    check_faithful, lower_ab_to_array, lower_array_to_r, lower_r_to_ab, random_inputs,
)
from arith_lib import context_from_config, get_op, registry
from ca_compile import (
    DEMOS, build_ca_tables, ca_op, check_linear_contract, default_samples, demo_ca,
    load_ca, save_ca, simulate_op,
)
from harness import (
    CA_OP, MODES, load_results, oracle_check, parse_n_set, save_result, sweep, to_csv, to_json,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERDICT = 2
EXIT_MISMATCH = 3
EXIT_INPUT = 4

# 每种源指令集对应的翻译：AB → 数组，R → AB，数组 → R
LOWERINGS = {
    InstrSet.AB: lower_ab_to_array,
    InstrSet.R: lower_r_to_ab,
    InstrSet.ARRAY: lower_array_to_r,
}

ISET_CHOICE = click.Choice([s.value for s in InstrSet], case_sensitive=False)


class _State:
    """命令之间共享的配置与输出"""

    def __init__(self, config: RamConfig, quiet: bool):
        self.config = config
        self.quiet = quiet
        self.console = Console(stderr=True)

    def say(self, level: str, message: str):
        if not self.quiet:
            self.console.print(f"{icon_for(level)} {message}", markup=False, highlight=False)


class InputError(click.ClickException):
    exit_code = EXIT_INPUT

    def format_message(self) -> str:
        return f"{icon_for('ERROR')} {self.message}"


class RamGroup(click.Group):
    """把参数错误与 RamError 统一映射为退出码 4"""

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as e:
            e.exit_code = EXIT_INPUT
            raise

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_INPUT
            raise
        except RamError as e:
            detail = f" {e.context}" if e.context else ""
            raise InputError(f"{type(e).__name__}: {e}{detail}") from e


def _emit(data):
    click.echo(json.dumps(data, ensure_ascii=False, indent=2))


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise click.BadParameter(f"无法读取 {path}: {e}")


def _parse_ops(ops: Optional[str]):
    if not ops:
        return None
    return frozenset(name.strip().lower() for name in ops.split(",") if name.strip())


def _load_program(path: str, iset: str, ops: Optional[str]):
    return parse_program(_read_text(path), InstrSet(iset.lower()), _parse_ops(ops))


def _emap_dict(emap) -> dict:
    return {
        "k": emap.k, "halt": emap.halt, "c_mul": emap.c_mul, "c_add": emap.c_add,
        "blocks": [list(b) for b in emap.blocks],
        "reg_map": {space: {"target": rule.target_space, "offset": rule.offset,
                            "stride": rule.stride}
                    for space, rule in emap.reg_map.items()},
    }


@click.group(cls=RamGroup)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              help="JSON 配置文件")
@click.option("-c", "c", type=int, default=None, help="寄存器上界倍数（值 ≤ c·N）")
@click.option("-d", "d", type=int, default=None, help="多项式次数（操作数 < N^d）")
@click.option("--max-steps", type=int, default=None, help="解释器步数上限")
@click.option("--workers", type=int, default=None, help="并行进程数")
@click.option("--log-level", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"],
                                               case_sensitive=False), default=None)
@click.option("-q", "--quiet", is_flag=True, help="不打印提示信息")
@click.pass_context
def cli(ctx, config_path, c, d, max_steps, workers, log_level, quiet):
    """RAM+ 模型：解释器、翻译、常数时间算术与测量"""
    config = RamConfig.load(Path(config_path)) if config_path else RamConfig()
    config = config.with_overrides(c=c, d=d, max_steps=max_steps, workers=workers,
                                   log_level=log_level.upper() if log_level else None)
    setup_logging(config.log_level)
    ctx.obj = _State(config, quiet)


# ---------------------------------------------------------------------------
# 解释与翻译
# ---------------------------------------------------------------------------

def _input_from(input_path: Optional[str], n: Optional[int]) -> RamInput:
    if input_path:
        return RamInput.parse(_read_text(input_path))
    if n is None:
        raise click.UsageError("需要 --input 或 --n")
    return RamInput.size_only(n)


@cli.command()
@click.argument("program", type=click.Path(exists=True, dir_okay=False))
@click.option("--iset", type=ISET_CHOICE, default="ab", show_default=True)
@click.option("--ops", default=None, help="允许的运算，逗号分隔（默认 add）")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--n", type=int, default=None, help="只给出 N，输入寄存器全为 0")
@click.pass_obj
def run(state: _State, program, iset, ops, input_path, n):
    """运行程序，输出 RunResult JSON"""
    prog = _load_program(program, iset, ops)
    inp = _input_from(input_path, n)
    result = run_program(prog, inp, c=state.config.c, max_steps=state.config.max_steps)
    state.say("SUCCESS", f"{program}: {result.steps} 步，输出 {len(result.outputs)} 个值")
    _emit(result.to_dict())


@cli.command()
@click.argument("program", type=click.Path(exists=True, dir_okay=False))
@click.option("--iset", type=ISET_CHOICE, default="ab", show_default=True, help="源程序的指令集")
@click.option("--ops", default=None)
@click.option("--out", type=click.Path(dir_okay=False), help="把翻译后的程序写到文件")
@click.pass_obj
def lower(state: _State, program, iset, ops, out):
    """按源指令集翻译一步（AB→数组，R→AB，数组→R）"""
    prog = _load_program(program, iset, ops)
    target, emap = LOWERINGS[prog.iset](prog)
    text = format_program(target)
    if out:
        Path(out).write_text(text, encoding='utf-8')
        state.say("SUCCESS", f"已写出 {out}（{target.iset.value}，{target.r} 条指令）")
    _emit({"source": prog.iset.value, "target": target.iset.value,
           "instructions": target.r, "program": text, "emap": _emap_dict(emap)})


@cli.command()
@click.argument("program", type=click.Path(exists=True, dir_okay=False))
@click.option("--iset", type=ISET_CHOICE, default="ab", show_default=True)
@click.option("--ops", default=None)
@click.option("--input", "input_paths", multiple=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--random", "random_count", type=int, default=0, help="额外的随机输入个数")
@click.option("--n", type=int, default=8, show_default=True, help="随机输入的 N")
@click.option("--seed", type=int, default=None)
@click.pass_obj
def check(state: _State, program, iset, ops, input_paths, random_count, n, seed):
    """翻译后做锁步检查，输出 FaithfulVerdict JSON"""
    prog = _load_program(program, iset, ops)
    target, emap = LOWERINGS[prog.iset](prog)
    inputs: List[RamInput] = [RamInput.parse(_read_text(p)) for p in input_paths]
    if random_count:
        rng = random.Random(state.config.seed if seed is None else seed)
        inputs.extend(random_inputs(rng, random_count, n))
    if not inputs:
        raise click.UsageError("至少需要一个 --input 或 --random K")
    verdict = check_faithful(prog, target, emap, inputs, c=state.config.c,
                             workers=state.config.workers)
    _emit(verdict.to_dict())
    if not verdict.ok:
        state.say("ERROR", f"发现反例: {verdict.counterexample.reason}")
        sys.exit(EXIT_VERDICT)
    state.say("SUCCESS", f"{verdict.checked} 个输入全部忠实，k={verdict.k}")


# ---------------------------------------------------------------------------
# 算术查询与测量
# ---------------------------------------------------------------------------

def _jsonable(value):
    return list(value) if isinstance(value, tuple) else value


@cli.command()
@click.argument("name")
@click.argument("args", nargs=-1, type=int)
@click.option("--n", type=int, required=True, help="输入规模 N")
@click.pass_obj
def op(state: _State, name, args, n):
    """预处理后执行一次查询，并与整数预言机对照"""
    config = state.config
    spec = get_op(name, config.root_exponents)
    if len(args) != spec.arity:
        raise click.UsageError(f"{name} 需要 {spec.arity} 个参数，收到 {len(args)} 个")
    ctx = context_from_config(n, config, families=spec.families)
    meter = ctx.query_meter()
    result = _jsonable(spec.fn(ctx, *args, meter=meter))
    expected = _jsonable(spec.oracle(ctx, *args))
    _emit({"op": name, "n": n, "d": ctx.d, "args": list(args), "result": result,
           "oracle": expected, "match": result == expected, "steps": meter.steps,
           "counts": meter.snapshot(), "preproc_steps": ctx.steps_for(spec.families)})
    if result != expected:
        state.say("ERROR", f"{name}{tuple(args)} = {result}，预言机给出 {expected}")
        sys.exit(EXIT_MISMATCH)


@cli.command()
@click.argument("name")
@click.option("--n", type=int, required=True)
@click.option("--mode", type=click.Choice(MODES), default="random", show_default=True)
@click.option("--count", type=int, default=1000, show_default=True, help="随机模式的样本数")
@click.option("--cap", type=int, default=None, help="穷举时操作数的上限")
@click.option("--seed", type=int, default=None)
@click.pass_obj
def oracle(state: _State, name, n, mode, count, cap, seed):
    """与精确整数运算对照，输出不一致报告"""
    config = state.config
    report = oracle_check(name, n, mode=mode, count=count, cap=cap,
                          seed=config.seed if seed is None else seed, config=config)
    _emit(report.to_dict())
    if not report.ok:
        state.say("ERROR", f"{name}: {report.mismatches}/{report.checked} 组不一致")
        sys.exit(EXIT_MISMATCH)
    state.say("SUCCESS", f"{name}: {report.checked} 组全部一致")


@cli.command("sweep")
@click.argument("name")
@click.option("--n", "n_text", default="128..65536", show_default=True,
              help="N 集合：lo..hi（2 倍几何级数）或逗号分隔")
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(dir_okay=False), help="同时把结果写到文件")
@click.pass_obj
def sweep_cmd(state: _State, name, n_text, samples, seed, out):
    """N 扫描，输出 SweepResult JSON"""
    config = state.config
    result = sweep(name, parse_n_set(n_text), samples,
                   config.seed if seed is None else seed, config)
    if out:
        save_result(result, Path(out))
    _emit(result.to_dict())
    if not result.ok:
        state.say("ERROR", f"{name}: 判定失败 {'; '.join(result.notes)}")
        sys.exit(EXIT_VERDICT)
    state.say("SUCCESS", f"{name}: 常数查询与线性预处理判定通过")


@cli.command()
@click.argument("results", nargs=-1, required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--csv", "as_csv", is_flag=True, help="输出 CSV（默认 JSON）")
@click.pass_obj
def report(state: _State, results, as_csv):
    """汇总 sweep 写出的结果文件"""
    loaded = load_results([Path(p) for p in results])
    click.echo(to_csv(loaded) if as_csv else to_json(loaded), nl=not as_csv)
    failed = [r["op"] for r in loaded if not r.get("ok", True)]
    if failed:
        state.say("WARNING", f"判定失败的运算: {', '.join(failed)}")
        sys.exit(EXIT_VERDICT)


# ---------------------------------------------------------------------------
# 元胞自动机
# ---------------------------------------------------------------------------

def _resolve_ca(demo: Optional[str], spec_path: Optional[str]):
    if spec_path:
        return load_ca(Path(spec_path))
    if not demo:
        raise click.UsageError(f"需要 --demo（{', '.join(DEMOS)}）或 --spec")
    return demo_ca(demo)


def _ca_source(command):
    command = click.option("--spec", "spec_path", type=click.Path(exists=True, dir_okay=False),
                           help="自动机描述 JSON")(command)
    return click.option("--demo", type=click.Choice(DEMOS), default=None,
                        help="演示自动机")(command)


@cli.group(cls=RamGroup)
def ca():
    """元胞自动机：编译、查询与约定检查"""


@ca.command("build")
@_ca_source
@click.option("--n", type=int, required=True)
@click.option("--save", "save_path", type=click.Path(dir_okay=False), help="保存自动机描述 JSON")
@click.pass_obj
def ca_build(state: _State, demo, spec_path, n, save_path):
    """预处理分块表，输出参数与构建步数"""
    automaton = _resolve_ca(demo, spec_path)
    tables = build_ca_tables(automaton, n, state.config.d, state.config.ca_table_budget)
    if save_path:
        save_ca(automaton, Path(save_path))
        state.say("SUCCESS", f"已保存 {save_path}")
    _emit(tables.summary())


@ca.command("op")
@click.argument("operands", nargs=-1, type=int)
@_ca_source
@click.option("--n", type=int, required=True)
@click.pass_obj
def ca_op_cmd(state: _State, operands, demo, spec_path, n):
    """常数步查询自动机的输出，并与直接模拟对照"""
    config = state.config
    automaton = _resolve_ca(demo, spec_path)
    tables = build_ca_tables(automaton, n, config.d, config.ca_table_budget)
    meter = tables.query_meter()
    result = ca_op(tables, *operands, meter=meter)
    expected = simulate_op(automaton, n, operands, config.d)
    _emit({"ca": automaton.name, "n": n, "operands": list(operands), "result": result,
           "direct": expected, "match": result == expected, "steps": meter.steps,
           "query_bound": tables.summary()["query_bound"]})
    if result != expected:
        state.say("ERROR", f"查询结果 {result} 与直接模拟 {expected} 不一致")
        sys.exit(EXIT_MISMATCH)


@ca.command("check")
@_ca_source
@click.option("--max-len", type=int, default=4, show_default=True, help="穷举的最大字长")
@click.option("--seed", type=int, default=None)
@click.pass_obj
def ca_check(state: _State, demo, spec_path, max_len, seed):
    """检查精确线性时间约定"""
    automaton = _resolve_ca(demo, spec_path)
    samples = default_samples(automaton, exhaustive_len=max_len,
                              seed=state.config.seed if seed is None else seed)
    verdict = check_linear_contract(automaton, samples)
    _emit(verdict.to_dict())
    if not verdict.ok:
        state.say("ERROR", f"{automaton.name} 违反约定: {verdict.reason}")
        sys.exit(EXIT_VERDICT)
    state.say("SUCCESS", f"{automaton.name} 通过 {verdict.checked} 个样本")


@cli.command("ops")
@click.pass_obj
def list_ops(state: _State):
    """列出可查询的运算"""
    ops = registry(state.config.root_exponents)
    listing = {name: {"arity": spec.arity, "families": list(spec.families),
                      "description": spec.description} for name, spec in sorted(ops.items())}
    listing[CA_OP] = {"arity": 1, "families": [], "description": "complement 演示自动机"}
    _emit(listing)


def main(argv: Optional[Sequence[str]] = None):
    cli.main(args=list(argv) if argv is not None else None, prog_name="ramplus")


if __name__ == '__main__':
    main()
