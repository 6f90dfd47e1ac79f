"""
🔁 翻译模块测试

测试三个翻译、忠实仿真检查、结构化编译、可恢复包装与随机语料
"""

import random
import sys
import unittest
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

# 添加父目录到路径
sys.path.insert(0, str(Path(__file__).parent.parent))

from common.errors import UnsupportedConstruct
from lowering import (
    CORPUS_C, Alloc, Assign, Call, Cond, Deref, Elem, For, FuncDef, Goto, If,
    Inp, Label, LocRule, Name, Num, Output, Return, StructuredProgram, While,
    add, check_faithful, compile_structured, compose_emaps, corpus,
    identity_emap, lower_ab_to_array, lower_array_to_r, lower_pipeline,
    lower_r_to_ab, lower_structured, random_inputs, wrap_restorable,
)
from ram_core import (
    ConfigurationArray, InstrSet, RamInput, fill_and_echo, parse_program, run,
)


def _echo_inputs(count: int, seed: int = 3):
    rng = random.Random(seed)
    inputs = []
    for _ in range(count):
        n = rng.randint(2, 9)
        inputs.append(RamInput(n, tuple(rng.randint(0, n) for _ in range(n))))
    return inputs


class TestRToAB(unittest.TestCase):
    """R -> AB 翻译测试"""

    def test_output(self):
        """Output 3 展开为 3 条"""
        ab, _ = lower_r_to_ab(parse_program("Output 3", InstrSet.R))
        self.assertEqual([str(i) for i in ab.instructions], ["CST 3", "Load", "Output"])

    def test_binary_op(self):
        """二元运算展开为 9 条，最后写回 R[0]"""
        ab, emap = lower_r_to_ab(parse_program("add", InstrSet.R))
        self.assertEqual(len(ab), 9)
        self.assertEqual([str(i) for i in ab.instructions[-3:]], ["Buffer", "CST 0", "Store"])
        self.assertEqual(emap.k, 9)

    def test_expansion_lengths(self):
        """各指令的展开长度"""
        text = "CST 1 4\nMove 2 1\nLoad 3 1\nStore 1 2\ngetN 5\nInput 6 1\nJzero 1 0 7"
        _, emap = lower_r_to_ab(parse_program(text, InstrSet.R))
        lengths = [e - s for s, e in emap.blocks]
        self.assertEqual(lengths, [4, 5, 6, 6, 4, 6, 3])

    def test_empty(self):
        """空程序"""
        ab, emap = lower_r_to_ab(parse_program("", InstrSet.R))
        self.assertEqual((len(ab), emap.halt), (0, 0))

    def test_jump_targets_remapped(self):
        """跳转目标映射到块起点"""
        r = parse_program("CST 0 0\nJzero 0 0 2", InstrSet.R)
        ab, emap = lower_r_to_ab(r)
        self.assertEqual(ab.instructions[-1].args, (0, len(ab)))


class TestArrayToR(unittest.TestCase):
    """数组 -> R 翻译测试"""

    def test_array_read_is_t_plus_3(self):
        """t=2, k=3, v=2 时数组读取为 5 条"""
        program = parse_program("C0 <- T0[C1]\nT1[C0] <- C1", InstrSet.ARRAY)
        r, emap = lower_array_to_r(program)
        s, e = emap.block(0)
        self.assertEqual(e - s, 5)
        self.assertEqual([str(i) for i in r.instructions[s:e]],
                         ["Move 1 4", "CST 0 5", "add", "add", "Load 3 0"])
        self.assertEqual(emap.map_loc(("T1", 7)), ("R", 3 + 2 + 2 * 7 + 1))

    def test_plain_program(self):
        """无数组访问时逐条翻译"""
        program = parse_program("C0 <- 5\nOutput C0", InstrSet.ARRAY)
        r, _ = lower_array_to_r(program)
        self.assertEqual([str(i) for i in r.instructions], ["CST 3 5", "Output 3"])

    def test_example_program_outputs(self):
        """示例程序经 AB->数组->R 后输出不变"""
        array, _ = lower_ab_to_array(fill_and_echo())
        r, emap = lower_array_to_r(array)
        for inp in _echo_inputs(20):
            expected = run(fill_and_echo(), inp).outputs
            self.assertEqual(run(r, inp, c=emap.target_c(8)).outputs, expected)

    def test_faithful(self):
        """数组 -> R 忠实仿真"""
        array, _ = lower_ab_to_array(fill_and_echo())
        r, emap = lower_array_to_r(array)
        verdict = check_faithful(array, r, emap, _echo_inputs(10))
        self.assertTrue(verdict.ok, verdict.counterexample)
        self.assertLessEqual(verdict.max_block_steps, emap.k)


class TestABToArray(unittest.TestCase):
    """AB -> 数组翻译测试"""

    def test_getn_and_store(self):
        """getN 与 Store 的翻译"""
        array, emap = lower_ab_to_array(parse_program("getN\nStore", InstrSet.AB))
        self.assertEqual([str(i) for i in array.instructions], ["C0 <- N", "T0[C0] <- C1"])
        self.assertEqual(emap.k, 1)

    def test_roundtrip(self):
        """AB -> 数组 -> R -> AB 保持输出"""
        array, e1 = lower_ab_to_array(fill_and_echo())
        r, e2 = lower_array_to_r(array)
        ab, e3 = lower_r_to_ab(r)
        composed = compose_emaps(compose_emaps(e1, e2), e3)
        self.assertEqual(composed.k, 1 * e2.k * 9)
        for inp in _echo_inputs(10, seed=5):
            expected = run(fill_and_echo(), inp)
            result = run(ab, inp, c=composed.target_c(8))
            self.assertEqual(result.outputs, expected.outputs)
            self.assertLessEqual(result.steps, composed.k * expected.steps)

    def test_composed_faithful(self):
        """组合映射仍是忠实仿真"""
        array, e1 = lower_ab_to_array(fill_and_echo())
        r, e2 = lower_array_to_r(array)
        ab, e3 = lower_r_to_ab(r)
        composed = compose_emaps(compose_emaps(e1, e2), e3)
        verdict = check_faithful(fill_and_echo(), ab, composed, _echo_inputs(5))
        self.assertTrue(verdict.ok, verdict.counterexample)


class TestCheckFaithful(unittest.TestCase):
    """忠实仿真检查测试"""

    def test_reflexive(self):
        """程序对自身、恒等映射"""
        program = fill_and_echo()
        verdict = check_faithful(program, program, identity_emap(len(program)), _echo_inputs(5))
        self.assertTrue(verdict.ok)
        self.assertEqual(verdict.checked, 5)

    def test_swapped_registers(self):
        """交换两个寄存器的映射会被发现"""
        program = parse_program("CST 5\nBuffer\nCST 2\nOutput", InstrSet.AB)
        array, emap = lower_ab_to_array(program)
        broken = emap.with_reg_map({"A": LocRule("C", 1), "B": LocRule("C", 0), "R": LocRule("T0")})
        verdict = check_faithful(program, array, broken, [RamInput(1, (0,))])
        self.assertFalse(verdict.ok)
        cx = verdict.counterexample
        self.assertEqual((cx.input_index, cx.source_pc, cx.location), (0, 1, "A[0]"))

    def test_json_verdict(self):
        """判定结果可序列化"""
        program = parse_program("CST 1\nOutput", InstrSet.AB)
        verdict = check_faithful(program, program, identity_emap(2), [RamInput(1, (0,))])
        self.assertEqual(verdict.to_dict()["verdict"], "ok")


class TestStructured(unittest.TestCase):
    """结构化程序编译测试"""

    def _run(self, sp, inp=None):
        inp = inp or RamInput(16, tuple([0] * 16))
        return run(lower_structured(sp), inp).outputs

    def test_while(self):
        """while x=0 do x<-1"""
        x = Name("x")
        sp = StructuredProgram(["x"], body=[While(Cond(x), [Assign(x, Num(1))]), Output(x)])
        self.assertEqual(self._run(sp), [1])

    def test_if_equal(self):
        """相等判断走 Eq 数组"""
        a, b = Name("a"), Name("b")
        sp = StructuredProgram(["a", "b"], body=[
            Assign(a, Inp(Num(0))), Assign(b, Inp(Num(1))),
            If(Cond(a, b), [Output(Num(1))], [Output(Num(0))]),
        ])
        program = lower_structured(sp)
        self.assertEqual(run(program, RamInput(2, (5, 5))).outputs, [1])
        self.assertEqual(run(program, RamInput(2, (5, 6))).outputs, [0])
        self.assertIn("Eq", compile_structured(sp).arrays)

    def test_not_equal(self):
        """≠ 条件"""
        x = Name("x")
        sp = StructuredProgram(["x"], body=[
            Assign(x, Num(3)), If(Cond(x, Num(4), negate=True), [Output(Num(1))]),
        ])
        self.assertEqual(self._run(sp), [1])

    def test_recursive_function(self):
        """递归函数计算三角数 T(4)=10"""
        i, n, r = Name("i"), Name("n"), Name("r")
        tri = FuncDef("tri", ["i", "n"], ["r"], [
            If(Cond(i, n), [Return(n)]),
            Call("r", "tri", [add(i, 1), n]),
            Return(add(i, r)),
        ])
        sp = StructuredProgram(["x"], functions=[tri],
                               body=[Call("x", "tri", [Num(0), Num(4)]), Output(Name("x"))])
        self.assertEqual(self._run(sp), [10])

    def test_for_up_and_down(self):
        """正序求和、倒序输出、空区间"""
        s, i = Name("s"), Name("i")
        sp = StructuredProgram(["s", "i"], body=[
            Assign(s, Num(0)),
            For("i", Num(1), Num(4), [Assign(s, add(s, i))]),
            Output(s),
            For("i", Num(1), Num(4), [Output(i)], down=True),
            For("i", Num(3), Num(1), [Output(Num(99))]),
        ])
        self.assertEqual(self._run(sp), [10, 4, 3, 2, 1])

    def test_goto(self):
        """goto 跳过语句"""
        sp = StructuredProgram(body=[Goto("L"), Output(Num(1)), Label("L"), Output(Num(2))])
        self.assertEqual(self._run(sp), [2])

    def test_dynamic_arrays(self):
        """DATA 上的动态数组"""
        p, q = Name("p"), Name("q")
        sp = StructuredProgram(["p", "q"], body=[
            Alloc("p", Num(3)), Assign(Deref(p, Num(0)), Num(7)),
            Alloc("q", Num(2)), Assign(Deref(q, Num(1)), Num(9)),
            Output(Deref(p, Num(0))), Output(Deref(q, Num(1))), Output(q),
        ])
        self.assertEqual(self._run(sp), [7, 9, 3])

    def test_array_valued_return(self):
        """函数返回 DATA 中的数组指针"""
        v, ptr = Name("v"), Name("ptr")
        mk = FuncDef("mk", ["v"], ["ptr"], [
            Alloc("ptr", Num(2)),
            Assign(Deref(ptr, Num(0)), v),
            Assign(Deref(ptr, Num(1)), add(v, 1)),
            Return(ptr),
        ])
        sp = StructuredProgram(["p"], functions=[mk], body=[
            Call("p", "mk", [Num(5)]), Output(Deref(Name("p"), Num(1))),
        ])
        self.assertEqual(self._run(sp), [6])

    def test_top_level_return(self):
        """顶层 return 输出并停机"""
        sp = StructuredProgram(body=[Output(Num(1)), Return(Num(7)), Output(Num(2))])
        self.assertEqual(self._run(sp), [1, 7])

    def test_errors(self):
        """未声明名字、未定义函数与标签"""
        with self.assertRaises(UnsupportedConstruct):
            lower_structured(StructuredProgram(body=[Output(Name("ghost"))]))
        with self.assertRaises(UnsupportedConstruct):
            lower_structured(StructuredProgram(body=[Call(None, "nope", [])]))
        with self.assertRaises(UnsupportedConstruct):
            lower_structured(StructuredProgram(body=[Goto("nowhere")]))
        with self.assertRaises(UnsupportedConstruct):
            lower_structured(StructuredProgram(["S"]))


class TestRestorable(unittest.TestCase):
    """可恢复包装测试"""

    def _call(self, compiled, config, inp):
        config.pc = 0
        return run(compiled.program, inp, config=config).outputs

    def test_single_write(self):
        """写 T[5] 后返回 T[5]，调用后 T[5] 复原"""
        proc = StructuredProgram(arrays=["T"], body=[
            Assign(Elem("T", Num(5)), Num(9)), Return(Elem("T", Num(5))),
        ])
        compiled = compile_structured(wrap_restorable(proc))
        config = ConfigurationArray()
        config.arrays[compiled.arrays["T"]] = {5: 4}
        inp = RamInput(16, tuple([0] * 16))
        self.assertEqual(self._call(compiled, config, inp), [9])
        self.assertEqual(config.elem(compiled.arrays["T"], 5), 4)
        self.assertEqual(self._call(compiled, config, inp), [9])
        self.assertEqual(config.elem(compiled.arrays["T"], 5), 4)

    def test_three_writes(self):
        """三次写入，日志长度 3，重放到 NbWrite=0"""
        x, y = Name("x"), Name("y")
        proc = StructuredProgram(["x", "y"], ["T"], body=[
            Assign(x, Num(1)), Assign(y, Num(2)), Assign(Elem("T", Num(0)), Num(3)),
            Return(add(x, y)),
        ])
        compiled = compile_structured(wrap_restorable(proc))
        config = ConfigurationArray()
        self.assertEqual(self._call(compiled, config, RamInput(16, tuple([0] * 16))), [3])
        snap = compiled.snapshot(config)
        self.assertEqual(snap["_nbwrite"], 0)
        self.assertEqual(max(snap["_pred"]), 3)
        self.assertEqual((snap["x"], snap["y"], snap["T"]), (0, 0, {}))

    def test_repeated_calls(self):
        """100 次随机参数调用，声明的内存前后完全相同"""
        a, b, s, i = Name("a"), Name("b"), Name("s"), Name("i")
        proc = StructuredProgram(["a", "b", "s", "i"], ["T"], body=[
            Assign(s, Num(0)),
            For("i", Num(0), Num(3), [
                Assign(Elem("T", i), add(a, i)),
                Assign(s, add(s, Elem("T", i))),
            ]),
            For("i", Num(0), Num(1), [Assign(Elem("T", i), Num(1))], down=True),
            If(Cond(a, b), [Return(s)]),
            Return(add(s, b)),
        ])
        compiled = compile_structured(wrap_restorable(proc))
        names = ["a", "b", "s", "i", "T"]
        config = ConfigurationArray()
        inp = RamInput(32, tuple([0] * 32))
        rng = random.Random(11)
        for _ in range(100):
            va, vb = rng.randint(0, 20), rng.randint(0, 20)
            config.variables[compiled.variables["a"]] = va
            config.variables[compiled.variables["b"]] = vb
            before = compiled.snapshot(config, names)
            expected = 4 * va + 6 + (0 if va == vb else vb)
            self.assertEqual(self._call(compiled, config, inp), [expected])
            self.assertEqual(compiled.snapshot(config, names), before)

    def test_rejects_functions(self):
        """含函数的过程不能包装"""
        with self.assertRaises(UnsupportedConstruct):
            wrap_restorable(StructuredProgram(functions=[FuncDef("f")]))


class TestCorpus(unittest.TestCase):
    """随机语料的整条翻译链"""

    @settings(max_examples=10, deadline=None)
    @given(st.integers(min_value=0, max_value=10 ** 6))
    def test_random_program_compiles(self, seed):
        """随机程序都能编译并停机"""
        from lowering import random_program
        sp = random_program(random.Random(seed))
        inp = random_inputs(random.Random(seed), 1)[0]
        result = run(lower_structured(sp), inp, c=CORPUS_C)
        self.assertTrue(result.halted)

    @pytest.mark.slow
    def test_pipeline_preserves_outputs(self):
        """50 个程序 × 20 个输入：结构化 -> 数组 -> R -> AB 输出一致"""
        rng = random.Random(2024)
        for sp in corpus(50, seed=7):
            pipe = lower_pipeline(sp)
            k = pipe.array_to_r.k * pipe.r_to_ab.k
            for inp in random_inputs(rng, 20):
                base = run(pipe.array, inp, c=CORPUS_C)
                r = run(pipe.r, inp, c=pipe.array_to_r.target_c(CORPUS_C))
                ab = run(pipe.ab, inp, c=pipe.composed.target_c(CORPUS_C))
                self.assertEqual(r.outputs, base.outputs)
                self.assertEqual(ab.outputs, base.outputs)
                self.assertLessEqual(ab.steps, k * base.steps)

    @pytest.mark.slow
    def test_pipeline_faithful(self):
        """每个程序的两个翻译与组合都通过忠实仿真检查"""
        rng = random.Random(99)
        for sp in corpus(50, seed=7):
            pipe = lower_pipeline(sp)
            inputs = random_inputs(rng, 3)
            self.assertTrue(check_faithful(pipe.array, pipe.r, pipe.array_to_r, inputs, c=CORPUS_C).ok)
            self.assertTrue(check_faithful(pipe.r, pipe.ab, pipe.r_to_ab, inputs,
                                           c=pipe.array_to_r.target_c(CORPUS_C)).ok)
            self.assertTrue(check_faithful(pipe.array, pipe.ab, pipe.composed, inputs, c=CORPUS_C).ok)


if __name__ == "__main__":
    unittest.main()
