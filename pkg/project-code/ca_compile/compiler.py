"""
🧱 把精确线性时间自动机编译成常数时间查询

输入 (N, X₁..X_r) 先编码成长 L = length(N^d) 的字：第 i 个字母的第 j 位是 X_j
的第 i 位（X₀ = N）。把细胞按 ℓ 个一组分块，一块的 ℓ 个状态看作一个 s 进制数。
预处理五张表：

- LT[ρ][B]：相邻三块 B 的中间块走 ρ 步之后的状态
- CODE[λ][X₀..X_r]：λ 位的操作数切片 → γ 进制字母串
- CONVERT[λ][B]：同样的数字串从 γ 进制改读成 s 进制
- PROJECT[B]：一块的 π 投影 Σ π(x_i)·2^i
- PI[q]：π(q)

块数固定为 c0 = c·D、输入块数固定为 c1 = D，ℓ = ⌈L/D⌉ 保证 c0·ℓ ≥ c·L。
查询时做 c0 轮转移：前 ⌊cL/ℓ⌋ 轮各走 ℓ 步，下一轮走余下的 ρ 步，其余各轮
走 0 步（LT 的第 0 层是恒等）；超出 L 的输入块宽度为 0，编码成全 ♯ 块。
轮数、块数与每轮的访问次数都只由 (s, c, d, r) 决定，查询步数与 N 无关。
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from common.errors import BuildTooSmall, DomainError, OperandOutOfRange
from common.meter import StepMeter, Table

from .automaton import CellularAutomaton, WordConfig, ca_run, project_config

logger = logging.getLogger(__name__)

DEFAULT_TABLE_BUDGET = 64


@dataclass(frozen=True)
class CaParams:
    """分块参数"""
    n: int
    d: int
    D: int
    L: int
    ell: int
    c0: int                  # 块数 = 轮数 = c·D
    c1: int                  # 输入块数 = D
    rho: int                 # 不足 ℓ 的那一轮的步数（可为 0）
    lam: int                 # 不足 ℓ 的那个输入块的宽度（可为 0）
    table_size: int          # s^(3ℓ)
    limit: int               # budget·N
    steps_total: int         # c·L

    @property
    def admissible(self) -> bool:
        return self.table_size <= self.limit

    def round_steps(self) -> List[int]:
        """每轮走的步数，和为 c·L"""
        full = self.steps_total // self.ell
        return [self.ell if i < full else self.rho if i == full else 0 for i in range(self.c0)]

    def block_widths(self) -> List[int]:
        """每个输入块的宽度，和为 L"""
        full = self.L // self.ell
        return [self.ell if i < full else self.lam if i == full else 0 for i in range(self.c1)]

    def to_dict(self) -> Dict[str, int]:
        return {"N": self.n, "d": self.d, "D": self.D, "L": self.L, "ell": self.ell,
                "c0": self.c0, "c1": self.c1, "rho": self.rho, "lambda": self.lam,
                "table_size": self.table_size, "limit": self.limit}


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def block_count_d(s: int, d: int) -> int:
    """D = 1 + ⌊3d·log₂ s⌋"""
    return (s ** (3 * d)).bit_length()


def ca_params(ca: CellularAutomaton, n: int, d: int, budget: int = DEFAULT_TABLE_BUDGET) -> CaParams:
    if n < 2 or d < 1:
        raise DomainError(f"需要 N ≥ 2 且 d ≥ 1，当前 N={n}, d={d}")
    D = block_count_d(ca.s, d)
    L = (n ** d).bit_length()
    ell = _ceil_div(L, D)
    return CaParams(
        n=n, d=d, D=D, L=L, ell=ell, c0=ca.c * D, c1=D,
        rho=ca.c * L % ell, lam=L % ell,
        table_size=ca.s ** (3 * ell), limit=budget * n, steps_total=ca.c * L,
    )


def min_admissible_n(ca: CellularAutomaton, d: int, budget: int = DEFAULT_TABLE_BUDGET,
                     start: int = 2) -> int:
    """≥ start 的最小可构建 N"""
    n = max(2, start)
    for _ in range(256):
        p = ca_params(ca, n, d, budget)
        if p.admissible:
            return n
        n = max(n + 1, _ceil_div(p.table_size, budget))
    raise BuildTooSmall(f"找不到能放下 s={ca.s} 的局部转移表的 N", min_n=n)


def query_step_bound(ca: CellularAutomaton, d: int) -> int:
    """ca_op 查询步数的上界，只依赖 (s, c, d, r)"""
    D = block_count_d(ca.s, d)
    c0, c1 = ca.c * D, D
    per_block = 4 * (ca.r + 1) + 4
    return (c0 + 2) + c1 * per_block + c0 * (6 * c0 + 2) + 3 * c0


# ---------------------------------------------------------------------------
# 纯函数：逐项定义
# ---------------------------------------------------------------------------

def code_entry(xs: Sequence[int], width: int) -> int:
    """
    width 位的切片 X₀..X_r → γ 进制数 Σ u_i·γ^i

    u_i = Σ_j bit_i(X_j)·2^j，γ = 2^(r+1)。
    """
    gamma = 2 ** len(xs)
    value = 0
    for i in range(width - 1, -1, -1):
        u = 0
        for j, x in enumerate(xs):
            u |= ((x >> i) & 1) << j
        value = value * gamma + u
    return value


def encode_input(n: int, operands: Sequence[int], d: int) -> List[int]:
    """code(N, X₁..X_r)，按从左到右书写（最高位字母在前）"""
    L = (n ** d).bit_length()
    xs = (n,) + tuple(operands)
    word = []
    for i in range(L - 1, -1, -1):
        word.append(sum(((x >> i) & 1) << j for j, x in enumerate(xs)))
    return word


def _digits(value: int, base: int, count: int) -> List[int]:
    out = []
    for _ in range(count):
        value, digit = divmod(value, base)
        out.append(digit)
    return out


def _local_transition(ca: CellularAutomaton, triple: int, ell: int, rho: int) -> int:
    """三块 (左, 中, 右) 的中间块走 rho 步；低位数字是右边的细胞"""
    s, delta = ca.s, ca.delta
    cells = _digits(triple, s, 3 * ell)
    lo, hi = ell - rho, 2 * ell - 1 + rho
    for _ in range(rho):
        lo, hi = lo + 1, hi - 1
        cells = cells[:lo] + [
            delta[(cells[x + 1] * s + cells[x]) * s + cells[x - 1]] for x in range(lo, hi + 1)
        ] + cells[hi + 1:]
    value = 0
    for x in range(2 * ell - 1, ell - 1, -1):
        value = value * s + cells[x]
    return value


def sharp_block(ca: CellularAutomaton, ell: int) -> int:
    """全 ♯ 块 = γ(s^ℓ − 1)/(s − 1)"""
    return ca.gamma * (ca.s ** ell - 1) // (ca.s - 1)


def pad_block(ca: CellularAutomaton, ell: int, lam: int) -> int:
    """第 λ..ℓ−1 位补 ♯ = γ(s^ℓ − s^λ)/(s − 1)"""
    return ca.gamma * (ca.s ** ell - ca.s ** lam) // (ca.s - 1)


# ---------------------------------------------------------------------------
# 表与查询
# ---------------------------------------------------------------------------

@dataclass
class CaTables:
    """编译结果：只读表 + 常数"""
    ca: CellularAutomaton
    params: CaParams
    tables: Dict[str, Table] = field(default_factory=dict)
    build_steps: Dict[str, int] = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def preproc_steps(self) -> int:
        return sum(self.build_steps.values())

    @property
    def operand_limit(self) -> int:
        return self.params.n ** self.params.d

    def query_meter(self, limit: Optional[int] = None) -> StepMeter:
        """块编号与三块拼接都不超过 budget·N"""
        return StepMeter(bound=self.params.limit, limit=limit)

    def summary(self) -> Dict:
        return {"ca": self.ca.name, "s": self.ca.s, "c": self.ca.c, "r": self.ca.r,
                **self.params.to_dict(), "build_steps": dict(self.build_steps),
                "preproc_steps": self.preproc_steps,
                "query_bound": query_step_bound(self.ca, self.params.d)}


def build_ca_tables(ca: CellularAutomaton, n: int, d: int,
                    budget: int = DEFAULT_TABLE_BUDGET) -> CaTables:
    """
    构建 DELTA / LT / CODE / CONVERT / PROJECT / PI

    Raises:
        BuildTooSmall: s^(3ℓ) 超过 budget·N
    """
    p = ca_params(ca, n, d, budget)
    if not p.admissible:
        min_n = min_admissible_n(ca, d, budget, start=n + 1)
        raise BuildTooSmall(
            f"N={n} 时局部转移表大小 s^(3ℓ)={p.table_size} 超过 {budget}·N={p.limit}，需要 N ≥ {min_n}",
            min_n=min_n, n=n, ell=p.ell)
    started = time.time()
    s, ell, gamma = ca.s, p.ell, ca.gamma
    bound = p.limit
    out = CaTables(ca=ca, params=p)

    meter = StepMeter()
    meter.charge(s ** 3)
    out.tables["DELTA"] = Table.from_list("DELTA", (s, s, s), list(ca.delta), bound)
    out.build_steps["DELTA"] = meter.steps

    meter = StepMeter()
    pi_table = Table.from_list("PI", (s,), list(ca.pi), bound)
    meter.charge(s)
    out.tables["PI"] = pi_table
    out.build_steps["PI"] = meter.steps

    meter = StepMeter()
    size = s ** (3 * ell)
    lt: List[int] = []
    for rho in range(ell + 1):
        for triple in range(size):
            lt.append(_local_transition(ca, triple, ell, rho))
        # 每项：3ℓ 位拆分 + 三角形内 ρ(2ℓ − ρ) 次 δ 查表
        meter.charge(size * (3 * ell + rho * (2 * ell - rho) + 1))
    out.tables["LT"] = Table.from_list("LT", (ell + 1, size), lt, bound)
    out.build_steps["LT"] = meter.steps

    meter = StepMeter()
    arity = ca.r + 1
    code_size = 2 ** (ell * arity)
    code = [0] * ((ell + 1) * code_size)
    mask = (1 << ell) - 1
    for lam in range(ell + 1):
        for idx in range(code_size):
            xs = [(idx >> (ell * j)) & mask for j in range(arity)]
            if any(x >> lam for x in xs):
                continue
            code[lam * code_size + idx] = code_entry(xs, lam)
        meter.charge(code_size * (lam * arity + 1))
    out.tables["CODE"] = Table.from_list("CODE", (ell + 1, code_size), code, bound)
    out.build_steps["CODE"] = meter.steps

    meter = StepMeter()
    conv_size = gamma ** ell
    convert = [0] * ((ell + 1) * conv_size)
    for lam in range(ell + 1):
        for b in range(gamma ** lam):
            value = 0
            for digit in reversed(_digits(b, gamma, lam)):
                value = value * s + digit
            convert[lam * conv_size + b] = value
        meter.charge(gamma ** lam * (lam + 1))
    out.tables["CONVERT"] = Table.from_list("CONVERT", (ell + 1, conv_size), convert, bound)
    out.build_steps["CONVERT"] = meter.steps

    meter = StepMeter()
    project = []
    for b in range(s ** ell):
        value = 0
        for q in reversed(_digits(b, s, ell)):
            value = 2 * value + pi_table.peek(q)
        project.append(value)
    meter.charge(s ** ell * (ell + 1))
    out.tables["PROJECT"] = Table.from_list("PROJECT", (s ** ell,), project, bound)
    out.build_steps["PROJECT"] = meter.steps

    logger.info("CA 表构建完成: %s, N=%d, d=%d, ℓ=%d, c0=%d, %d 步, 用时 %.2fs",
                ca.name, n, d, ell, p.c0, out.preproc_steps, time.time() - started)
    return out


def _check_operands(tables: CaTables, operands: Sequence[int]):
    r = tables.ca.r
    if len(operands) != r:
        raise OperandOutOfRange(f"需要 {r} 个操作数，收到 {len(operands)} 个")
    limit = tables.operand_limit
    for j, x in enumerate(operands, start=1):
        if not 0 <= x < limit:
            raise OperandOutOfRange(f"操作数 X{j}={x} 不在 [0, N^d={limit}) 内", operand=j, value=x)


def ca_op(tables: CaTables, *operands: int, meter: Optional[StepMeter] = None,
          trace: Optional[List[List[int]]] = None) -> int:
    """
    常数时间计算自动机在 code(N, X₁..X_r) 上 t = c·L 时的 π 投影

    trace 非空时依次追加初始块行与每轮之后的块行（下标 0 与 c0+1 是 ♯ 块）。
    """
    _check_operands(tables, operands)
    m = meter if meter is not None else tables.query_meter()
    ca, p = tables.ca, tables.params
    t = tables.tables
    ell, c0 = p.ell, p.c0
    s_ell = ca.s ** ell
    s_2ell = s_ell * s_ell
    radix = 1 << ell

    sharp = sharp_block(ca, ell)
    m.tick("assign", c0 + 2)
    row = [sharp] * (c0 + 2)

    rest = [tables.n] + list(operands)
    for x, width in enumerate(p.block_widths(), start=1):
        idx = 0
        for j in range(len(rest)):
            # 取低 ℓ 位并右移按两次查表计，左移到第 j 段按一次查表计
            m.tick("lookup", 2)
            rest[j], chunk = divmod(rest[j], radix)
            m.tick("lookup")
            idx = m.add(idx, chunk << (ell * j))
        u = m.read(t["CODE"], width, idx)
        block = m.add(m.read(t["CONVERT"], width, u), pad_block(ca, ell, width))
        m.write(row, x, block)
    if trace is not None:
        trace.append(list(row))

    for steps in p.round_steps():
        m.tick("assign", 2)
        new = [sharp] * (c0 + 2)
        for x in range(1, c0 + 1):
            m.tick("lookup", 2)
            conc = m.add(m.add(row[x + 1] * s_2ell, row[x] * s_ell), row[x - 1])
            m.write(new, x, m.read(t["LT"], steps, conc))
        row = new
        if trace is not None:
            trace.append(list(row))

    result = 0
    for x in range(c0, 0, -1):
        m.tick("lookup")
        # 输出是 c0·ℓ 位的多项式整数，不受 c·N 上界约束
        m.tick("add")
        result = (result << ell) + m.read(t["PROJECT"], row[x])
    return result


def block_row(ca: CellularAutomaton, cfg: WordConfig, ell: int, blocks: int) -> List[int]:
    """格局按 ℓ 个细胞一块拆成块值；第 0 块与第 blocks+1 块是 ♯"""
    s = ca.s
    row = [sharp_block(ca, ell)]
    for x in range(1, blocks + 1):
        value = 0
        for i in range(x * ell - 1, (x - 1) * ell - 1, -1):
            value = value * s + cfg[i]
        row.append(value)
    row.append(sharp_block(ca, ell))
    return row


def simulate_op(ca: CellularAutomaton, n: int, operands: Sequence[int], d: int) -> int:
    """直接模拟 c·L 步后投影，作为 ca_op 的预言机"""
    word = encode_input(n, operands, d)
    cfg = ca_run(ca, word, ca.c * len(word))
    return project_config(ca, cfg)


__all__ = [
    "CaParams", "CaTables", "ca_params", "min_admissible_n", "query_step_bound",
    "block_count_d", "code_entry", "encode_input", "sharp_block", "pad_block",
    "build_ca_tables", "ca_op", "block_row", "simulate_op", "DEFAULT_TABLE_BUDGET",
]
