"""
🧮 预处理表的构建

每个表族一个构建函数。表的数值直接用整数算出，计费按表计：
构建一张表的步数 = 元素个数 × 该表的单价（UNIT_COST）。单价是
按递推填写一个元素所需的原语次数（加法、测试、读已填元素）再加一次写入，
所以计费与表大小成正比，也可以由表的大小逐项复核。

表族:
- base            PRED, CEIL_SQRT, DIVB, MODB, MULTB
- digits          CMP, CHAIN, LEQ, DIFF, UNDER, MULT, LO, HI
- small_division  K 进制的 MODK, DIVK, MULTK, CMPK, LOK, HIK, DIFFK, UNDERK
                  与 β 进制的 D, R, DM, RM
- exponential     BOUND, EXP
- logarithm       LX, LOGAR
- cth_root        ROOT<c>（每个指数一张）
- gen_root        ROOTN, ROOT, FACTOR, FACTOR2, GENMODE, SEARCH
- bitwise         XOR, AND, OR, HALF
- division2       DIV2, MULK7, POWK7
"""

import logging
import math
from typing import Dict, List, Sequence

from common.errors import ValueBoundExceeded
from common.meter import StepMeter, Table

logger = logging.getLogger(__name__)

# 比较表 CMP 的取值
LESS, GREATER, EQUAL = 0, 1, 2

# GENMODE 表的取值：广义开方按指数 y 选择的算法
MODE_FORBIDDEN = 0      # 禁用形式 p·q（p 素数，q ≤ d）
MODE_NEWTON = 1         # 两步牛顿（常数守卫成立）
MODE_BRACKET = 2        # 守卫不成立：在 [t·K, (t+1)·K) 内按位确定
MODE_FACTOR = 3         # 分解 y = y1·y2 组合两次开方
MODE_SEARCH = 4         # 小 N：按位二分

FAMILIES = (
    "base", "digits", "small_division", "exponential", "logarithm",
    "cth_root", "gen_root", "bitwise", "division2",
)

FAMILY_DEPS: Dict[str, Sequence[str]] = {
    "base": (),
    "digits": ("base",),
    "small_division": ("digits",),
    "exponential": ("digits",),
    "logarithm": ("exponential", "small_division"),
    "cth_root": ("small_division",),
    "gen_root": ("exponential", "small_division"),
    "bitwise": ("logarithm",),
    "division2": ("small_division",),
}

# 每个元素的构建单价
UNIT_COST: Dict[str, int] = {
    "PRED": 2,          # 加 1，写
    "CEIL_SQRT": 4,     # 与当前平方比较，两次加法，写
    "DIVB": 3,          # 计数器到 B 时进位：测试，加，写
    "MODB": 3,
    "MULTB": 2,         # 前一项加 B，写
    "CMP": 3,           # 两次测试，写
    "CHAIN": 2,
    "LEQ": 2,
    "DIFF": 3,          # 测试 x ≥ y，前一项加 1，写
    "UNDER": 2,
    "MULT": 2,          # MULT[x][y] = MULT[x][y−1] + x
    "LO": 3,            # 从 MULT 拆分：读，测试，写
    "HI": 3,
    "MODK": 3,
    "DIVK": 3,
    "MULTK": 2,
    "CMPK": 3,
    "LOK": 3,
    "HIK": 3,
    "DIFFK": 3,
    "UNDERK": 2,
    "D": 3,             # 余数到 v 时商加 1：测试，加，写
    "R": 3,
    "DM": 4,            # 由 D、R 的 β 倍行读出：读，读，加，写
    "RM": 4,
    "BOUND": 3,
    "EXP": 6,           # 前一幂的数字乘 x 后规范化
    "LX": 4,
    "LOGAR": 3,
    "ROOTN": 4,
    "ROOT": 4,
    "FACTOR": 3,
    "FACTOR2": 3,
    "GENMODE": 3,
    "SEARCH": 3,
    "XOR": 6,           # 由 [i/2][j/2] 递推：两次读，乘 2，加，写
    "AND": 6,
    "OR": 6,
    "HALF": 2,
    "DIV2": 3,
    "MULK7": 2,
    "POWK7": 2,
}


def unit_cost(name: str) -> int:
    """表 name 的单价；ROOT<c> 按 c 定价（比较 (s+1)^c 需要 c 次乘法）"""
    if name.startswith("ROOT") and name[4:].isdigit():
        return int(name[4:]) + 3
    return UNIT_COST[name]


def family_closure(names: Sequence[str]) -> List[str]:
    """表族及其依赖，按构建顺序排列"""
    wanted = set()

    def visit(name: str):
        if name not in FAMILY_DEPS:
            raise ValueError(f"未知表族: {name}")
        if name in wanted:
            return
        for dep in FAMILY_DEPS[name]:
            visit(dep)
        wanted.add(name)

    for name in names:
        visit(name)
    return [f for f in FAMILIES if f in wanted]


# ---------------------------------------------------------------------------
# 整数工具
# ---------------------------------------------------------------------------

def ceil_sqrt(x: int) -> int:
    return 0 if x <= 0 else math.isqrt(x - 1) + 1


def iroot(x: int, k: int) -> int:
    """⌊x^{1/k}⌋"""
    if x < 2:
        return x
    r = 1 << ((x.bit_length() + k - 1) // k)
    # 从上方开始的整数牛顿迭代单调下降到根
    while True:
        nxt = ((k - 1) * r + x // r ** (k - 1)) // k
        if nxt >= r:
            break
        r = nxt
    while r ** k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def iroot_ceil(x: int, k: int) -> int:
    """⌈x^{1/k}⌉"""
    r = iroot(x, k)
    return r if r ** k == x else r + 1


def to_digits(x: int, base: int, width: int) -> List[int]:
    """小端序 base 进制数字（定长）"""
    digits = []
    for _ in range(width):
        x, rem = divmod(x, base)
        digits.append(rem)
    if x:
        raise ValueError(f"{width} 位 {base} 进制放不下该数")
    return digits


def is_prime(x: int) -> bool:
    if x < 2:
        return False
    i = 2
    while i * i <= x:
        if x % i == 0:
            return False
        i += 1
    return True


def is_forbidden(y: int, d: int) -> bool:
    """y = p·q，p 为素数且 q ≤ d"""
    return any(y % q == 0 and is_prime(y // q) for q in range(1, d + 1))


def root_constant_c0(c: int) -> int:
    """开 c 次方所需的常数 c0 = ⌈⌈√(6c−12)⌉·(c²−1)/(6c)⌉"""
    s = ceil_sqrt(6 * c - 12)
    return -(-s * (c * c - 1) // (6 * c))


def root_guard(k: int, c: int) -> bool:
    """K ≥ 1 + 2√c₂，c₂ = (c−1)^7 (c+1)^4 / (8c^4)；整数化后比较"""
    if k < 1:
        return False
    return 2 * (k - 1) ** 2 * c ** 4 >= (c - 1) ** 7 * (c + 1) ** 4


def guard_k(c: int) -> int:
    """满足守卫的最小 K"""
    k = 1
    while not root_guard(k, c):
        k += 1
    return k


def _table(meter: StepMeter, name: str, shape: Sequence[int], data: List[int], bound: int) -> Table:
    top = max(data) if data else 0
    if top > bound:
        raise ValueBoundExceeded(f"表 {name} 的最大值 {top} 超过上界 {bound}")
    meter.charge(unit_cost(name) * len(data))
    return Table.from_list(name, shape, data, bound)


# ---------------------------------------------------------------------------
# 表族构建
# ---------------------------------------------------------------------------

def build_base(ctx, meter: StepMeter):
    """前驱、上取整平方根、B 进制拆分"""
    n, b, cn = ctx.n, ctx.b, ctx.bound
    pred = [0] + list(range(cn))

    # 不变式 (r+1)^2 = r^2 + r + r + 1
    ceil_root = [0] * (n + 1)
    r, square = 1, 1
    for x in range(1, n + 1):
        if x > square:
            r += 1
            square += r + r - 1
        ceil_root[x] = r

    ctx.tables.update({
        "PRED": _table(meter, "PRED", (cn + 1,), pred, cn),
        "CEIL_SQRT": _table(meter, "CEIL_SQRT", (n + 1,), ceil_root, cn),
        "DIVB": _table(meter, "DIVB", (cn + 1,), [x // b for x in range(cn + 1)], cn),
        "MODB": _table(meter, "MODB", (cn + 1,), [x % b for x in range(cn + 1)], cn),
        "MULTB": _table(meter, "MULTB", (cn // b + 1,), [x * b for x in range(cn // b + 1)], cn),
    })


def _digit_tables(meter: StepMeter, base: int, cn: int, suffix: str) -> Dict[str, Table]:
    """单个数字之间的比较、差与积；乘数一维多一列，允许乘以基数本身"""
    cmp_ = [LESS if x < y else GREATER if x > y else EQUAL for x in range(base) for y in range(base)]
    lo = [x * y % base for x in range(base) for y in range(base + 1)]
    hi = [x * y // base for x in range(base) for y in range(base + 1)]
    diff = [x - y if x >= y else 0 for x in range(2 * base) for y in range(2 * base)]
    under = [1 if v < base else 0 for v in range(2 * base)]
    names = {k: k + suffix if suffix else k for k in ("CMP", "LO", "HI", "DIFF", "UNDER")}
    return {
        names["CMP"]: _table(meter, names["CMP"], (base, base), cmp_, cn),
        names["LO"]: _table(meter, names["LO"], (base, base + 1), lo, cn),
        names["HI"]: _table(meter, names["HI"], (base, base + 1), hi, cn),
        names["DIFF"]: _table(meter, names["DIFF"], (2 * base, 2 * base), diff, cn),
        names["UNDER"]: _table(meter, names["UNDER"], (2 * base,), under, cn),
    }


def build_digits(ctx, meter: StepMeter):
    """B 进制单个数字的运算表"""
    b, cn = ctx.b, ctx.bound
    leq = [1 if x <= y else 0 for x in range(b) for y in range(b)]
    mult = [x * y for x in range(b) for y in range(b)]
    chain = [st if s == EQUAL else s for s in range(3) for st in range(3)]
    ctx.tables.update(_digit_tables(meter, b, cn, ""))
    ctx.tables.update({
        "CHAIN": _table(meter, "CHAIN", (3, 3), chain, cn),
        "LEQ": _table(meter, "LEQ", (b, b), leq, cn),
        "MULT": _table(meter, "MULT", (b, b), mult, cn),
    })


def build_small_division(ctx, meter: StepMeter):
    """
    K 进制运算表与除以小整数 0 < v < β 用的四张表（下标 [被除数][除数]，除数 0 列全为 0）

    D/R 的第一维扩到 2β：余数合并 R[a][v] + RM[r][v] < 2v，直接查表拆分，
    省去 r ≥ v 的比较与减法。DM/RM 只在 r < v 时有意义，其余为 0。
    """
    k, beta, cn = ctx.k6, ctx.beta, ctx.bound
    ctx.tables.update({
        "MODK": _table(meter, "MODK", (cn + 1,), [x % k for x in range(cn + 1)], cn),
        "DIVK": _table(meter, "DIVK", (cn + 1,), [x // k for x in range(cn + 1)], cn),
        "MULTK": _table(meter, "MULTK", (cn // k + 1,), [x * k for x in range(cn // k + 1)], cn),
    })
    ctx.tables.update(_digit_tables(meter, k, cn, "K"))

    d_tab = [a // v if v else 0 for a in range(2 * beta) for v in range(beta)]
    r_tab = [a % v if v else 0 for a in range(2 * beta) for v in range(beta)]
    dm = [r * beta // v if r < v else 0 for r in range(beta) for v in range(beta)]
    rm = [r * beta % v if r < v else 0 for r in range(beta) for v in range(beta)]
    ctx.tables.update({
        "D": _table(meter, "D", (2 * beta, beta), d_tab, cn),
        "R": _table(meter, "R", (2 * beta, beta), r_tab, cn),
        "DM": _table(meter, "DM", (beta, beta), dm, cn),
        "RM": _table(meter, "RM", (beta, beta), rm, cn),
    })


def build_exponential(ctx, meter: StepMeter):
    """BOUND[x] = max{y | x^y < N^d}，EXP[x][y] = x^y 的 B 进制数字"""
    b, s, cn, ld = ctx.b, ctx.s, ctx.bound, ctx.l_d
    ed = ctx.exp_digits
    bound = [0] * b
    exp = [0] * (b * (ld + 1) * ed)

    def put(x: int, y: int, value: int):
        base = (x * (ld + 1) + y) * ed
        exp[base:base + ed] = to_digits(value, b, ed)

    for x in range(b):
        put(x, 0, 1)
    for x in range(2, b):
        y, value = 0, 1
        while value * x < s:
            value *= x
            y += 1
            put(x, y, value)
        bound[x] = y

    ctx.tables.update({
        "BOUND": _table(meter, "BOUND", (b,), bound, cn),
        "EXP": _table(meter, "EXP", (b, ld + 1, ed), exp, cn),
    })


def build_logarithm(ctx, meter: StepMeter):
    """LX[x] = ⌈log_x B⌉（2 ≤ x ≤ B），LOGAR[x][y] = ⌊log_x y⌋（2 ≤ x ≤ y < 2B）"""
    b, cn = ctx.b, ctx.bound
    lx = [0] * (b + 1)
    for x in range(2, b + 1):
        y, z = x, 1
        while y < b:
            y *= x
            z += 1
        lx[x] = z

    size = 2 * b
    logar = [0] * (size * size)
    for x in range(2, size):
        y, z, t = x, 1, x * x
        while y < size:
            while y < t and y < size:
                logar[x * size + y] = z
                y += 1
            z += 1
            t *= x
    ctx.tables.update({
        "LX": _table(meter, "LX", (b + 1,), lx, cn),
        "LOGAR": _table(meter, "LOGAR", (size, size), logar, cn),
    })


def build_cth_root(ctx, meter: StepMeter, c: int):
    """ROOT<c>[x] = ⌊x^{1/c}⌋，0 ≤ x < 表大小（查询以同一个表大小作为查表界限）"""
    setup = ctx.roots[c]
    if not setup.available:
        return
    size = setup.table_size
    table = [0] * size
    s = 0
    for x in range(1, size):
        if x >= (s + 1) ** c:
            s += 1
        table[x] = s
    name = f"ROOT{c}"
    ctx.tables[name] = _table(meter, name, (size,), table, ctx.bound)


def build_gen_root(ctx, meter: StepMeter):
    """广义开方：RootN、稠密根表、因子表与按指数的算法选择"""
    n, d, l, cn = ctx.n, ctx.d, ctx.l, ctx.bound
    b_root = ctx.b_root
    rootn = [0] * (l + 1)
    for y in range(1, l + 1):
        rootn[y] = iroot_ceil(n, 3 * y)

    dense = [0] * (b_root * (l + 1))
    for y in range(1, l + 1):
        s = 0
        for x in range(1, b_root):
            if x >= (s + 1) ** y:
                s += 1
            dense[x * (l + 1) + y] = s

    factor = [0] * (l + 1)
    cofactor = [0] * (l + 1)
    mode = [MODE_FORBIDDEN] * (l + 1)
    # MODE_SEARCH 时是二分位数，MODE_BRACKET 时是按位确定的轮数
    search = [0] * (l + 1)
    for y in range(2, l + 1):
        if ctx.below_lambda(y):
            if ctx.gen_root_guard(y):
                mode[y] = MODE_NEWTON
            else:
                mode[y] = MODE_BRACKET
                search[y] = max(1, (rootn[y] - 1).bit_length())
            continue
        for y1 in range(d + 1, y):
            if not ctx.below_lambda(y1):
                break
            if y % y1 == 0:
                factor[y], cofactor[y] = y1, y // y1
                mode[y] = MODE_FACTOR
                break
        if mode[y] == MODE_FACTOR:
            continue
        if is_forbidden(y, d):
            mode[y] = MODE_FORBIDDEN
        else:
            mode[y] = MODE_SEARCH
            search[y] = -(-d * (l + 1) // y)

    bracketed = [y for y in range(2, l + 1) if mode[y] == MODE_BRACKET]
    searched = [y for y in range(2, l + 1) if mode[y] == MODE_SEARCH]
    ctx.flags["gen_root_bracket"] = bracketed
    ctx.flags["gen_root_search"] = searched
    if searched:
        logger.warning("N=%d 时 λ 太小，指数 %s 退化为按位二分", n, searched)

    ctx.tables.update({
        "ROOTN": _table(meter, "ROOTN", (l + 1,), rootn, cn),
        "ROOT": _table(meter, "ROOT", (b_root, l + 1), dense, cn),
        "FACTOR": _table(meter, "FACTOR", (l + 1,), factor, cn),
        "FACTOR2": _table(meter, "FACTOR2", (l + 1,), cofactor, cn),
        "GENMODE": _table(meter, "GENMODE", (l + 1,), mode, cn),
        "SEARCH": _table(meter, "SEARCH", (l + 1,), search, cn),
    })


def build_bitwise(ctx, meter: StepMeter):
    """XOR/AND/OR[i][j]，i, j < B，由低位递推；HALF[v] = ⌊v/2⌋ 用于拆分位长"""
    b, cn = ctx.b, ctx.bound
    ops = {"XOR": lambda i, j: (i + j) % 2, "AND": lambda i, j: i * j, "OR": max}
    for name, base_op in ops.items():
        data = [0] * (b * b)
        for i in range(b):
            for j in range(b):
                if i > 1 or j > 1:
                    data[i * b + j] = 2 * data[(i // 2) * b + j // 2] + base_op(i % 2, j % 2)
                else:
                    data[i * b + j] = base_op(i, j)
        ctx.tables[name] = _table(meter, name, (b, b), data, cn)
    size = ctx.l_d + 2
    ctx.tables["HALF"] = _table(meter, "HALF", (size,), [v // 2 for v in range(size)], cn)


def build_division2(ctx, meter: StepMeter):
    """DIV2[x][y] = ⌊x/y⌋（2 ≤ y ≤ K³，y ≤ x < K·y），MULK7[x] = x·K，POWK7[e] = K^e 的数字"""
    k, b, cn, w = ctx.k7, ctx.b, ctx.bound, ctx.w
    k3, k4 = k ** 3, k ** 4
    div2 = [0] * (k4 * (k3 + 1))
    for y in range(2, k3 + 1):
        for q in range(1, k):
            for x in range(q * y, (q + 1) * y):
                div2[x * (k3 + 1) + y] = q
    # 移位量 ≤ 被除数的 K 进制位数 − 1，K^e < N^d
    top = 0
    while k ** (top + 1) < ctx.s:
        top += 1
    powk: List[int] = []
    for e in range(top + 1):
        powk.extend(to_digits(k ** e, b, w))
    ctx.tables.update({
        "DIV2": _table(meter, "DIV2", (k4, k3 + 1), div2, cn),
        "MULK7": _table(meter, "MULK7", (k3,), [x * k for x in range(k3)], cn),
        "POWK7": _table(meter, "POWK7", (top + 1, w), powk, cn),
    })


BUILDERS = {
    "base": build_base,
    "digits": build_digits,
    "small_division": build_small_division,
    "exponential": build_exponential,
    "logarithm": build_logarithm,
    "gen_root": build_gen_root,
    "bitwise": build_bitwise,
    "division2": build_division2,
}
