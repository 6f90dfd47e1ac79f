"""
🎯 演示自动机：回显、按位取反、前缀异或

三个自动机共用一套同步层，在 t = 3n 时所有细胞同时进入输出状态：

- 细胞 0 先变成将军，向左发出快信号 F（速度 1）与慢信号 S（速度 1/3）
- F 碰到边界折返成 F'，在区段中点与 S 相遇，中点（偶数长度时是中间两格）
  成为新将军，两半各自递归
- 一个长为 k 的区段用 3·⌈(k+1)/2⌉ 步产生中点将军，总时间恰为 3n
- 将军两侧都是将军或 ♯ 时发射，进入 out(bit)

每个同步状态都带一位数据：字母 u 的 X₁ 位 (u >> 1) & 1。前缀异或在第一道 F
经过时把右邻的位异或进来。

状态布局（r = 1, γ = 4）::

    0..3   输入字母          4   ♯
    5      q♯                6/7 out0 / out1
    8..47  (同步状态, 位)    = 8 + 2·同步状态 + 位
"""

from enum import IntEnum
from typing import Callable, Dict, Optional, Tuple

from common.errors import DomainError

from .automaton import CellularAutomaton

R = 1
GAMMA = 2 ** (R + 1)
SHARP = GAMMA
Q_SHARP = SHARP + 1
OUT0, OUT1 = Q_SHARP + 1, Q_SHARP + 2
SYNC_BASE = OUT1 + 1


class Sync(IntEnum):
    I0 = 0          # 尚未被 F 经过
    I = 1
    F_U = 2
    F_D = 3
    FP_U = 4        # 折返的 F'
    FP_D = 5
    S_U0 = 6
    S_U1 = 7
    S_U2 = 8
    S_D0 = 9
    S_D1 = 10
    S_D2 = 11
    FS_U = 12       # F 与 S0 同格
    FS_D = 13
    M = 14          # F' 与 S 相遇
    P = 15          # 初始将军前一步
    W1 = 16         # 偶数长度区段的中间两格
    W2 = 17
    GF = 18         # 新将军
    G = 19


STATES = SYNC_BASE + 2 * len(Sync)

# 方向 U：信号朝编号增大（向左）走；D 反之
_F = {"U": Sync.F_U, "D": Sync.F_D}
_FP = {"U": Sync.FP_U, "D": Sync.FP_D}
_FS = {"U": Sync.FS_U, "D": Sync.FS_D}
_S = {"U": (Sync.S_U0, Sync.S_U1, Sync.S_U2), "D": (Sync.S_D0, Sync.S_D1, Sync.S_D2)}

DEMOS = ("echo", "complement", "parity")


def encode(sync: Sync, bit: int) -> int:
    return SYNC_BASE + 2 * int(sync) + bit


def decode(q: int) -> Optional[Tuple[Sync, int]]:
    if q < SYNC_BASE:
        return None
    return Sync((q - SYNC_BASE) // 2), (q - SYNC_BASE) % 2


def _sync(q: int) -> Optional[Sync]:
    info = decode(q)
    return info[0] if info else None


def _boundary(q: int) -> bool:
    return q == SHARP or _sync(q) in (Sync.GF, Sync.G)


def _has_f(q: int, d: str) -> bool:
    return _sync(q) in (_F[d], _FS[d])


def _phase(q: int, d: str) -> Optional[int]:
    k = _sync(q)
    if k == _FS[d]:
        return 0
    if k in _S[d]:
        return _S[d].index(k)
    return None


def _signals(left: int, center: int, right: int, d: str) -> Optional[Sync]:
    """一个方向上的信号推进；没有信号时返回 None"""
    out, inn = (left, right) if d == "U" else (right, left)
    own = _phase(center, d)
    if own == 2 and _sync(out) == _FP[d]:
        return Sync.W1
    if _sync(center) == _FP[d] and _phase(inn, d) == 2:
        return Sync.W1

    general = _sync(inn) == Sync.GF
    new_f = _has_f(inn, d) or general
    new_fp = (_has_f(center, d) and _boundary(out)) or _sync(out) == _FP[d]
    if own in (0, 1):
        new_s: Optional[int] = own + 1
    elif _phase(inn, d) == 2 or general:
        new_s = 0
    else:
        new_s = None

    if new_fp and new_s is not None:
        return Sync.M
    if new_f and new_s == 0:
        return _FS[d]
    if new_fp:
        return _FP[d]
    if new_f:
        return _F[d]
    if new_s is not None:
        return _S[d][new_s]
    return None


def _make_rule(fire: Callable[[int], int], xor_on_pass: bool) -> Callable[[int, int, int], int]:
    advance = {Sync.P: Sync.GF, Sync.W1: Sync.W2, Sync.W2: Sync.GF, Sync.M: Sync.GF}

    def rule(left: int, center: int, right: int) -> int:
        if center == SHARP or Q_SHARP <= center < SYNC_BASE:
            return center
        if center < GAMMA:
            bit = (center >> 1) & 1
            return encode(Sync.P if right == SHARP else Sync.I0, bit)
        k, bit = decode(center)
        if k in (Sync.GF, Sync.G):
            if _boundary(left) and _boundary(right):
                return fire(bit)
            return encode(Sync.G, bit)
        if k in advance:
            return encode(advance[k], bit)
        for d in ("U", "D"):
            nxt = _signals(left, center, right, d)
            if nxt is None:
                continue
            if xor_on_pass and k == Sync.I0 and nxt in (_F[d], _FS[d]):
                inn = right if d == "U" else left
                bit ^= decode(inn)[1]
            return encode(nxt, bit)
        return encode(Sync.I0 if k == Sync.I0 else Sync.I, bit)

    return rule


def _labels() -> Tuple[str, ...]:
    letters = [f"a{u}" for u in range(GAMMA)]
    fixed = ["#", "q#", "out0", "out1"]
    sync = [f"{k.name}/{b}" for k in Sync for b in (0, 1)]
    return tuple(letters + fixed + sync)


def _build(name: str, fire: Callable[[int], int], xor_on_pass: bool = False) -> CellularAutomaton:
    return CellularAutomaton.from_rule(
        STATES, _make_rule(fire, xor_on_pass), r=R, c=3,
        q_out=(Q_SHARP, OUT0, OUT1), q_sharp=Q_SHARP, pi={OUT1: 1},
        labels=_labels(), name=name,
    )


def echo_ca() -> CellularAutomaton:
    """输出 X₁ 的低 n 位"""
    return _build("echo", lambda b: OUT1 if b else OUT0)


def complement_ca() -> CellularAutomaton:
    """输出 X₁ 低 n 位的按位取反"""
    return _build("complement", lambda b: OUT0 if b else OUT1)


def parity_ca() -> CellularAutomaton:
    """输出第 i 位 = X₁ 第 0..i 位的异或"""
    return _build("parity", lambda b: OUT1 if b else OUT0, xor_on_pass=True)


_BUILDERS: Dict[str, Callable[[], CellularAutomaton]] = {
    "echo": echo_ca, "complement": complement_ca, "parity": parity_ca,
}

# 转发给第二个演示自动机：out_b → X₁ 位为 b 的字母
ECHO_FORWARD = {Q_SHARP: SHARP, OUT0: 0, OUT1: 2}


def demo_ca(name: str) -> CellularAutomaton:
    if name not in _BUILDERS:
        raise DomainError(f"未知的演示自动机: {name}（可用: {', '.join(DEMOS)}）")
    return _BUILDERS[name]()


def demo_oracle(name: str, x: int, n: int) -> int:
    """演示自动机在长度 n 的输入上的期望输出"""
    low = x % (1 << n)
    if name == "echo":
        return low
    if name == "complement":
        return (1 << n) - 1 - low
    if name == "parity":
        out, acc = 0, 0
        for i in range(n):
            acc ^= (low >> i) & 1
            out |= acc << i
        return out
    raise DomainError(f"未知的演示自动机: {name}")


__all__ = [
    "Sync", "STATES", "SHARP", "Q_SHARP", "OUT0", "OUT1", "DEMOS", "ECHO_FORWARD",
    "encode", "decode", "echo_ca", "complement_ca", "parity_ca", "demo_ca", "demo_oracle",
]
