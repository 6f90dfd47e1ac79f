"""
🔲 一维元胞自动机

状态集 Q = {0..s−1}，其中 0..γ−1 是输入字母（γ = 2^(r+1)），♯ = γ 是右侧永久态。
细胞编号从右向左递增：细胞 0 是输入的最低位，窗口 cells[i] 即细胞 i。
规则 δ(左, 中, 右) 按 (左·s + 中)·s + 右 展平存放，“左”是编号更大的邻居。
"""

import json
import logging
import random
from dataclasses import dataclass, replace
from itertools import product
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from common.errors import CompositionError, ConfigError, ContractViolation, DomainError

logger = logging.getLogger(__name__)

CA_FORMAT_VERSION = 1


@dataclass(frozen=True)
class CellularAutomaton:
    """规则表 + 输出约定"""
    s: int
    delta: Tuple[int, ...]
    r: int
    c: int
    q_out: Tuple[int, ...]
    q_sharp: int
    pi: Tuple[int, ...]
    labels: Tuple[str, ...] = ()
    name: str = "ca"
    released: Tuple[int, ...] = ()       # 允许变回 ♯ 的状态（组合时的 q♯）

    def __post_init__(self):
        s = self.s
        if self.r < 1 or self.c < 1:
            raise DomainError(f"需要 r ≥ 1 且 c ≥ 1，当前 r={self.r}, c={self.c}")
        if self.gamma >= s:
            raise DomainError(f"状态数 s={s} 放不下 γ={self.gamma} 个字母和 ♯")
        if len(self.delta) != s ** 3:
            raise DomainError(f"δ 需要 s³={s ** 3} 项，收到 {len(self.delta)} 项")
        if any(not 0 <= q < s for q in self.delta):
            raise DomainError("δ 的取值超出状态集")
        if len(self.pi) != s or any(p not in (0, 1) for p in self.pi):
            raise DomainError(f"π 需要 {s} 个 0/1 值")
        outs = set(self.q_out)
        if self.q_sharp not in outs:
            raise DomainError(f"q♯={self.q_sharp} 必须属于输出状态集")
        if any(not 0 <= q < s for q in outs) or outs & set(range(self.gamma + 1)):
            raise DomainError(f"输出状态 {sorted(outs)} 不能与字母或 ♯ 重叠")
        for q in range(s):
            if q not in outs and self.pi[q] != 0:
                raise DomainError(f"非输出状态 {q} 的 π 必须为 0")
        if self.pi[self.q_sharp] != 0:
            raise DomainError("π(q♯) 必须为 0")
        if self.labels and len(self.labels) != s:
            raise DomainError(f"状态名需要 {s} 个，收到 {len(self.labels)} 个")
        self._check_permanent()

    def _check_permanent(self):
        sharp, s = self.sharp, self.s
        for q in range(s):
            if self.rule(q, sharp, sharp) != sharp:
                raise ContractViolation(f"δ({q}, ♯, ♯) 必须为 ♯", state=q)
        allowed = set(self.released) | {sharp}
        for a, b, c in product(range(s), repeat=3):
            if b not in allowed and self.rule(a, b, c) == sharp:
                raise ContractViolation(f"δ({a}, {b}, {c}) 从非 ♯ 状态产生了 ♯", triple=(a, b, c))

    @property
    def gamma(self) -> int:
        return 2 ** (self.r + 1)

    @property
    def sharp(self) -> int:
        return self.gamma

    def rule(self, left: int, center: int, right: int) -> int:
        return self.delta[(left * self.s + center) * self.s + right]

    def is_output(self, q: int) -> bool:
        return q in self.q_out

    def label(self, q: int) -> str:
        if self.labels:
            return self.labels[q]
        return "#" if q == self.sharp else str(q)

    def with_prefix(self, prefix: str) -> "CellularAutomaton":
        """状态名加前缀（♯ 除外），用于组合前消除重名"""
        labels = self.labels or tuple(self.label(q) for q in range(self.s))
        renamed = tuple(lab if q == self.sharp else f"{prefix}{lab}" for q, lab in enumerate(labels))
        return replace(self, labels=renamed, name=f"{prefix}{self.name}")

    @classmethod
    def from_rule(cls, s: int, rule: Callable[[int, int, int], int], r: int, c: int,
                  q_out: Sequence[int], q_sharp: int, pi: Mapping[int, int],
                  labels: Sequence[str] = (), name: str = "ca") -> "CellularAutomaton":
        """枚举全部 s³ 个三元组生成规则表"""
        delta = tuple(rule(a, b, x) for a, b, x in product(range(s), repeat=3))
        return cls(s=s, delta=delta, r=r, c=c, q_out=tuple(sorted(q_out)), q_sharp=q_sharp,
                   pi=tuple(pi.get(q, 0) for q in range(s)), labels=tuple(labels), name=name)


@dataclass(frozen=True)
class WordConfig:
    """有限活动窗口，两侧隐含 ♯；cells[i] 是细胞 i 的状态"""
    cells: Tuple[int, ...]
    sharp: int

    def __getitem__(self, i: int) -> int:
        return self.cells[i] if 0 <= i < len(self.cells) else self.sharp

    @property
    def width(self) -> int:
        return len(self.cells)

    @classmethod
    def from_word(cls, word: Sequence[int], sharp: int) -> "WordConfig":
        """word 按从左到右书写，最右一个字母落在细胞 0"""
        return cls(_trim(tuple(reversed(tuple(word))), sharp), sharp)

    def to_word(self) -> List[int]:
        return list(reversed(self.cells))

    def render(self, ca: Optional[CellularAutomaton] = None) -> str:
        if ca is None:
            return " ".join(str(q) for q in self.to_word())
        return " ".join(ca.label(q) for q in self.to_word())


def _trim(cells: Tuple[int, ...], sharp: int) -> Tuple[int, ...]:
    end = len(cells)
    while end > 0 and cells[end - 1] == sharp:
        end -= 1
    return cells[:end]


def ca_step(cfg: WordConfig, ca: CellularAutomaton) -> WordConfig:
    """一次同步更新；窗口向左至多增长一格，右侧保持 ♯"""
    old = cfg.cells
    m = len(old)
    sharp = ca.sharp
    delta, s = ca.delta, ca.s
    new = []
    for i in range(m + 1):
        left = old[i + 1] if i + 1 < m else sharp
        center = old[i] if i < m else sharp
        right = old[i - 1] if i > 0 else sharp
        new.append(delta[(left * s + center) * s + right])
    return WordConfig(_trim(tuple(new), sharp), sharp)


def ca_run(ca: CellularAutomaton, word: Union[WordConfig, Sequence[int]], t: int) -> WordConfig:
    """从 ♯w♯ 出发运行 t 步"""
    if t < 0:
        raise DomainError(f"步数不能为负: {t}")
    cfg = word if isinstance(word, WordConfig) else WordConfig.from_word(word, ca.sharp)
    for _ in range(t):
        cfg = ca_step(cfg, ca)
    return cfg


def project_config(ca: CellularAutomaton, cfg: WordConfig) -> int:
    """Σ π(细胞 i)·2^i"""
    value = 0
    for i in range(cfg.width - 1, -1, -1):
        value = 2 * value + ca.pi[cfg.cells[i]]
    return value


# ---------------------------------------------------------------------------
# 精确线性时间约定
# ---------------------------------------------------------------------------

@dataclass
class ContractVerdict:
    """第一个违反约定的样本；ok 时其余字段为空"""
    ok: bool
    sample: Optional[Tuple[int, ...]] = None
    t: Optional[int] = None
    reason: str = ""
    checked: int = 0

    def to_dict(self) -> Dict:
        return {"ok": self.ok, "sample": list(self.sample) if self.sample is not None else None,
                "t": self.t, "reason": self.reason, "checked": self.checked}


def _output_shape_ok(ca: CellularAutomaton, cfg: WordConfig) -> bool:
    # 低位是 Q_out∖{q♯}，高位是若干 q♯
    i, cells = 0, cfg.cells
    while i < len(cells) and ca.is_output(cells[i]) and cells[i] != ca.q_sharp:
        i += 1
    while i < len(cells) and cells[i] == ca.q_sharp:
        i += 1
    return i == len(cells)


def check_word(ca: CellularAutomaton, word: Sequence[int]) -> Tuple[Optional[int], str]:
    """单个样本；返回 (违反时刻, 原因)，满足约定时返回 (None, "")"""
    n = len(word)
    if n == 0:
        raise DomainError("样本字不能为空")
    if any(not 0 <= u < ca.gamma for u in word):
        raise DomainError(f"样本 {list(word)} 含有非输入字母")
    limit = ca.c * n
    cfg = WordConfig.from_word(word, ca.sharp)
    for t in range(limit + 1):
        if cfg.width > limit:
            return t, f"活动宽度 {cfg.width} 超过 c·n={limit}"
        if t < limit:
            if any(ca.is_output(q) for q in cfg.cells):
                return t, f"t={t} < c·n={limit} 时出现输出状态"
            cfg = ca_step(cfg, ca)
    if not _output_shape_ok(ca, cfg):
        return limit, f"t=c·n={limit} 时格局不是 ♯(q♯)^k v ♯: {cfg.render(ca)}"
    return None, ""


def check_linear_contract(ca: CellularAutomaton, samples: Iterable[Sequence[int]]) -> ContractVerdict:
    """逐个样本检查；返回第一个违反"""
    checked = 0
    for word in samples:
        t, reason = check_word(ca, word)
        checked += 1
        if t is not None:
            logger.debug("自动机 %s 在样本 %s 上违反约定: %s", ca.name, list(word), reason)
            return ContractVerdict(False, tuple(word), t, reason, checked)
    logger.debug("自动机 %s 通过 %d 个样本", ca.name, checked)
    return ContractVerdict(True, checked=checked)


def default_samples(ca: CellularAutomaton, exhaustive_len: int = 4,
                    random_lengths: Sequence[int] = range(5, 13), per_length: int = 4,
                    seed: int = 7) -> List[Tuple[int, ...]]:
    """长度 ≤ exhaustive_len 的全部字，加上更长的随机字"""
    letters = range(ca.gamma)
    out: List[Tuple[int, ...]] = []
    for n in range(1, exhaustive_len + 1):
        out.extend(product(letters, repeat=n))
    rng = random.Random(seed)
    for n in random_lengths:
        for _ in range(per_length):
            out.append(tuple(rng.randrange(ca.gamma) for _ in range(n)))
    return out


def require_contract(ca: CellularAutomaton, samples: Optional[Iterable[Sequence[int]]] = None):
    """不满足约定时抛出 ContractViolation"""
    verdict = check_linear_contract(ca, samples if samples is not None else default_samples(ca))
    if not verdict.ok:
        raise ContractViolation(f"自动机 {ca.name} 违反精确线性时间约定: {verdict.reason}",
                                sample=verdict.sample, t=verdict.t)


# ---------------------------------------------------------------------------
# 组合
# ---------------------------------------------------------------------------

def compose(ca1: CellularAutomaton, pi1: Mapping[int, int], ca2: CellularAutomaton) -> CellularAutomaton:
    """
    先算 ca1，再把它的输出经 pi1 改写成 ca2 的字母继续算

    pi1: Q_out1 → ca2 的字母或 ♯（q♯ 缺省映射到 ♯）。ca2 的状态重新编号为
    s1 + 名次，♯ 两边共用。结果的 c 只是时间上界 c1 + 1 + c2。
    """
    if ca1.r != ca2.r:
        raise CompositionError(f"两个自动机的元数不同: {ca1.r} ≠ {ca2.r}")
    if ca1.labels and ca2.labels:
        shared = (set(ca1.labels) & set(ca2.labels)) - {"#"}
        if shared:
            raise CompositionError(f"状态集除 ♯ 外有重叠: {sorted(shared)[:5]}", shared=sorted(shared))
    mapping = dict(pi1)
    mapping.setdefault(ca1.q_sharp, ca2.sharp)
    if set(mapping) != set(ca1.q_out):
        raise CompositionError(f"pi1 的定义域 {sorted(mapping)} 必须恰为 Q_out1 {list(ca1.q_out)}")
    for q, v in mapping.items():
        if not 0 <= v <= ca2.sharp:
            raise CompositionError(f"pi1({q})={v} 不是第二个自动机的字母或 ♯")

    s1, s2 = ca1.s, ca2.s
    sharp = ca1.sharp
    s = s1 + s2 - 1

    def lift(q2: int) -> int:
        if q2 == ca2.sharp:
            return sharp
        return s1 + (q2 if q2 < ca2.sharp else q2 - 1)

    def lower(q: int) -> int:
        if q == sharp:
            return ca2.sharp
        rank = q - s1
        return rank if rank < ca2.sharp else rank + 1

    outs1 = set(ca1.q_out)

    def in_first(q: int) -> bool:
        return q < s1 and q not in outs1

    def in_second(q: int) -> bool:
        return q == sharp or q >= s1

    def rule(a: int, b: int, c: int) -> int:
        if b in outs1:
            return lift(mapping[b])
        if in_first(a) and in_first(b) and in_first(c):
            return ca1.rule(a, b, c)
        if in_second(a) and in_second(b) and in_second(c):
            return lift(ca2.rule(lower(a), lower(b), lower(c)))
        return b

    labels: Tuple[str, ...] = ()
    if ca1.labels or ca2.labels:
        first = [ca1.label(q) for q in range(s1)]
        second = [ca2.label(q) for q in range(s2) if q != ca2.sharp]
        labels = tuple(first + second)
    pi = {lift(q): ca2.pi[q] for q in range(s2)}
    released = (ca1.q_sharp,) if mapping[ca1.q_sharp] == ca2.sharp else ()
    delta = tuple(rule(a, b, x) for a, b, x in product(range(s), repeat=3))
    composite = CellularAutomaton(
        s=s, delta=delta, r=ca1.r, c=ca1.c + 1 + ca2.c,
        q_out=tuple(sorted(lift(q) for q in ca2.q_out)), q_sharp=lift(ca2.q_sharp),
        pi=tuple(pi.get(q, 0) for q in range(s)), labels=labels,
        name=f"{ca2.name}∘{ca1.name}", released=released,
    )
    logger.info("组合自动机 %s: s=%d, c≤%d", composite.name, s, composite.c)
    return composite


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def ca_to_dict(ca: CellularAutomaton) -> Dict:
    return {
        "version": CA_FORMAT_VERSION,
        "name": ca.name, "s": ca.s, "sharp": ca.sharp, "r": ca.r, "c": ca.c,
        "qOut": list(ca.q_out), "qSharp": ca.q_sharp,
        "pi": {str(q): 1 for q in range(ca.s) if ca.pi[q]},
        "labels": list(ca.labels), "released": list(ca.released),
        "delta": list(ca.delta),
    }


def ca_from_dict(data: Dict) -> CellularAutomaton:
    try:
        s, r = int(data["s"]), int(data["r"])
        if "sharp" in data and int(data["sharp"]) != 2 ** (r + 1):
            raise ConfigError(f"sharp={data['sharp']} 必须等于 γ=2^(r+1)={2 ** (r + 1)}")
        pi = {int(q): int(v) for q, v in data.get("pi", {}).items()}
        return CellularAutomaton(
            s=s, delta=tuple(int(q) for q in data["delta"]), r=r, c=int(data["c"]),
            q_out=tuple(sorted(int(q) for q in data["qOut"])), q_sharp=int(data["qSharp"]),
            pi=tuple(pi.get(q, 0) for q in range(s)),
            labels=tuple(data.get("labels", ())), name=data.get("name", "ca"),
            released=tuple(data.get("released", ())),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"自动机描述缺少字段或格式错误: {e}")


def save_ca(ca: CellularAutomaton, path: Path):
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(ca_to_dict(ca), f, ensure_ascii=False)


def load_ca(path: Path) -> CellularAutomaton:
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"无法读取自动机文件 {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"自动机文件必须是 JSON 对象: {path}")
    return ca_from_dict(data)


__all__ = [
    "CellularAutomaton", "WordConfig", "ca_step", "ca_run", "project_config",
    "ContractVerdict", "check_word", "check_linear_contract", "default_samples",
    "require_contract", "compose", "ca_to_dict", "ca_from_dict", "save_ca", "load_ca",
    "CA_FORMAT_VERSION",
]
