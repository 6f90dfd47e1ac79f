"""
⚙️ 运行配置

RamConfig 汇总所有可调参数，支持 JSON 读写。
"""

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List

from .errors import ConfigError


def _default_workers() -> int:
    return min(4, os.cpu_count() or 2)


@dataclass
class RamConfig:
    """全局配置"""
    c: int = 8                      # 寄存器上界倍数：值 ≤ c·N
    max_steps: int = 10 ** 9        # 解释器步数上限
    d: int = 3                      # 多项式整数次数：操作数 < N^d
    ca_table_budget: int = 64       # CA 局部转移表大小上限 = budget·N
    workers: int = field(default_factory=_default_workers)
    root_exponents: List[int] = field(default_factory=lambda: [2, 3])
    seed: int = 7
    log_level: str = "INFO"

    def __post_init__(self):
        if self.c < 1:
            raise ConfigError(f"c 必须 ≥ 1，当前为 {self.c}")
        if self.d < 1:
            raise ConfigError(f"d 必须 ≥ 1，当前为 {self.d}")
        if self.max_steps < 0:
            raise ConfigError(f"max_steps 不能为负: {self.max_steps}")
        if self.workers < 1:
            raise ConfigError(f"workers 必须 ≥ 1，当前为 {self.workers}")
        if any(e < 2 for e in self.root_exponents):
            raise ConfigError(f"开方指数必须 ≥ 2: {self.root_exponents}")

    def with_overrides(self, **overrides: Any) -> "RamConfig":
        """返回覆盖部分字段后的副本（值为 None 的项忽略）"""
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError(f"未知配置项: {', '.join(sorted(unknown))}")
        changes = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RamConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"未知配置项: {', '.join(sorted(unknown))}")
        return cls(**data)

    @classmethod
    def load(cls, path: Path) -> "RamConfig":
        """从 JSON 文件加载"""
        path = Path(path)
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"无法读取配置文件 {path}: {e}")
        if not isinstance(data, dict):
            raise ConfigError(f"配置文件必须是 JSON 对象: {path}")
        return cls.from_dict(data)

    def save(self, path: Path):
        """保存为 JSON 文件"""
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.to_dict(), f, ensure_ascii=False, indent=2)
