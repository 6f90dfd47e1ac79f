"""
📝 日志工具

标准 logging + rich 的 RichHandler。
"""

import logging
from typing import Optional

try:
    from rich.console import Console
    from rich.logging import RichHandler
    HAS_RICH = True
except ImportError:
    HAS_RICH = False
    Console = RichHandler = None

# 日志级别图标（CLI 输出沿用同一套）
LEVEL_ICONS = {
    "INFO": "ℹ️",
    "SUCCESS": "✅",
    "ERROR": "❌",
    "WARNING": "⚠️",
    "DEBUG": "🔧",
}

_configured = False


def setup_logging(level: str = "INFO", force: bool = False):
    """配置根日志器（只配置一次）；日志写到 stderr，stdout 留给 JSON/CSV"""
    global _configured
    if _configured and not force:
        logging.getLogger().setLevel(level.upper())
        return
    if HAS_RICH:
        handler: logging.Handler = RichHandler(
            console=Console(stderr=True),
            show_time=True, show_path=False, markup=False, rich_tracebacks=True
        )
        fmt = "%(message)s"
    else:
        handler = logging.StreamHandler()
        fmt = "[%(asctime)s] %(levelname)s %(name)s: %(message)s"
    logging.basicConfig(level=level.upper(), format=fmt, handlers=[handler], force=True)
    _configured = True


def get_logger(name: Optional[str] = None) -> logging.Logger:
    return logging.getLogger(name)


def icon_for(level: str) -> str:
    return LEVEL_ICONS.get(level.upper(), "•")
