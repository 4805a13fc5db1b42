"""
日志配置

日志级别由环境变量 HYBRID_KKT_LOG 控制(可写在 .env 文件中), 默认 WARNING。
"""

import logging
import os
import sys
from typing import Optional, Union

from dotenv import load_dotenv

LOG_ENV_VAR = "HYBRID_KKT_LOG"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_HANDLER_NAME = "hybrid_kkt_stderr"


def resolve_log_level(level: Optional[Union[str, int]] = None) -> int:
    """
    解析日志级别

    Args:
        level: 显式级别(名称或数值); 为 None 时读取环境变量

    Returns:
        int: logging 模块的级别数值

    Raises:
        ValueError: 级别名称无法识别
    """
    if level is None:
        load_dotenv()
        level = os.getenv(LOG_ENV_VAR, "WARNING")
    if isinstance(level, int):
        return level
    resolved = logging.getLevelName(str(level).strip().upper())
    if not isinstance(resolved, int):
        raise ValueError(f"无法识别的日志级别: {level}")
    return resolved


def configure_logging(level: Optional[Union[str, int]] = None) -> logging.Logger:
    """为 hybrid_kkt 与 tools 包安装唯一的 stderr 处理器"""
    numeric_level = resolve_log_level(level)
    root = logging.getLogger()
    handler = next((h for h in root.handlers if h.get_name() == _HANDLER_NAME), None)
    if handler is None:
        handler = logging.StreamHandler(sys.stderr)
        handler.set_name(_HANDLER_NAME)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
    elif handler.stream is not sys.stderr:
        handler.setStream(sys.stderr)
    for name in ("hybrid_kkt", "tools"):
        logging.getLogger(name).setLevel(numeric_level)
    handler.setLevel(numeric_level)
    return logging.getLogger("hybrid_kkt")
