"""
工具装饰器模块
"""

import logging
import time
from functools import wraps
from typing import Callable

logger = logging.getLogger(__name__)


def log_stage(stage_name: str):
    """
    记录阶段耗时的装饰器

    Args:
        stage_name: 阶段名称
    """
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            logger.info("[%s] 开始", stage_name)
            try:
                return func(*args, **kwargs)
            finally:
                logger.info("[%s] 结束, 耗时 %.3f 秒", stage_name, time.perf_counter() - start)
        return wrapper
    return decorator
