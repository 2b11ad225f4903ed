"""日志配置模块"""

import functools
import logging
import logging.handlers
import re
import sys
import time
from pathlib import Path
from typing import Callable, Optional, TypeVar

from .config import get_settings

T = TypeVar("T")

_SIZE_PATTERN = re.compile(r"^(\d+)\s*([KMG]?)B?$")
_SIZE_UNITS = {"": 1, "K": 1024, "M": 1024 ** 2, "G": 1024 ** 3}

# set_level 设置后，新建的日志记录器也使用该级别
_level_override: Optional[str] = None


def setup_logger(
    name: str,
    level: Optional[str] = None,
    log_file: Optional[str] = None,
) -> logging.Logger:
    """设置日志记录器

    Args:
        name: 日志记录器名称
        level: 日志级别，不指定时使用配置中的级别
        log_file: 日志文件路径，不指定时使用配置中的路径

    Returns:
        配置好的日志记录器
    """
    logger = logging.getLogger(name)

    # 如果已经配置过，只更新级别
    if logger.handlers:
        if level:
            logger.setLevel(getattr(logging, level.upper()))
        return logger

    log_config = get_settings().logging
    log_level = level or _level_override or log_config.level
    log_file = log_file or log_config.file

    logger.setLevel(getattr(logging, log_level.upper()))
    logger.propagate = False
    formatter = logging.Formatter(log_config.format)

    # 控制台处理器（stderr，stdout 留给命令输出）
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            log_path,
            maxBytes=_parse_file_size(log_config.max_file_size),
            backupCount=log_config.backup_count,
            encoding="utf-8",
        )
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


def _parse_file_size(size_str: str) -> int:
    """解析文件大小字符串

    Args:
        size_str: 大小字符串，如 '10MB', '512K', '1024'

    Returns:
        字节数

    Raises:
        ValueError: 格式无法识别
    """
    match = _SIZE_PATTERN.match(size_str.upper().strip())
    if not match:
        raise ValueError(f"无法解析文件大小: {size_str!r}")
    return int(match.group(1)) * _SIZE_UNITS[match.group(2)]


def get_logger(name: str) -> logging.Logger:
    """获取日志记录器的便捷函数"""
    return setup_logger(name)


def set_level(level: str) -> None:
    """统一调整包内所有日志记录器的级别"""
    global _level_override
    numeric = getattr(logging, level.upper())
    _level_override = level.upper()
    for name, logger in logging.Logger.manager.loggerDict.items():
        if isinstance(logger, logging.Logger) and logger.handlers and name.startswith("occam"):
            logger.setLevel(numeric)


class LoggerMixin:
    """日志记录器混入类"""

    @property
    def logger(self) -> logging.Logger:
        """获取当前类的日志记录器"""
        if not hasattr(self, "_logger"):
            self._logger = get_logger(f"occam.{self.__class__.__name__}")
        return self._logger


def log_execution_time(func: Callable[..., T]) -> Callable[..., T]:
    """记录函数执行时间的装饰器"""

    @functools.wraps(func)
    def wrapper(*args, **kwargs) -> T:
        start_time = time.perf_counter()
        logger = get_logger(func.__module__)
        try:
            result = func(*args, **kwargs)
        except Exception as e:
            logger.error(f"{func.__name__} 执行失败，耗时: {time.perf_counter() - start_time:.3f}秒，错误: {e}")
            raise
        logger.debug(f"{func.__name__} 执行完成，耗时: {time.perf_counter() - start_time:.3f}秒")
        return result

    return wrapper
