"""
日志配置模块
负责配置和管理命令行工具与各服务模块的日志；控制台输出走标准错误流，标准输出只承载结果
"""
import logging
import logging.handlers
import os
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

from .config_loader import ConfigLoader


# 覆盖配置日志级别的环境变量
LOG_LEVEL_ENV = "LCACHAR_LOG"

# 服务模块使用 logging.getLogger(__name__)，按包名挂载处理器
PACKAGE_LOGGERS = ("services", "ui")

FALLBACK_CONFIG = {
    "level": "WARNING",
    "log_file": "",
    "max_file_size": "10MB",
    "backup_count": 5,
    "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
}


class LoggerError(Exception):
    """日志系统相关异常"""
    pass


class ApplicationLogger:
    """应用程序日志管理器"""

    _instances = {}  # 单例模式存储不同名称的日志器

    def __init__(self, name: str = "lcachar", config: Optional[Dict[str, Any]] = None):
        """
        初始化日志管理器

        Args:
            name: 日志记录器名称
            config: 日志配置字典
        """
        self.name = name
        self.config = config or self._load_config()
        self.logger = None
        self._setup_logger()

    @classmethod
    def get_logger(cls, name: str = "lcachar", config: Optional[Dict[str, Any]] = None) -> 'ApplicationLogger':
        """
        获取日志管理器实例（单例模式）

        Args:
            name: 日志记录器名称
            config: 日志配置字典

        Returns:
            日志管理器实例
        """
        if name not in cls._instances:
            cls._instances[name] = cls(name, config)
        return cls._instances[name]

    def _load_config(self) -> Dict[str, Any]:
        """加载日志配置，失败时使用不落盘的默认配置"""
        try:
            return ConfigLoader().get_logging_config()
        except Exception as e:
            sys.stderr.write(f"警告: 无法加载日志配置，使用默认配置: {e}\n")
            return dict(FALLBACK_CONFIG)

    def effective_level(self) -> str:
        """环境变量 LCACHAR_LOG 优先于配置中的级别；无效值回退到 WARNING"""
        level = (os.environ.get(LOG_LEVEL_ENV) or self.config.get("level", "WARNING")).upper()
        return level if level in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL") else "WARNING"

    def _setup_logger(self) -> None:
        """设置日志记录器"""
        try:
            self.logger = logging.getLogger(self.name)
            self.logger.setLevel(getattr(logging, self.effective_level()))

            # 清除现有处理器（避免重复）
            for handler in list(self.logger.handlers):
                self.logger.removeHandler(handler)
                handler.close()

            log_format = self.config.get("format", FALLBACK_CONFIG["format"])
            formatter = logging.Formatter(log_format, datefmt='%Y-%m-%d %H:%M:%S')

            self._add_console_handler(formatter)
            self._add_file_handler(formatter)

            self.logger.propagate = False

        except Exception as e:
            raise LoggerError(f"设置日志记录器失败: {e}")

    def _add_console_handler(self, formatter: logging.Formatter) -> None:
        """添加写入标准错误流的控制台处理器"""
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(self.logger.level)
        console_handler.setFormatter(formatter)

        if hasattr(sys.stderr, 'isatty') and sys.stderr.isatty():
            console_handler.setFormatter(ColoredFormatter(formatter._fmt, datefmt=formatter.datefmt))

        self.logger.addHandler(console_handler)

    def _add_file_handler(self, formatter: logging.Formatter) -> None:
        """log_file 非空时添加轮转文件处理器"""
        log_file = self.config.get("log_file", "")
        if not log_file:
            return
        try:
            Path(log_file).parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.handlers.RotatingFileHandler(
                log_file,
                maxBytes=self._parse_size(self.config.get("max_file_size", "10MB")),
                backupCount=self.config.get("backup_count", 5),
                encoding='utf-8'
            )
            file_handler.setLevel(self.logger.level)
            file_handler.setFormatter(formatter)
            self.logger.addHandler(file_handler)

        except Exception as e:
            self.logger.warning(f"无法设置文件日志处理器: {e}")

    def _parse_size(self, size_str: str) -> int:
        """
        解析文件大小字符串

        Args:
            size_str: 大小字符串，如 "10MB"

        Returns:
            字节数

        Raises:
            ValueError: 无效的大小格式
        """
        try:
            size_str = str(size_str).upper().strip()

            if size_str.endswith('KB'):
                return int(float(size_str[:-2]) * 1024)
            elif size_str.endswith('MB'):
                return int(float(size_str[:-2]) * 1024 * 1024)
            elif size_str.endswith('GB'):
                return int(float(size_str[:-2]) * 1024 * 1024 * 1024)
            else:
                return int(size_str)
        except (ValueError, TypeError) as e:
            raise ValueError(f"无效的文件大小格式: {size_str}") from e

    def info(self, message: str, *args, **kwargs) -> None:
        if self.logger:
            self.logger.info(message, *args, **kwargs)

    def warning(self, message: str, *args, **kwargs) -> None:
        if self.logger:
            self.logger.warning(message, *args, **kwargs)

    def error(self, message: str, *args, **kwargs) -> None:
        if self.logger:
            self.logger.error(message, *args, **kwargs)

    def log_operation(self, operation: str, details: Optional[Dict[str, Any]] = None) -> None:
        """
        记录子命令的调用参数

        Args:
            operation: 子命令名称
            details: 参数详情
        """
        message = f"操作: {operation}"
        if details:
            message += " - " + ", ".join(f"{k}={v}" for k, v in details.items())
        self.info(message)

    def log_error_with_context(self, error: Exception, context: Optional[Dict[str, Any]] = None) -> None:
        """
        记录带上下文的错误信息（DEBUG 级别时附带堆栈）

        Args:
            error: 异常对象
            context: 错误上下文信息
        """
        message = f"错误: {type(error).__name__}: {str(error)}"
        if context:
            message += " - 上下文: " + ", ".join(f"{k}={v}" for k, v in context.items())
        self.logger.error(message, exc_info=self.logger.isEnabledFor(logging.DEBUG))

    def log_performance(self, operation: str, duration: float, details: Optional[Dict[str, Any]] = None) -> None:
        """
        记录扫描耗时

        Args:
            operation: 操作名称
            duration: 执行时间（秒）
            details: 额外详情
        """
        message = f"性能: {operation} 耗时 {duration:.3f}秒"
        if details:
            message += " - " + ", ".join(f"{k}={v}" for k, v in details.items())
        self.info(message)

    def reload_config(self, new_config: Optional[Dict[str, Any]] = None) -> None:
        """
        重新加载配置

        Args:
            new_config: 新的配置字典，如果为None则从配置文件重新加载
        """
        self.config = new_config or self._load_config()
        self._setup_logger()


class ColoredFormatter(logging.Formatter):
    """彩色日志格式化器（用于控制台输出）"""

    COLORS = {
        'DEBUG': '\033[36m',
        'INFO': '\033[32m',
        'WARNING': '\033[33m',
        'ERROR': '\033[31m',
        'CRITICAL': '\033[35m',
        'RESET': '\033[0m'
    }

    def format(self, record):
        original = record.levelname
        if original in self.COLORS:
            record.levelname = f"{self.COLORS[original]}{original}{self.COLORS['RESET']}"
        try:
            return super().format(record)
        finally:
            record.levelname = original


class LoggerSetup:
    """日志设置类"""

    @staticmethod
    def setup_logger(name: str = "lcachar", config: Optional[Dict[str, Any]] = None) -> logging.Logger:
        """
        按给定配置（重新）设置一个日志记录器

        Returns:
            配置好的日志记录器
        """
        app_logger = ApplicationLogger.get_logger(name, config)
        if config is not None and app_logger.config is not config:
            app_logger.reload_config(config)
        return app_logger.logger

    @staticmethod
    def setup_package_loggers(config: Optional[Dict[str, Any]] = None,
                              packages: Iterable[str] = PACKAGE_LOGGERS) -> ApplicationLogger:
        """为工具本身和各个包的模块日志统一挂载处理器，返回工具日志管理器"""
        for package in packages:
            LoggerSetup.setup_logger(package, config)
        LoggerSetup.setup_logger("lcachar", config)
        return ApplicationLogger.get_logger("lcachar")