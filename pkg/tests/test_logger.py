"""
日志系统测试
"""
import io
import logging
import os
import shutil
import sys
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

# 添加项目根目录到Python路径
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from utils.logger import (
    LOG_LEVEL_ENV, ApplicationLogger, ColoredFormatter, LoggerSetup,
)


class TestApplicationLogger(unittest.TestCase):
    """应用程序日志器测试类"""

    def setUp(self):
        """测试前准备"""
        self.temp_dir = tempfile.mkdtemp()
        self.log_file = Path(self.temp_dir) / "logs" / "test.log"

        # 清除单例实例
        ApplicationLogger._instances.clear()

        self.test_config = {
            "level": "DEBUG",
            "log_file": str(self.log_file),
            "max_file_size": "1MB",
            "backup_count": 3,
            "format": "%(name)s - %(levelname)s - %(message)s"
        }

    def tearDown(self):
        """测试后清理"""
        for instance in ApplicationLogger._instances.values():
            if instance.logger:
                for handler in instance.logger.handlers[:]:
                    handler.close()
                    instance.logger.removeHandler(handler)
        ApplicationLogger._instances.clear()
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def read_log(self):
        for handler in logging.getLogger("test_logger").handlers:
            handler.flush()
        return self.log_file.read_text(encoding='utf-8')

    def test_logger_initialization(self):
        """文件处理器按需创建目录"""
        with patch.dict(os.environ, {LOG_LEVEL_ENV: ""}):
            logger = ApplicationLogger("test_logger", self.test_config)
        self.assertEqual(logger.logger.level, logging.DEBUG)
        self.assertEqual(len(logger.logger.handlers), 2)
        self.assertFalse(logger.logger.propagate)
        self.assertTrue(self.log_file.parent.exists())

    def test_console_only_without_log_file(self):
        config = dict(self.test_config, log_file="")
        logger = ApplicationLogger("test_logger", config)
        self.assertEqual(len(logger.logger.handlers), 1)
        self.assertIs(logger.logger.handlers[0].stream, sys.stderr)

    def test_env_overrides_level(self):
        """LCACHAR_LOG 优先于配置；无效值回退到 WARNING"""
        with patch.dict(os.environ, {LOG_LEVEL_ENV: "error"}):
            self.assertEqual(ApplicationLogger("test_logger", self.test_config).effective_level(), "ERROR")
        with patch.dict(os.environ, {LOG_LEVEL_ENV: "chatty"}):
            self.assertEqual(ApplicationLogger("test_logger", self.test_config).effective_level(), "WARNING")

    def test_singleton_pattern(self):
        first = ApplicationLogger.get_logger("test_logger", self.test_config)
        second = ApplicationLogger.get_logger("test_logger")
        self.assertIs(first, second)

    def test_log_operation_and_performance(self):
        with patch.dict(os.environ, {LOG_LEVEL_ENV: ""}):
            logger = ApplicationLogger("test_logger", self.test_config)
        logger.log_operation("transform", {"out": None, "seed": 0})
        logger.log_performance("变换扫描", 0.1234, {"points": 9})
        content = self.read_log()
        self.assertIn("操作: transform - out=None, seed=0", content)
        self.assertIn("性能: 变换扫描 耗时 0.123秒 - points=9", content)

    def test_log_error_with_context(self):
        with patch.dict(os.environ, {LOG_LEVEL_ENV: ""}):
            logger = ApplicationLogger("test_logger", self.test_config)
        try:
            raise ValueError("测试错误")
        except ValueError as e:
            logger.log_error_with_context(e, {"m": 2, "eps": 0.4})
        content = self.read_log()
        self.assertIn("ValueError: 测试错误 - 上下文: m=2, eps=0.4", content)
        self.assertIn("Traceback", content)

    def test_level_filters_messages(self):
        config = dict(self.test_config, level="WARNING")
        with patch.dict(os.environ, {LOG_LEVEL_ENV: ""}):
            logger = ApplicationLogger("test_logger", config)
        logger.info("不应出现")
        logger.warning("应该出现")
        content = self.read_log()
        self.assertNotIn("不应出现", content)
        self.assertIn("应该出现", content)

    def test_parse_size(self):
        logger = ApplicationLogger("test_logger", dict(self.test_config, log_file=""))
        self.assertEqual(logger._parse_size("1KB"), 1024)
        self.assertEqual(logger._parse_size("10MB"), 10 * 1024 * 1024)
        self.assertEqual(logger._parse_size("1GB"), 1024 ** 3)
        self.assertEqual(logger._parse_size("2048"), 2048)
        with self.assertRaises(ValueError):
            logger._parse_size("lots")

    def test_reload_config(self):
        logger = ApplicationLogger("test_logger", dict(self.test_config, log_file=""))
        with patch.dict(os.environ, {LOG_LEVEL_ENV: ""}):
            logger.reload_config(dict(self.test_config, level="ERROR", log_file=""))
        self.assertEqual(logger.logger.level, logging.ERROR)
        self.assertEqual(len(logger.logger.handlers), 1)


class TestColoredFormatter(unittest.TestCase):
    """彩色格式化器测试类"""

    def test_colors_do_not_leak(self):
        """着色只影响输出文本，不改写记录本身"""
        formatter = ColoredFormatter("%(levelname)s %(message)s")
        record = logging.LogRecord("x", logging.WARNING, __file__, 1, "消息", None, None)
        text = formatter.format(record)
        self.assertIn("\033[33mWARNING\033[0m", text)
        self.assertEqual(record.levelname, "WARNING")


class TestLoggerSetup(unittest.TestCase):
    """包级日志设置测试类"""

    def setUp(self):
        ApplicationLogger._instances.clear()

    def tearDown(self):
        ApplicationLogger._instances.clear()

    def test_package_loggers_write_to_stderr(self):
        """services 包下模块的日志经包日志器输出到标准错误流"""
        stderr = io.StringIO()
        config = {"level": "INFO", "log_file": "", "format": "%(name)s:%(message)s"}
        with patch.dict(os.environ, {LOG_LEVEL_ENV: ""}), patch("sys.stderr", stderr):
            app_logger = LoggerSetup.setup_package_loggers(config)
            logging.getLogger("services.recovery").info("恢复")
            app_logger.info("完成")
        self.assertIn("services.recovery:恢复", stderr.getvalue())
        self.assertIn("lcachar:完成", stderr.getvalue())

    def test_setup_logger_reconfigures(self):
        first = LoggerSetup.setup_logger("lcachar", {"level": "INFO", "log_file": ""})
        second = LoggerSetup.setup_logger("lcachar", {"level": "ERROR", "log_file": ""})
        self.assertIs(first, second)
        with patch.dict(os.environ, {LOG_LEVEL_ENV: ""}):
            self.assertEqual(ApplicationLogger.get_logger("lcachar").effective_level(), "ERROR")


if __name__ == '__main__':
    unittest.main()
