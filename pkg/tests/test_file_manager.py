"""
文件管理器测试
"""
import os
import shutil
import sys
import tempfile
import unittest

# 添加项目根目录到Python路径
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from services.file_manager import FileManager, FileManagerError


class TestFileManager(unittest.TestCase):
    """文件管理器测试类"""

    def setUp(self):
        """测试前准备"""
        self.file_manager = FileManager()
        self.temp_dir = tempfile.mkdtemp()
        self.test_file = os.path.join(self.temp_dir, "sweep.csv")

    def tearDown(self):
        """测试后清理"""
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_validate_save_path_valid(self):
        valid, message = self.file_manager.validate_save_path(self.test_file)
        self.assertTrue(valid)
        self.assertEqual(message, "")

    def test_validate_save_path_missing_directory(self):
        """不存在的目录不会被自动创建"""
        target = os.path.join(self.temp_dir, "missing", "out.csv")
        valid, message = self.file_manager.validate_save_path(target)
        self.assertFalse(valid)
        self.assertIn("目录不存在", message)
        self.assertFalse(os.path.exists(os.path.dirname(target)))

    def test_validate_save_path_is_directory(self):
        valid, message = self.file_manager.validate_save_path(self.temp_dir)
        self.assertFalse(valid)
        self.assertIn("目录", message)

    def test_invalid_filename(self):
        self.assertFalse(self.file_manager._is_valid_filename("a<b.csv"))
        self.assertFalse(self.file_manager._is_valid_filename("  "))
        self.assertTrue(self.file_manager._is_valid_filename("变换扫描.csv"))

    def test_write_text(self):
        """UTF-8 编码、LF 换行，不留临时文件"""
        path = self.file_manager.write_text(self.test_file, "re_z,im_z\n0.0,1.0\n")
        self.assertEqual(path, self.test_file)
        with open(self.test_file, 'rb') as handle:
            self.assertEqual(handle.read(), b"re_z,im_z\n0.0,1.0\n")
        self.assertEqual(os.listdir(self.temp_dir), ["sweep.csv"])

    def test_write_text_replaces_existing(self):
        self.file_manager.write_text(self.test_file, "old\n")
        self.file_manager.write_text(self.test_file, "new\n")
        with open(self.test_file, encoding='utf-8') as handle:
            self.assertEqual(handle.read(), "new\n")

    def test_atomic_write_failure_leaves_nothing(self):
        """写入回调失败时目标文件与临时文件都不存在"""
        def failing_writer(tmp_path):
            with open(tmp_path, 'w') as handle:
                handle.write("partial")
            raise RuntimeError("磁盘已满")

        with self.assertRaises(FileManagerError) as ctx:
            self.file_manager.atomic_write(self.test_file, failing_writer)
        self.assertIn("磁盘已满", str(ctx.exception))
        self.assertEqual(os.listdir(self.temp_dir), [])

    def test_atomic_write_failure_keeps_previous_file(self):
        self.file_manager.write_text(self.test_file, "kept\n")

        def failing_writer(tmp_path):
            raise OSError("中断")

        with self.assertRaises(FileManagerError):
            self.file_manager.atomic_write(self.test_file, failing_writer)
        with open(self.test_file, encoding='utf-8') as handle:
            self.assertEqual(handle.read(), "kept\n")

    def test_atomic_write_invalid_path(self):
        with self.assertRaises(FileManagerError):
            self.file_manager.write_text(os.path.join(self.temp_dir, "no", "such.csv"), "x")


if __name__ == '__main__':
    unittest.main()
