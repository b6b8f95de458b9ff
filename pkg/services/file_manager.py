"""
文件管理器
负责输出路径处理、路径校验以及原子写入（写临时文件，成功后重命名）
"""
import os
import tempfile
from pathlib import Path
from typing import Callable, Tuple


class FileManagerError(Exception):
    """文件管理相关异常"""
    pass


class FileManager:
    """文件管理器类"""

    def validate_save_path(self, file_path: str) -> Tuple[bool, str]:
        """
        验证保存路径的有效性（不创建任何目录）

        Args:
            file_path: 要验证的文件路径

        Returns:
            Tuple[bool, str]: (是否有效, 错误信息)
        """
        try:
            path = Path(file_path)

            if path.is_dir():
                return False, f"输出路径是一个目录: {path}"

            if not path.parent.exists():
                return False, f"目录不存在: {path.parent}"

            if not os.access(path.parent, os.W_OK):
                return False, f"目录没有写入权限: {path.parent}"

            if path.exists() and not os.access(path, os.W_OK):
                return False, f"文件没有写入权限: {path.name}"

            if not self._is_valid_filename(path.name):
                return False, f"文件名包含无效字符: {path.name}"

            return True, ""

        except Exception as e:
            return False, f"路径验证失败: {str(e)}"

    def _is_valid_filename(self, filename: str) -> bool:
        """
        检查文件名是否有效

        Args:
            filename: 文件名

        Returns:
            bool: 是否有效
        """
        invalid_chars = '<>:"/\\|?*\0'

        if not filename or filename.strip() == "":
            return False

        return not any(char in filename for char in invalid_chars)

    def atomic_write(self, file_path: str, writer: Callable[[str], None]) -> str:
        """
        原子写入：writer 先写同目录下的临时文件，成功后替换目标文件；失败时不留下任何输出

        Args:
            file_path: 目标文件路径
            writer: 接收临时文件路径并完成写入的回调

        Returns:
            str: 目标文件路径

        Raises:
            FileManagerError: 路径无效或写入失败
        """
        valid, message = self.validate_save_path(file_path)
        if not valid:
            raise FileManagerError(message)

        path = Path(file_path)
        fd, tmp_path = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=str(path.parent))
        os.close(fd)
        try:
            writer(tmp_path)
            os.replace(tmp_path, path)
        except Exception as e:
            if os.path.exists(tmp_path):
                os.remove(tmp_path)
            raise FileManagerError(f"写入文件失败 {path}: {str(e)}") from e
        return str(path)

    def write_text(self, file_path: str, text: str) -> str:
        """以 UTF-8、LF 换行原子写入文本"""
        def writer(tmp_path: str) -> None:
            with open(tmp_path, 'w', encoding='utf-8', newline='\n') as handle:
                handle.write(text)

        return self.atomic_write(file_path, writer)
