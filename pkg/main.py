#!/usr/bin/env python3
"""
lcachar - 局部紧阿贝尔群上广义特征的数值工具
命令行入口，用法见 README.md
"""
import os
import sys

# 添加项目根目录到Python路径
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from ui.cli import main


if __name__ == "__main__":
    sys.exit(main())
