"""
输入读取器
读取并校验 JSON 格式的群描述、函数文件、特征与泛函描述
"""
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from models.data_models import CcFunction, GenChar, GroupSpec, MultiplicativeFunctional
from services.group_model import GroupModelError, make_group
from services.recovery import gelfand_functional, noisy_functional


class InputProcessingError(Exception):
    """输入文件或描述解析相关异常"""
    pass


def _complex(item: Any, what: str) -> complex:
    """[re, im] 或单个实数"""
    if isinstance(item, (int, float)) and not isinstance(item, bool):
        return complex(item)
    if isinstance(item, (list, tuple)) and len(item) == 2:
        return complex(float(item[0]), float(item[1]))
    raise InputProcessingError(f"{what} 必须是 [re, im] 或实数: {item!r}")


def _ints(items: Any, what: str) -> tuple:
    if not isinstance(items, (list, tuple)):
        raise InputProcessingError(f"{what} 必须是整数列表: {items!r}")
    try:
        values = tuple(int(v) for v in items)
    except (TypeError, ValueError):
        raise InputProcessingError(f"{what} 必须是整数列表: {items!r}")
    if any(v != item for v, item in zip(values, items)):
        raise InputProcessingError(f"{what} 必须是整数列表: {items!r}")
    return values


class InputReader:
    """JSON 输入读取器类"""

    def __init__(self):
        self.logger = logging.getLogger(__name__)
        self.supported_extensions = ['.json']

    def validate_file_path(self, file_path: str) -> bool:
        """
        验证文件路径是否有效

        Raises:
            InputProcessingError: 文件路径无效时抛出异常
        """
        if not file_path:
            raise InputProcessingError("文件路径不能为空")

        path = Path(file_path)

        if not path.exists():
            raise InputProcessingError(f"文件不存在: {file_path}")

        if not path.is_file():
            raise InputProcessingError(f"路径不是文件: {file_path}")

        if path.suffix.lower() not in self.supported_extensions:
            raise InputProcessingError(
                f"不支持的文件格式: {path.suffix}，支持的格式: {', '.join(self.supported_extensions)}")

        if not os.access(file_path, os.R_OK):
            raise InputProcessingError(f"文件无法读取，请检查文件权限: {file_path}")

        if path.stat().st_size == 0:
            raise InputProcessingError(f"文件为空: {file_path}")

        return True

    def load_json(self, source: Union[str, Dict], what: str = "JSON") -> Dict:
        """从文件路径、JSON 文本或已解析的字典取得对象"""
        if isinstance(source, dict):
            return source
        text = source.strip() if isinstance(source, str) else ""
        if text.startswith("{"):
            try:
                return json.loads(text)
            except json.JSONDecodeError as e:
                raise InputProcessingError(f"{what} 不是合法的 JSON: {str(e)}")
        self.validate_file_path(source)
        try:
            with open(source, 'r', encoding='utf-8') as handle:
                data = json.load(handle)
        except json.JSONDecodeError as e:
            raise InputProcessingError(f"{what} 文件不是合法的 JSON: {source}: {str(e)}")
        if not isinstance(data, dict):
            raise InputProcessingError(f"{what} 的顶层必须是对象: {source}")
        self.logger.debug(f"读取 {what}: {source}")
        return data

    def parse_group(self, data: Dict) -> GroupSpec:
        """
        {"real_rank": m, "int_rank": n, "cyclic_orders": [...]}

        Raises:
            InputProcessingError: 字段缺失或非法
        """
        if not isinstance(data, dict):
            raise InputProcessingError(f"群描述必须是对象: {data!r}")
        try:
            return make_group(int(data.get("real_rank", 0)), int(data.get("int_rank", 0)),
                              _ints(data.get("cyclic_orders", []), "cyclic_orders"))
        except (GroupModelError, TypeError, ValueError) as e:
            raise InputProcessingError(f"群描述非法: {str(e)}")

    def parse_function(self, data: Dict) -> CcFunction:
        """
        函数 JSON：{"group", "real_step", "real_offset", "int_offset", "extents", "values"}

        extents 为每个非循环轴上的支撑跨度（网格点数 − 1），values 为按行优先展开的 [re, im] 列表。

        Raises:
            InputProcessingError: 结构或取值非法
        """
        if "group" not in data or "values" not in data:
            raise InputProcessingError("函数描述缺少 group 或 values 字段")
        group = self.parse_group(data["group"])
        extents = _ints(data.get("extents", []), "extents")
        if len(extents) != group.real_rank + group.int_rank or any(e < 0 for e in extents):
            raise InputProcessingError(f"extents 必须为每个非循环轴给出非负跨度: {list(extents)}")
        shape = tuple(e + 1 for e in extents) + group.cyclic_orders
        raw = data["values"]
        if not isinstance(raw, list) or not raw:
            raise InputProcessingError("values 不能为空")
        values = np.array([_complex(v, "values 元素") for v in raw], dtype=complex)
        if values.size != int(np.prod(shape)):
            raise InputProcessingError(f"values 个数 {values.size} 与网格形状 {shape} 不一致")
        try:
            return CcFunction(
                group,
                tuple(float(h) for h in data.get("real_step", [])),
                _ints(data.get("real_offset", [0] * group.real_rank), "real_offset"),
                _ints(data.get("int_offset", [0] * group.int_rank), "int_offset"),
                values.reshape(shape),
            )
        except ValueError as e:
            raise InputProcessingError(f"函数描述非法: {str(e)}")

    def read_function(self, source: Union[str, Dict]) -> CcFunction:
        """读取函数文件"""
        function = self.parse_function(self.load_json(source, "函数"))
        self.logger.info(f"读取函数: 群 {function.group.describe()}，网格 {function.values.shape}")
        return function

    def parse_character(self, data: Dict, group: GroupSpec) -> GenChar:
        """
        特征 JSON：{"z": [[re, im], ...], "w": [[re, im], ...], "dual_residues": [...]}

        对偶余数也可写作 "c"；缺省字段取平凡值（z = 0、w = 1、余数 0）。

        Raises:
            InputProcessingError: 参数个数与群不一致或 w 为零
        """
        if not isinstance(data, dict):
            raise InputProcessingError(f"特征描述必须是对象: {data!r}")
        z = tuple(_complex(v, "z") for v in data.get("z", [0.0] * group.real_rank))
        w = tuple(_complex(v, "w") for v in data.get("w", [1.0] * group.int_rank))
        c = _ints(data.get("dual_residues", data.get("c", [0] * group.cyclic_rank)), "dual_residues")
        try:
            return GenChar(group, z, w, c)
        except ValueError as e:
            raise InputProcessingError(f"特征描述非法: {str(e)}")

    def read_character(self, source: Union[str, Dict], group: GroupSpec) -> GenChar:
        return self.parse_character(self.load_json(source, "特征"), group)

    def parse_functional(self, data: Dict, group: GroupSpec,
                         rng: Optional[np.random.Generator] = None) -> MultiplicativeFunctional:
        """
        泛函描述：{"kind": "gelfand", "char": ...} 或 {"kind": "noisy_gelfand", "char": ..., "noise": σ}

        不带 kind 的对象按特征描述处理，等价于 gelfand。
        """
        kind = data.get("kind", "gelfand")
        if kind not in ("gelfand", "noisy_gelfand"):
            raise InputProcessingError(f"不支持的泛函类型: {kind}")
        alpha = self.parse_character(data.get("char", data if "kind" not in data else {}), group)
        phi = gelfand_functional(alpha)
        if kind == "noisy_gelfand":
            noise = float(data.get("noise", 0.0))
            if noise < 0:
                raise InputProcessingError(f"噪声水平不能为负数: {noise}")
            phi = noisy_functional(phi, noise, rng if rng is not None else np.random.default_rng(0))
        return phi

    def read_functional(self, source: Union[str, Dict], group: GroupSpec,
                        rng: Optional[np.random.Generator] = None) -> MultiplicativeFunctional:
        return self.parse_functional(self.load_json(source, "泛函"), group, rng)
