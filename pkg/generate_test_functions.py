#!/usr/bin/env python3
"""
生成示例输入文件
盒函数、帐篷函数、点质量与混合群上的张量积函数，以及若干隐藏特征与泛函描述
"""
import os
import sys
from datetime import datetime

import numpy as np

# 添加项目根目录到Python路径
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from models.data_models import GenChar
from services.conv_algebra import delta, indicator, point_masses, tensor_product, tent
from services.group_model import identity, make_element, make_group
from services.report_generator import ReportGenerator, character_to_dict, function_to_dict


def create_test_data_folder() -> str:
    """创建测试数据文件夹"""
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    folder_name = f"测试函数_{timestamp}"
    os.makedirs(folder_name, exist_ok=True)
    return folder_name


def generate_functions(h: float = 0.01) -> dict:
    """文件名 → 函数"""
    integers_mod4 = make_group(0, 1, [4])
    discrete = make_group(0, 1, [3])
    return {
        "box.json": indicator(h, -1.0, 1.0),
        "unit_box.json": indicator(h, 0.0, 1.0),
        "tent.json": tent(h, 0.5),
        "delta_integers.json": delta(make_group(0, 1), identity(make_group(0, 1))),
        "binomial.json": point_masses(make_group(0, 1), {
            make_element(make_group(0, 1), (), [0]): 1.0,
            make_element(make_group(0, 1), (), [1]): 1.0,
        }),
        "masses_z_z4.json": point_masses(integers_mod4, {
            make_element(integers_mod4, (), [0], [0]): 1.0,
            make_element(integers_mod4, (), [2], [1]): -0.5j,
            make_element(integers_mod4, (), [-1], [3]): 0.25,
        }),
        "probe_r_z_z3.json": tensor_product(tent(10 * h, 0.5), delta(discrete, identity(discrete))),
    }


def generate_characters(rng: np.random.Generator, count: int = 5) -> dict:
    """ℝ×ℤ×ℤ₃ 上的随机隐藏特征"""
    group = make_group(1, 1, [3])
    characters = {}
    for i in range(count):
        z = complex(rng.uniform(-1, 1), rng.uniform(-2, 2))
        w = rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        alpha = GenChar(group, (z,), (complex(w),), (int(rng.integers(0, 3)),))
        characters[f"hidden_{i + 1}.json"] = character_to_dict(alpha)
    return characters


def main():
    """生成全部示例文件并写出说明"""
    folder_name = create_test_data_folder()
    print(f"创建文件夹: {folder_name}")
    reporter = ReportGenerator()

    print("生成函数文件...")
    functions = generate_functions()
    for name, f in functions.items():
        reporter.write_json(function_to_dict(f), os.path.join(folder_name, name))
        print(f"   - {name}: 群 {f.group.describe()}，网格 {f.values.shape}")

    print("生成隐藏特征...")
    characters = generate_characters(np.random.default_rng(2024))
    for name, data in characters.items():
        reporter.write_json(data, os.path.join(folder_name, name))
    noisy = {"kind": "noisy_gelfand", "char": next(iter(characters.values())), "noise": 0.01}
    reporter.write_json(noisy, os.path.join(folder_name, "noisy_functional.json"))
    print(f"隐藏特征生成完成: {len(characters)}个，另有含噪泛函 noisy_functional.json")

    readme_content = f"""# 示例输入说明

## 生成时间
{datetime.now().strftime('%Y-%m-%d %H:%M:%S')}

## 函数文件
- **box.json**: 1_[−1,1)，h=0.01
- **unit_box.json**: 1_[0,1)，h=0.01
- **tent.json**: 半宽 0.5 的帐篷函数，h=0.01
- **delta_integers.json** / **binomial.json**: ℤ 上的 δ₀ 与 δ₀+δ₁
- **masses_z_z4.json**: ℤ×ℤ₄ 上的三个点质量
- **probe_r_z_z3.json**: ℝ×ℤ×ℤ₃ 上的 tent⊗δ 探针，h=0.1

## 特征文件
- **hidden_*.json**: ℝ×ℤ×ℤ₃ 上的随机广义特征
- **noisy_functional.json**: 以 hidden_1 为底的含噪泛函

## 使用方法
1. python main.py transform box.json --grid 5x5
2. python main.py recover probe_r_z_z3.json --hidden hidden_1.json --fit
3. python main.py strip box.json --r 1 --grid 9x5
"""
    with open(os.path.join(folder_name, "README.md"), 'w', encoding='utf-8') as handle:
        handle.write(readme_content)

    print("\n示例文件生成完成！")
    print(f"文件保存在: {folder_name}")


if __name__ == "__main__":
    main()
