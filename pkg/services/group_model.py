"""
群模型
表示结构定理中的群 ℝ^m × ℤ^n × K（K 为有限阿贝尔群），提供群运算、
直和、生成盒采样以及相对生成盒的字长
"""
import logging
import math
from itertools import product
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from models.data_models import GroupSpec, GroupElement, GeneratingBox


logger = logging.getLogger(__name__)


class GroupModelError(Exception):
    """群模型相关异常"""
    pass


class InvalidOrderError(GroupModelError, ValueError):
    """循环因子阶数小于 2"""
    pass


class NegativeRankError(GroupModelError, ValueError):
    """秩为负数"""
    pass


class SpecMismatchError(GroupModelError, ValueError):
    """参与运算的对象不属于同一个群"""
    pass


def validate_orders(orders: Iterable[int]) -> Tuple[int, ...]:
    """
    校验循环因子阶数

    Raises:
        InvalidOrderError: 某个阶数小于 2
    """
    checked = []
    for d in orders:
        if int(d) != d or d < 2:
            raise InvalidOrderError(f"循环因子阶数必须是 ≥ 2 的整数: {d}")
        checked.append(int(d))
    return tuple(checked)


def make_group(m: int, n: int, orders: Sequence[int] = ()) -> GroupSpec:
    """
    构造群 ℝ^m × ℤ^n × ∏ℤ_{d_i}

    Haar 测度约定为实因子上的 Lebesgue 测度、离散因子上的计数测度。

    Args:
        m: 实因子个数
        n: 整数因子个数
        orders: 循环因子阶数

    Returns:
        GroupSpec: 校验后的群描述

    Raises:
        NegativeRankError: m 或 n 为负
        InvalidOrderError: 某个阶数小于 2
    """
    if m < 0 or n < 0:
        raise NegativeRankError(f"秩不能为负数: m={m}, n={n}")
    spec = GroupSpec(int(m), int(n), validate_orders(orders))
    logger.debug(f"构造群 {spec.describe()}，Haar 约定: {spec.haar_convention}")
    return spec


def product_group(first: GroupSpec, second: GroupSpec) -> GroupSpec:
    """直和 G1 ⊕ G2：实因子、整数因子、循环因子分别拼接"""
    return GroupSpec(first.real_rank + second.real_rank,
                     first.int_rank + second.int_rank,
                     first.cyclic_orders + second.cyclic_orders)


def identity(group: GroupSpec) -> GroupElement:
    return GroupElement(group, (0.0,) * group.real_rank, (0,) * group.int_rank, (0,) * group.cyclic_rank)


def make_element(group: GroupSpec, real: Sequence[float] = (), ints: Sequence[int] = (),
                 residues: Sequence[int] = ()) -> GroupElement:
    """
    构造群元素

    Raises:
        SpecMismatchError: 坐标个数与群不一致
    """
    try:
        return GroupElement(group, tuple(real), tuple(ints), tuple(residues))
    except ValueError as e:
        raise SpecMismatchError(str(e)) from e


def ensure_same_group(*groups: GroupSpec) -> GroupSpec:
    """确认所有对象属于同一个群"""
    first = groups[0]
    for other in groups[1:]:
        if other != first:
            raise SpecMismatchError(f"群不一致: {first.describe()} 与 {other.describe()}")
    return first


def add(a: GroupElement, b: GroupElement) -> GroupElement:
    """逐分量相加，余数模 d_i 约化"""
    group = ensure_same_group(a.group, b.group)
    return GroupElement(
        group,
        tuple(x + y for x, y in zip(a.real_coords, b.real_coords)),
        tuple(k + l for k, l in zip(a.int_coords, b.int_coords)),
        tuple(r + s for r, s in zip(a.residues, b.residues)),
    )


def neg(a: GroupElement) -> GroupElement:
    """逐分量取负"""
    return GroupElement(
        a.group,
        tuple(-x if x != 0.0 else 0.0 for x in a.real_coords),
        tuple(-k for k in a.int_coords),
        tuple(-r for r in a.residues),
    )


def subtract(a: GroupElement, b: GroupElement) -> GroupElement:
    return add(a, neg(b))


def element_order(a: GroupElement) -> int:
    """
    有限部分元素的阶

    Raises:
        GroupModelError: 元素含非零实坐标或整数坐标（无限阶）
    """
    if any(x != 0.0 for x in a.real_coords) or any(k != 0 for k in a.int_coords):
        raise GroupModelError("只有落在有限部分 K 中的元素才有有限阶")
    order = 1
    for r, d in zip(a.residues, a.group.cyclic_orders):
        order = math.lcm(order, d // math.gcd(r, d))
    return order


def split_element(t: GroupElement, first: GroupSpec, second: GroupSpec) -> Tuple[GroupElement, GroupElement]:
    """把 G1 ⊕ G2 中的元素拆成两个分量"""
    ensure_same_group(t.group, product_group(first, second))
    m1, n1, k1 = first.real_rank, first.int_rank, first.cyclic_rank
    return (
        GroupElement(first, t.real_coords[:m1], t.int_coords[:n1], t.residues[:k1]),
        GroupElement(second, t.real_coords[m1:], t.int_coords[n1:], t.residues[k1:]),
    )


def join_elements(a: GroupElement, b: GroupElement) -> GroupElement:
    """拼接 G1、G2 中的元素得到 G1 ⊕ G2 中的元素"""
    return GroupElement(product_group(a.group, b.group),
                        a.real_coords + b.real_coords,
                        a.int_coords + b.int_coords,
                        a.residues + b.residues)


def all_torsion_elements(group: GroupSpec) -> List[GroupElement]:
    """有限群 K 的全部元素（按余数字典序）"""
    if not group.is_finite:
        raise GroupModelError(f"群 {group.describe()} 不是有限群")
    return [GroupElement(group, (), (), residues)
            for residues in product(*(range(d) for d in group.cyclic_orders))]


def _check_box(group: GroupSpec, box: GeneratingBox) -> None:
    if len(box.real_halfwidths) != group.real_rank:
        raise SpecMismatchError(
            f"生成盒的实半宽个数 {len(box.real_halfwidths)} 与实秩 {group.real_rank} 不一致")


def _real_steps(x: float, u: float) -> int:
    """满足 |x| ≤ p·u 的最小正整数 p，比较方式与 in_box 相同"""
    a = abs(x)
    p = max(1, math.ceil(a / u))
    while p > 1 and a <= (p - 1) * u:
        p -= 1
    while a > p * u:
        p += 1
    return p


def word_length(t: GroupElement, box: GeneratingBox) -> int:
    """
    相对生成盒的字长：t 能写成 p 个 U 中元素之和的最小 p

    p = max(实坐标的 ceil(|x_j|/u_j)，整数坐标的 |k_j|，任一余数非零时为 1)，t = 0 时 p = 0。

    Raises:
        SpecMismatchError: 生成盒与群不一致
    """
    _check_box(t.group, box)
    p = 0
    for x, u in zip(t.real_coords, box.real_halfwidths):
        if x != 0.0:
            p = max(p, _real_steps(x, u))
    for k in t.int_coords:
        p = max(p, abs(k))
    if any(r != 0 for r in t.residues):
        p = max(p, 1)
    return p


def in_box(t: GroupElement, box: GeneratingBox) -> bool:
    """t ∈ Ū"""
    _check_box(t.group, box)
    if any(abs(x) > u for x, u in zip(t.real_coords, box.real_halfwidths)):
        return False
    allowed = 1 if box.int_steps else 0
    return all(abs(k) <= allowed for k in t.int_coords)


def box_axis_samples(group: GroupSpec, box: GeneratingBox, density: int) -> List[np.ndarray]:
    """
    Ū 在每个轴上的采样

    实轴取含端点的 density 点均匀网格，整数轴取 {−1,0,1}（或仅 {0}），循环轴取全部余数。
    """
    _check_box(group, box)
    axes = [np.linspace(-u, u, density) for u in box.real_halfwidths]
    steps = np.array([-1, 0, 1]) if box.int_steps else np.array([0])
    axes += [steps for _ in range(group.int_rank)]
    axes += [np.arange(d) for d in group.cyclic_orders]
    return axes


def box_sample_points(group: GroupSpec, box: GeneratingBox, density: int) -> List[GroupElement]:
    """Ū 的采样点列表（按轴的笛卡尔积）"""
    axes = box_axis_samples(group, box, density)
    m, n = group.real_rank, group.int_rank
    points = []
    for coords in product(*axes):
        points.append(GroupElement(group, coords[:m], coords[m:m + n], coords[m + n:]))
    return points


def sample_box_uniform(group: GroupSpec, box: GeneratingBox, count: int,
                       rng: np.random.Generator) -> List[GroupElement]:
    """在 Ū 中均匀随机取 count 个元素（整数轴在允许的步中均匀取，循环轴在全部余数中均匀取）"""
    _check_box(group, box)
    steps = [-1, 0, 1] if box.int_steps else [0]
    points = []
    for _ in range(count):
        real = tuple(float(rng.uniform(-u, u)) for u in box.real_halfwidths)
        ints = tuple(int(rng.choice(steps)) for _ in range(group.int_rank))
        residues = tuple(int(rng.integers(0, d)) for d in group.cyclic_orders)
        points.append(GroupElement(group, real, ints, residues))
    return points
