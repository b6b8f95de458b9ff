"""
Beurling 权
指数权 ω_r(s) = exp(r·Σ|s_j|)、加权范数、闭带形区域 Π_{−r,r}、
带内 Gel'fand 变换的有界性及稠密逼近的变换差界
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np

from models.data_models import CcFunction, GenChar, GroupElement, StripRegion, Weight
from services.conv_algebra import (
    gelfand_transform, indicator, linear_combination, translate,
)
from services.characters import is_unitary
from services.group_model import SpecMismatchError, ensure_same_group, make_element


logger = logging.getLogger(__name__)

# 不等式比较的相对松弛，按 1 + ‖·‖_ω 缩放
_STRIP_SLACK = 1e-12


class BeurlingError(Exception):
    """Beurling 权相关异常"""
    pass


class OutsideStripError(BeurlingError, ValueError):
    """z 不在带形区域内"""
    pass


class InvalidWeightError(BeurlingError, ValueError):
    """权参数非法"""
    pass


class NonUnitaryBaseError(BeurlingError, ValueError):
    """离散因子上的 base 特征不是酉的"""
    pass


def make_weight(r: float) -> Weight:
    """
    Raises:
        InvalidWeightError: r ≤ 0
    """
    try:
        return Weight(float(r))
    except ValueError as e:
        raise InvalidWeightError(str(e)) from e


def weight_value(w: Weight, t: GroupElement) -> float:
    """ω(t) = exp(r·Σ|t_j|)，只计实坐标"""
    return math.exp(w.r * sum(abs(x) for x in t.real_coords))


def is_submultiplicative(w: Weight, s: GroupElement, t: GroupElement) -> bool:
    """ω(s+t) ≤ ω(s)·ω(t)"""
    ensure_same_group(s.group, t.group)
    total = tuple(a + b for a, b in zip(s.real_coords, t.real_coords))
    lhs = math.exp(w.r * sum(abs(x) for x in total))
    return lhs <= weight_value(w, s) * weight_value(w, t) * (1 + _STRIP_SLACK)


def weight_grid(f: CcFunction, w: Weight) -> np.ndarray:
    """ω 在 f 的取值表上的取值（可与 values 广播）"""
    result = np.ones((1,) * f.values.ndim)
    for axis in range(f.group.real_rank):
        shape = [1] * f.values.ndim
        shape[axis] = f.values.shape[axis]
        result = result * np.exp(w.r * np.abs(f.axis_coordinates(axis))).reshape(shape)
    return result


def weighted_norm(f: CcFunction, w: Weight) -> float:
    """‖f‖_ω = Σ|f(s)|·ω(s)·cellweight"""
    return float(np.sum(np.abs(f.values) * weight_grid(f, w))) * f.cell_weight


def in_strip(z: complex, strip: StripRegion) -> bool:
    """|Re z| ≤ r（闭区域）"""
    return abs(complex(z).real) <= strip.r


def strip_character(f: CcFunction, z: complex, base: Optional[GenChar] = None) -> GenChar:
    """
    带形扫描使用的特征：实因子取 z，其余因子取 base（缺省为平凡特征）

    base 的 ℤ 因子必须满足 |w| = 1（容差 1e-12），否则 |f̂(z)| ≤ ‖f‖_ω 不再成立。

    Raises:
        SpecMismatchError: f 的群不含实因子，或 base 不属于同一个群
        NonUnitaryBaseError: base 在离散因子上不是酉的
    """
    group = f.group
    if group.real_rank < 1:
        raise SpecMismatchError(f"群 {group.describe()} 不含实因子")
    if base is None:
        return GenChar(group, (complex(z),) * group.real_rank, (1 + 0j,) * group.int_rank, (0,) * group.cyclic_rank)
    ensure_same_group(group, base.group)
    if not is_unitary(GenChar(group, (0j,) * group.real_rank, base.w, base.dual_residues), tol=1e-12):
        raise NonUnitaryBaseError(f"base 特征在 ℤ 因子上不是酉的: w={base.w}")
    return GenChar(group, (complex(z),) * group.real_rank, base.w, base.dual_residues)


def strip_bound_check(f: CcFunction, z: complex, r: float, base: Optional[GenChar] = None,
                      slack: float = _STRIP_SLACK) -> Dict:
    """
    |f̂(z)| ≤ ‖f‖_ω（z 在带内时成立）

    ok 按 |f̂(z)| ≤ ‖f‖_ω + slack·(1 + ‖f‖_ω) 判定，范数较大时松弛随之放大。

    Returns:
        {"transform_abs", "norm", "in_strip", "ok"}；带外的 ok 只是比较结果，不构成断言

    Raises:
        SpecMismatchError: f 的群不含实因子
        NonUnitaryBaseError: base 在离散因子上不是酉的
    """
    alpha = strip_character(f, z, base)
    weight = make_weight(r)
    transform_abs = abs(gelfand_transform(f, alpha))
    norm = weighted_norm(f, weight)
    return {
        "transform_abs": transform_abs,
        "norm": norm,
        "in_strip": in_strip(z, StripRegion(weight.r)),
        "ok": transform_abs <= norm + slack * (1 + norm),
    }


def approx_transform_bound(f: CcFunction, g: CcFunction, z: complex, r: float,
                           base: Optional[GenChar] = None, slack: float = _STRIP_SLACK) -> Dict:
    """
    |f̂(z) − ĝ(z)| ≤ ‖f − g‖_ω

    Raises:
        OutsideStripError: z 不在 Π_{−r,r} 内
        SpecMismatchError, StepMismatchError: f、g 不在同一网格
    """
    weight = make_weight(r)
    if not in_strip(z, StripRegion(weight.r)):
        raise OutsideStripError(f"z={z} 不在带形区域 |Re z| ≤ {r} 内")
    alpha = strip_character(f, z, base)
    lhs = abs(gelfand_transform(f, alpha) - gelfand_transform(g, alpha))
    rhs = weighted_norm(linear_combination(f, g, 1.0, -1.0), weight)
    return {"lhs": lhs, "rhs": rhs, "ok": lhs <= rhs + slack * (1 + rhs)}


def divergence_witness(z: complex, r: float, h: float = 0.01, shifts: Sequence[float] = (0, 2, 4, 6, 8),
                       width: float = 1.0) -> List[Dict]:
    """
    带外不可界的见证：把 1_{[−width, width)} 向 Re z 的增长方向平移，
    记录比值 |f̂_k(z)|/‖f_k‖_ω。|Re z| > r 时比值随平移量指数增长

    Raises:
        InvalidWeightError: r ≤ 0
    """
    weight = make_weight(r)
    if in_strip(z, StripRegion(weight.r)):
        logger.warning(f"z={z} 在带形区域 |Re z| ≤ {r} 内，比值不会发散")
    direction = 1.0 if complex(z).real >= 0 else -1.0
    bump = indicator(h, -width, width)
    alpha = strip_character(bump, z)
    records = []
    for shift in shifts:
        steps = round(direction * shift / h)
        f_k = translate(bump, make_element(bump.group, (steps * h,)))
        transform_abs = abs(gelfand_transform(f_k, alpha))
        norm = weighted_norm(f_k, weight)
        records.append({"shift": steps * h, "transform_abs": transform_abs, "norm": norm,
                        "ratio": transform_abs / norm})
    logger.debug(f"发散见证 z={z}, r={r}: 比值 {[rec['ratio'] for rec in records]}")
    return records


def strip_sweep(f: CcFunction, r: float, re_values: Sequence[float], im_values: Sequence[float],
                parallel: int = 1, base: Optional[GenChar] = None, slack: float = _STRIP_SLACK) -> List[Dict]:
    """
    在矩形 z 网格上逐点执行 strip_bound_check，按 (Re 外层, Im 内层) 的行优先顺序返回

    并行时按 Re 分块计算，结果顺序与串行一致。
    """
    make_weight(r)

    def row(re: float) -> List[Dict]:
        rows = []
        for im in im_values:
            z = complex(re, im)
            record = strip_bound_check(f, z, r, base, slack)
            rows.append({"re_z": float(re), "im_z": float(im), "abs_transform": record["transform_abs"],
                         "weighted_norm": record["norm"], "in_strip": record["in_strip"], "ok": record["ok"]})
        return rows

    if parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            blocks = list(pool.map(row, re_values))
    else:
        blocks = [row(re) for re in re_values]
    records = [record for block in blocks for record in block]
    violations = [rec for rec in records if rec["in_strip"] and not rec["ok"]]
    if violations:
        logger.warning(f"带内界不成立的点 {len(violations)} 个，首个 z={violations[0]['re_z']}+{violations[0]['im_z']}i")
    return records
