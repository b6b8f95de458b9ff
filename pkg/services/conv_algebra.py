"""
卷积代数
G 的网格模型上的紧支撑函数：卷积、平移、范数、Dirac 元素以及 Gel'fand 变换
f̂(α) = ∫ f(s)α(s) dλ(s)。实轴采用左点 Riemann 和（权 h），离散轴采用计数测度，
卷积与平移恒等式在离散层面精确成立
"""
import logging
import math
from typing import Dict, List, Sequence, Tuple

import numpy as np

from models.data_models import CcFunction, GenChar, GroupElement, GroupSpec
from services.characters import axis_factors
from services.group_model import SpecMismatchError, ensure_same_group, make_group, product_group


logger = logging.getLogger(__name__)

# 判定实平移是否与网格对齐的相对容差
_ALIGN_TOL = 1e-9
# 区间端点换算为网格下标时吸收浮点误差
_INDEX_SLACK = 1e-9


class ConvolutionAlgebraError(Exception):
    """卷积代数相关异常"""
    pass


class DiracOnContinuousFactorError(ConvolutionAlgebraError, ValueError):
    """在含实因子的群上请求 Dirac 元素"""
    pass


class StepMismatchError(ConvolutionAlgebraError, ValueError):
    """两个函数的实轴网格步长不一致"""
    pass


class GridMisalignedError(ConvolutionAlgebraError, ValueError):
    """实平移量不是网格步长的整数倍"""
    pass


def _ensure_compatible(f: CcFunction, g: CcFunction) -> GroupSpec:
    group = ensure_same_group(f.group, g.group)
    if f.real_step != g.real_step:
        raise StepMismatchError(f"实轴步长不一致: {f.real_step} 与 {g.real_step}")
    return group


def _rebuild(f: CcFunction, offsets: Sequence[int], values: np.ndarray) -> CcFunction:
    """按 f 的群与步长、给定的非循环轴偏移构造新函数"""
    m = f.group.real_rank
    return CcFunction(f.group, f.real_step, tuple(offsets[:m]), tuple(offsets[m:]), values)


def from_values(group: GroupSpec, values, real_step: Sequence[float] = (),
                real_offset: Sequence[int] = (), int_offset: Sequence[int] = ()) -> CcFunction:
    """
    由取值表构造函数

    Raises:
        SpecMismatchError: 取值表维数或偏移个数与群不一致
    """
    real_offset = tuple(real_offset) or (0,) * group.real_rank
    int_offset = tuple(int_offset) or (0,) * group.int_rank
    try:
        return CcFunction(group, tuple(real_step), real_offset, int_offset, np.asarray(values, dtype=complex))
    except ValueError as e:
        raise SpecMismatchError(str(e)) from e


def delta(group: GroupSpec, t: GroupElement) -> CcFunction:
    """
    t 处的 Dirac 元素 δ_t（仅限离散群）

    Raises:
        DiracOnContinuousFactorError: 群含实因子
        SpecMismatchError: t 不属于该群
    """
    if group.real_rank > 0:
        raise DiracOnContinuousFactorError(f"δ_t 不属于 C_c({group.describe()})：群含实因子")
    ensure_same_group(group, t.group)
    values = np.zeros((1,) * group.int_rank + group.cyclic_orders, dtype=complex)
    values[(0,) * group.int_rank + t.residues] = 1.0
    return CcFunction(group, (), (), t.int_coords, values)


def point_masses(group: GroupSpec, masses: Dict[GroupElement, complex]) -> CcFunction:
    """
    有限个点质量之和 Σ c_t δ_t（仅限离散群）

    Raises:
        DiracOnContinuousFactorError: 群含实因子
        ValueError: masses 为空
    """
    if group.real_rank > 0:
        raise DiracOnContinuousFactorError(f"点质量不属于 C_c({group.describe()})：群含实因子")
    if not masses:
        raise ValueError("至少需要一个点质量")
    for t in masses:
        ensure_same_group(group, t.group)
    lows = [min(t.int_coords[i] for t in masses) for i in range(group.int_rank)]
    highs = [max(t.int_coords[i] for t in masses) for i in range(group.int_rank)]
    values = np.zeros(tuple(hi - lo + 1 for lo, hi in zip(lows, highs)) + group.cyclic_orders, dtype=complex)
    for t, c in masses.items():
        index = tuple(k - lo for k, lo in zip(t.int_coords, lows)) + t.residues
        values[index] += c
    return CcFunction(group, (), (), tuple(lows), values)


def indicator(h: float, a: float, b: float) -> CcFunction:
    """
    ℝ 上 1_{[a,b)} 的左点采样：取满足 a ≤ jh < b 的全部网格点 j

    Raises:
        ValueError: h ≤ 0 或区间内没有网格点
    """
    if not h > 0:
        raise ValueError(f"网格步长必须为正数: {h}")
    start = math.ceil(a / h - _INDEX_SLACK)
    stop = math.ceil(b / h - _INDEX_SLACK)
    if stop <= start:
        raise ValueError(f"区间 [{a}, {b}) 在步长 {h} 下不含网格点")
    return CcFunction(make_group(1, 0), (h,), (start,), (), np.ones(stop - start, dtype=complex))


def tent(h: float, half_width: float) -> CcFunction:
    """ℝ 上的连续帐篷函数 max(0, 1 − |t|/half_width)"""
    if not h > 0 or not half_width > 0:
        raise ValueError(f"步长与半宽必须为正数: h={h}, half_width={half_width}")
    k = math.floor(half_width / h + _INDEX_SLACK)
    ts = np.arange(-k, k + 1) * h
    values = np.clip(1 - np.abs(ts) / half_width, 0.0, None)
    return CcFunction(make_group(1, 0), (h,), (-k,), (), values.astype(complex))


def element_at(f: CcFunction, index: Sequence[int]) -> GroupElement:
    """取值表下标对应的群元素"""
    m, n = f.group.real_rank, f.group.int_rank
    index = tuple(int(i) for i in index)
    real = tuple((o + i) * h for o, i, h in zip(f.real_offset, index[:m], f.real_step))
    ints = tuple(o + i for o, i in zip(f.int_offset, index[m:m + n]))
    return GroupElement(f.group, real, ints, index[m + n:])


def grid_points(f: CcFunction) -> List[GroupElement]:
    """取值表全部网格点对应的群元素（行优先）"""
    return [element_at(f, index) for index in np.ndindex(f.values.shape)]


def convolve(f: CcFunction, g: CcFunction) -> CcFunction:
    """
    直接求和的卷积 (f*g)(t) = Σ_s f(s)g(t−s)·cellweight

    非循环轴上支撑跨度相加，循环轴按模 d 循环移位。

    Raises:
        SpecMismatchError: 群不一致
        StepMismatchError: 实轴步长不一致
    """
    _ensure_compatible(f, g)
    linear = f.linear_rank
    g_shape = g.values.shape[:linear]
    out_shape = tuple(a + b - 1 for a, b in zip(f.values.shape[:linear], g_shape)) + f.group.cyclic_orders
    out = np.zeros(out_shape, dtype=complex)

    for index in zip(*np.nonzero(f.values)):
        shifted = g.values
        for k, r in enumerate(index[linear:]):
            if r:
                shifted = np.roll(shifted, int(r), axis=linear + k)
        window = tuple(slice(int(i), int(i) + size) for i, size in zip(index[:linear], g_shape))
        out[window] += f.values[index] * shifted

    out *= f.cell_weight
    offsets = tuple(a + b for a, b in zip(f.offsets, g.offsets))
    return _rebuild(f, offsets, out)


def translate(f: CcFunction, t: GroupElement) -> CcFunction:
    """
    平移 (τ_t f)(s) = f(s − t)

    Raises:
        GridMisalignedError: 实平移量不是步长的整数倍
        SpecMismatchError: t 不属于 f 的群
    """
    ensure_same_group(f.group, t.group)
    real_shift = []
    for x, h in zip(t.real_coords, f.real_step):
        k = round(x / h)
        if abs(x / h - k) > _ALIGN_TOL * max(1.0, abs(x / h)):
            raise GridMisalignedError(f"平移量 {x} 不是网格步长 {h} 的整数倍")
        real_shift.append(k)

    values = f.values
    for k, r in enumerate(t.residues):
        if r:
            values = np.roll(values, r, axis=f.linear_rank + k)
    offsets = tuple(o + s for o, s in zip(f.offsets, tuple(real_shift) + t.int_coords))
    return _rebuild(f, offsets, values)


def gelfand_transform(f: CcFunction, alpha: GenChar) -> complex:
    """
    Gel'fand 变换 f̂(α) = Σ_s f(s)·α(s)·cellweight

    α 在网格上是各轴因子的张量积，按轴逐次缩并。

    Raises:
        SpecMismatchError: 函数与特征不属于同一个群
    """
    ensure_same_group(f.group, alpha.group)
    axes = [f.axis_coordinates(a) for a in range(f.values.ndim)]
    result = f.values
    for factor in axis_factors(alpha, axes):
        result = np.tensordot(result, factor, axes=([0], [0]))
    return complex(result) * f.cell_weight


def l1_norm(f: CcFunction) -> float:
    """‖f‖₁ = Σ|f(s)|·cellweight"""
    return float(np.sum(np.abs(f.values))) * f.cell_weight


def _embed(f: CcFunction, offsets: Sequence[int], shape: Sequence[int]) -> np.ndarray:
    """把 f 的取值表放进以 offsets 为原点、形状为 shape 的更大网格"""
    out = np.zeros(tuple(shape) + f.group.cyclic_orders, dtype=complex)
    window = tuple(slice(o - base, o - base + size)
                   for o, base, size in zip(f.offsets, offsets, f.values.shape[:f.linear_rank]))
    out[window] = f.values
    return out


def linear_combination(f: CcFunction, g: CcFunction, a: complex = 1.0, b: complex = 1.0) -> CcFunction:
    """
    a·f + b·g，两者的支撑先对齐到公共网格

    Raises:
        SpecMismatchError: 群不一致
        StepMismatchError: 实轴步长不一致
    """
    _ensure_compatible(f, g)
    lows = [min(p, q) for p, q in zip(f.offsets, g.offsets)]
    highs = [max(p + e, q + k) for p, e, q, k in zip(f.offsets, f.extents, g.offsets, g.extents)]
    shape = [hi - lo + 1 for lo, hi in zip(lows, highs)]
    values = a * _embed(f, lows, shape) + b * _embed(g, lows, shape)
    return _rebuild(f, lows, values)


def tensor_product(f: CcFunction, g: CcFunction) -> CcFunction:
    """
    f × g ∈ C_c(G1 ⊕ G2)，满足 (f × g)^(α1 ⊕ α2) = f̂(α1)·ĝ(α2)
    """
    group = product_group(f.group, g.group)
    fr, fi = f.group.real_rank, f.group.int_rank
    gr, gi = g.group.real_rank, g.group.int_rank
    nf = f.values.ndim
    outer = np.multiply.outer(f.values, g.values)
    order = (list(range(fr)) + [nf + j for j in range(gr)]
             + list(range(fr, fr + fi)) + [nf + gr + j for j in range(gi)]
             + list(range(fr + fi, nf)) + [nf + gr + gi + j for j in range(g.values.ndim - gr - gi)])
    return CcFunction(group, f.real_step + g.real_step, f.real_offset + g.real_offset,
                      f.int_offset + g.int_offset, np.transpose(outer, order))


def translation_modulus(f: CcFunction, axis: int = 0, steps: int = 1) -> float:
    """
    平移连续性模 max_t |f(t − steps·h) − f(t)|（沿单个非循环轴）

    Raises:
        ValueError: axis 不是非循环轴
    """
    if not 0 <= axis < f.linear_rank:
        raise ValueError(f"axis 必须是非循环轴下标: {axis}")
    steps = abs(int(steps))
    pad = [(0, 0)] * f.values.ndim
    pad[axis] = (steps, 0)
    shifted = np.pad(f.values, pad)
    pad[axis] = (0, steps)
    original = np.pad(f.values, pad)
    return float(np.max(np.abs(shifted - original)))


def translation_l1_distance(f: CcFunction, s: GroupElement, t: GroupElement) -> float:
    """
    ‖τ_s f − τ_t f‖₁

    对任意酉特征 α 有 |[τ_s f]^(α) − [τ_t f]^(α)| ≤ ‖τ_s f − τ_t f‖₁。
    """
    return l1_norm(linear_combination(translate(f, s), translate(f, t), 1.0, -1.0))


def support_bounds(f: CcFunction) -> List[Tuple[float, float]]:
    """每个非循环轴上支撑网格的坐标范围"""
    bounds = []
    for axis in range(f.linear_rank):
        coords = f.axis_coordinates(axis)
        bounds.append((float(coords[0]), float(coords[-1])))
    return bounds
