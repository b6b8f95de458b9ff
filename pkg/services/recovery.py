"""
特征恢复
由乘性泛函 φ 恢复广义特征 α(s) = φ(τ_s f)/φ(f)，验证与 f 的选择无关，
拟合参数化特征，判定 Gel'fand 球成员，以及离散群上的 α(s) = φ(δ_s)
"""
import cmath
import logging
import math
import zlib
from itertools import combinations_with_replacement
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from models.data_models import CcFunction, GenChar, GroupElement, GroupSpec, MultiplicativeFunctional, RecoveredCharacter
from services.characters import evaluate
from services.conv_algebra import DiracOnContinuousFactorError, convolve, delta, gelfand_transform, translate
from services.group_model import ensure_same_group, make_element


logger = logging.getLogger(__name__)


class RecoveryError(Exception):
    """特征恢复相关异常"""
    pass


class ZeroDenominatorError(RecoveryError):
    """|φ(f)| 不超过分母阈值"""
    pass


class BranchAmbiguityError(RecoveryError):
    """单步比值落在负实轴上，主值对数不确定"""
    pass


class MissingSamplesError(RecoveryError):
    """拟合所需的零点或单位步采样点缺失"""
    pass


class EmptyProbeSetError(RecoveryError, ValueError):
    """探针集合为空"""
    pass


class NotMultiplicativeError(RecoveryError):
    """泛函在探针对上不满足乘性"""
    pass


class FitMismatchError(RecoveryError):
    """拟合出的特征与恢复值不一致"""
    pass


def _sample_key(s: GroupElement, real_steps: Sequence[float]) -> Tuple:
    """采样点的网格键：实坐标换算为步长下标"""
    return (tuple(round(x / h) for x, h in zip(s.real_coords, real_steps)), s.int_coords, s.residues)


def _relative_defect(a: complex, b: complex, scale: float) -> float:
    return abs(a - b) / (1 + scale)


def homomorphism_residual(points: Sequence[GroupElement], values: Sequence[complex],
                          real_steps: Sequence[float]) -> float:
    """
    采样点上的同态缺陷 max |α(s+t) − α(s)α(t)|/(1+|α(s+t)|)，取遍 s+t 仍在采样集中的点对
    """
    keys = [_sample_key(s, real_steps) for s in points]
    lookup = dict(zip(keys, values))
    orders = points[0].group.cyclic_orders if points else ()
    residual = 0.0
    for (ks, ns, rs), vs in zip(keys, values):
        for (kt, nt, rt), vt in zip(keys, values):
            key = (tuple(a + b for a, b in zip(ks, kt)),
                   tuple(a + b for a, b in zip(ns, nt)),
                   tuple((a + b) % d for a, b, d in zip(rs, rt, orders)))
            if key in lookup:
                v = lookup[key]
                residual = max(residual, _relative_defect(v, vs * vt, abs(v)))
    return residual


def recover_character(phi: MultiplicativeFunctional, f: CcFunction, points: Sequence[GroupElement],
                      denom_tol: float = 1e-9) -> RecoveredCharacter:
    """
    α(s) = φ(τ_s f)/φ(f)

    Args:
        phi: 乘性泛函预言机
        f: 探针函数，要求 |φ(f)| > denom_tol
        points: 采样点（实坐标须与 f 的网格对齐）
        denom_tol: 分母阈值

    Returns:
        RecoveredCharacter: 采样点上的取值及同态缺陷

    Raises:
        ZeroDenominatorError: |φ(f)| ≤ denom_tol
        GridMisalignedError: 采样点未对齐网格
    """
    denominator = phi(f)
    if abs(denominator) <= denom_tol:
        raise ZeroDenominatorError(f"|φ(f)| = {abs(denominator)} 不超过阈值 {denom_tol}")
    values = []
    for s in points:
        value = phi(translate(f, s)) / denominator
        if value == 0:
            raise RecoveryError(f"φ(τ_s f) 在 s={s.coordinates()} 处为零，泛函不是乘性的")
        values.append(value)
    residual = homomorphism_residual(points, values, f.real_step)
    logger.debug(f"恢复 {len(points)} 个采样点（{phi.label}），同态缺陷 {residual:.3e}")
    return RecoveredCharacter(tuple(points), tuple(values), residual)


def min_translated_value(phi: MultiplicativeFunctional, f: CcFunction, points: Sequence[GroupElement]) -> float:
    """min_s |φ(τ_s f)|：φ(f) ≠ 0 时平移后仍不为零"""
    return min(abs(phi(translate(f, s))) for s in points)


def independence_check(phi: MultiplicativeFunctional, f: CcFunction, g: CcFunction,
                       points: Sequence[GroupElement], denom_tol: float = 1e-9) -> float:
    """
    max_s |φ(τ_s f)/φ(f) − φ(τ_s g)/φ(g)|

    Raises:
        ZeroDenominatorError: |φ(f)| 或 |φ(g)| ≤ denom_tol
    """
    phi_f, phi_g = phi(f), phi(g)
    for name, value in (("f", phi_f), ("g", phi_g)):
        if abs(value) <= denom_tol:
            raise ZeroDenominatorError(f"|φ({name})| = {abs(value)} 不超过阈值 {denom_tol}")
    if f is g:
        return 0.0
    return max((abs(phi(translate(f, s)) / phi_f - phi(translate(g, s)) / phi_g) for s in points), default=0.0)


def fit_parametric(rc: RecoveredCharacter, group: GroupSpec, real_steps: Sequence[float] = (),
                   fit_tol: float = 1e-6) -> GenChar:
    """
    从恢复值拟合参数 (z, w, c)

    实因子取单步比值的主值对数 z = log(α(h e_j)/α(0))/h，ℤ 因子取单位步的比值，
    循环因子取生成元处比值最近的单位根。

    Raises:
        MissingSamplesError: 缺少零点或某个单位步
        BranchAmbiguityError: 单步比值落在负实轴上
        FitMismatchError: 拟合结果在某个采样点上偏差超过 fit_tol
    """
    real_steps = tuple(real_steps)
    if len(real_steps) != group.real_rank:
        raise MissingSamplesError(f"需要 {group.real_rank} 个实轴步长，实际 {len(real_steps)}")
    lookup = {_sample_key(s, real_steps): v for s, v in zip(rc.sample_points, rc.values)}
    m, n = group.real_rank, group.int_rank

    def value_at(real=None, ints=None, residues=None) -> complex:
        s = make_element(group, real or (0.0,) * m, ints or (0,) * n, residues or (0,) * group.cyclic_rank)
        key = _sample_key(s, real_steps)
        if key not in lookup:
            raise MissingSamplesError(f"缺少采样点 {s.coordinates()}")
        return lookup[key]

    base = value_at()
    z = []
    for j, h in enumerate(real_steps):
        real = [0.0] * m
        real[j] = h
        ratio = value_at(real=tuple(real)) / base
        if ratio.imag == 0 and ratio.real < 0:
            raise BranchAmbiguityError(f"第 {j} 个实因子的单步比值 {ratio} 落在负实轴上")
        z.append(cmath.log(ratio) / h)
    w = []
    for j in range(n):
        ints = [0] * n
        ints[j] = 1
        w.append(value_at(ints=tuple(ints)) / base)
    residues = []
    for j, d in enumerate(group.cyclic_orders):
        rs = [0] * group.cyclic_rank
        rs[j] = 1
        angle = cmath.phase(value_at(residues=tuple(rs)) / base)
        residues.append(round(angle * d / (2 * math.pi)) % d)

    fitted = GenChar(group, tuple(z), tuple(w), tuple(residues))
    for s, v in zip(rc.sample_points, rc.values):
        predicted = evaluate(fitted, s)
        if abs(predicted - v) > fit_tol * max(1.0, abs(v)):
            raise FitMismatchError(f"拟合特征在 {s.coordinates()} 处偏差 {abs(predicted - v):.3e} 超过 {fit_tol}")
    return fitted


def gelfand_ball_member(beta: GenChar, alpha: GenChar, eps: float, probes: Sequence[CcFunction]) -> bool:
    """
    β ∈ B(α; ε; f_1..f_n) ⇔ 对每个探针 |f̂_i(β) − f̂_i(α)| < ε

    Raises:
        EmptyProbeSetError: 探针为空
        ValueError: ε ≤ 0
    """
    if not probes:
        raise EmptyProbeSetError("Gel'fand 球至少需要一个探针函数")
    if not eps > 0:
        raise ValueError(f"ε 必须为正数: {eps}")
    ensure_same_group(beta.group, alpha.group)
    return all(abs(gelfand_transform(f, beta) - gelfand_transform(f, alpha)) < eps for f in probes)


def point_evaluation_ball(alpha0: GenChar, g0: GroupElement, eps: float) -> Callable[[GenChar], bool]:
    """
    探针 δ_{g0} 的 Gel'fand 球（离散群）：β 属于该球 ⇔ |β(g0) − α0(g0)| < ε

    Raises:
        DiracOnContinuousFactorError: 群含实因子
    """
    probe = delta(alpha0.group, g0)
    return lambda beta: gelfand_ball_member(beta, alpha0, eps, [probe])


def discrete_recover(phi: MultiplicativeFunctional, points: Sequence[GroupElement]) -> RecoveredCharacter:
    """
    离散群上 α(s) = φ(δ_s)

    Raises:
        DiracOnContinuousFactorError: 群含实因子
    """
    if phi.group.real_rank > 0:
        raise DiracOnContinuousFactorError(f"群 {phi.group.describe()} 含实因子，不能使用 δ_s")
    values = []
    for s in points:
        value = phi(delta(phi.group, s))
        if value == 0:
            raise RecoveryError(f"φ(δ_s) 在 s={s.coordinates()} 处为零，泛函不是乘性的")
        values.append(value)
    return RecoveredCharacter(tuple(points), tuple(values), homomorphism_residual(points, values, ()))


def gelfand_functional(alpha: GenChar) -> MultiplicativeFunctional:
    """φ_α(f) = f̂(α)"""
    return MultiplicativeFunctional(alpha.group, lambda f: gelfand_transform(f, alpha), label="gelfand")


def noisy_functional(phi: MultiplicativeFunctional, noise: float, rng: np.random.Generator) -> MultiplicativeFunctional:
    """
    注入乘性复噪声的预言机 φ(f)·(1 + noise·ξ)

    噪声由创建时抽取的种子与 f 的取值表共同决定，同一输入得到同一输出。
    """
    if noise < 0:
        raise ValueError(f"噪声水平不能为负数: {noise}")
    seed = int(rng.integers(0, 2 ** 32))

    def evaluator(f: CcFunction) -> complex:
        digest = zlib.crc32(f.values.tobytes()) ^ zlib.crc32(repr(f.offsets).encode())
        local = np.random.default_rng([seed, digest])
        xi = complex(local.standard_normal(), local.standard_normal())
        return phi(f) * (1 + noise * xi)

    return MultiplicativeFunctional(phi.group, evaluator, label=f"noisy({phi.label}, {noise})")


def probe_multiplicativity(phi: MultiplicativeFunctional, probes: Sequence[CcFunction], tol: float = 1e-9) -> float:
    """
    探针对上的乘性缺陷 max |φ(f*g) − φ(f)φ(g)|/(1 + |φ(f)||φ(g)|)

    Raises:
        EmptyProbeSetError: 探针为空
        NotMultiplicativeError: 缺陷超过 tol
    """
    if not probes:
        raise EmptyProbeSetError("乘性检查至少需要一个探针函数")
    values = [phi(f) for f in probes]
    worst = 0.0
    for i, j in combinations_with_replacement(range(len(probes)), 2):
        product_value = values[i] * values[j]
        defect = _relative_defect(phi(convolve(probes[i], probes[j])), product_value, abs(product_value))
        worst = max(worst, defect)
    if worst > tol:
        raise NotMultiplicativeError(f"泛函 {phi.label} 的乘性缺陷 {worst:.3e} 超过容差 {tol}")
    return worst


def sample_grid(group: GroupSpec, real_steps: Sequence[float], span: int) -> List[GroupElement]:
    """
    以 0 为中心的采样网格：实轴取 k·h（|k| ≤ span），整数轴取 |k| ≤ span，循环轴取全部余数
    """
    if span < 0:
        raise ValueError(f"span 不能为负数: {span}")
    if len(real_steps) != group.real_rank:
        raise ValueError(f"需要 {group.real_rank} 个实轴步长，实际 {len(real_steps)}")
    ks = range(-span, span + 1)
    axes = [[k * h for k in ks] for h in real_steps]
    axes += [list(ks) for _ in range(group.int_rank)]
    axes += [list(range(d)) for d in group.cyclic_orders]
    m, n = group.real_rank, group.int_rank
    points = []
    for index in np.ndindex(*(len(a) for a in axes)):
        coords = [axes[a][i] for a, i in enumerate(index)]
        points.append(GroupElement(group, tuple(coords[:m]), tuple(coords[m:m + n]), tuple(coords[m + n:])))
    return points


def as_rows(rc: RecoveredCharacter) -> List[Dict]:
    """恢复结果展开为行（坐标 + 实部 + 虚部），供报告输出"""
    rows = []
    for s, v in zip(rc.sample_points, rc.values):
        row = {f"s{i + 1}": c for i, c in enumerate(s.coordinates())}
        row["re_alpha"] = v.real
        row["im_alpha"] = v.imag
        rows.append(row)
    return rows
