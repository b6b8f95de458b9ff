"""
广义特征
G → ℂ∖{0} 的参数化同态：求值、H(G) 群运算、酉性判定、有限群特征枚举、
T_m 邻域成员判定与增长界、等度连续窗口，以及 H(ℝ) ≅ ℂ 的窗口界
"""
import cmath
import logging
import math
from itertools import product
from typing import List, Optional, Sequence, Tuple

import numpy as np

from models.data_models import (
    ContainmentReport, GeneratingBox, GenChar, GroupElement, GroupSpec, TmSpec, WindowBox,
)
from services.group_model import (
    SpecMismatchError, box_axis_samples, element_order, ensure_same_group, make_group,
    product_group, validate_orders, word_length,
)
from services.lemma_escape import certify


logger = logging.getLogger(__name__)


class CharacterError(Exception):
    """广义特征相关异常"""
    pass


class InvalidEpsilonError(CharacterError, ValueError):
    """ε 不在允许范围内"""
    pass


class InvalidDeltaError(CharacterError, ValueError):
    """δ 不在允许范围内"""
    pass


class NotInTmError(CharacterError):
    """特征不属于 T_m"""
    pass


class InvalidWindowError(CharacterError, ValueError):
    """窗口参数（n、采样点数）非法"""
    pass


def root_of_unity(k: int, d: int) -> complex:
    """exp(2πi·k/d)，四分之一圆周的倍数给出精确值"""
    k %= d
    if (4 * k) % d == 0:
        return (complex(1, 0), complex(0, 1), complex(-1, 0), complex(0, -1))[(4 * k) // d]
    return cmath.exp(2j * math.pi * k / d)


def identity_character(group: GroupSpec) -> GenChar:
    return GenChar(group, (0j,) * group.real_rank, (1 + 0j,) * group.int_rank, (0,) * group.cyclic_rank)


def evaluate(alpha: GenChar, t: GroupElement) -> complex:
    """
    α(t) = exp(Σ z_j t_j) · ∏ w_j^{k_j} · ∏ exp(2πi c_i r_i / d_i)

    Raises:
        SpecMismatchError: 特征与元素不属于同一个群
    """
    ensure_same_group(alpha.group, t.group)
    value = cmath.exp(sum((z * x for z, x in zip(alpha.z, t.real_coords)), 0j))
    for w, k in zip(alpha.w, t.int_coords):
        value *= w ** k
    for c, r, d in zip(alpha.dual_residues, t.residues, alpha.group.cyclic_orders):
        value *= root_of_unity(c * r, d)
    return value


def axis_factors(alpha: GenChar, axes: Sequence[np.ndarray]) -> List[np.ndarray]:
    """
    每个轴上特征因子的取值

    α 在网格上分解为各轴因子的张量积；axes 按 (实, 整数, 循环) 顺序给出坐标。
    """
    group = alpha.group
    m, n = group.real_rank, group.int_rank
    factors = []
    for j, coords in enumerate(axes):
        if j < m:
            factors.append(np.exp(alpha.z[j] * np.asarray(coords, dtype=float)))
        elif j < m + n:
            ks = np.asarray(coords, dtype=np.int64)
            factors.append(np.power(np.complex128(alpha.w[j - m]), ks))
        else:
            i = j - m - n
            d = group.cyclic_orders[i]
            c = alpha.dual_residues[i]
            factors.append(np.array([root_of_unity(c * int(r), d) for r in coords], dtype=complex))
    return factors


def outer_product(factors: Sequence[np.ndarray]) -> np.ndarray:
    """按广播把各轴因子组合成张量"""
    result = np.ones((), dtype=complex)
    ndim = len(factors)
    for axis, factor in enumerate(factors):
        shape = [1] * ndim
        shape[axis] = len(factor)
        result = result * np.asarray(factor).reshape(shape)
    return result


def combine(alpha: GenChar, beta: GenChar) -> GenChar:
    """H(G) 的群运算 (α + β)(s) = α(s)β(s)"""
    group = ensure_same_group(alpha.group, beta.group)
    return GenChar(
        group,
        tuple(a + b for a, b in zip(alpha.z, beta.z)),
        tuple(a * b for a, b in zip(alpha.w, beta.w)),
        tuple(a + b for a, b in zip(alpha.dual_residues, beta.dual_residues)),
    )


def invert(alpha: GenChar) -> GenChar:
    """H(G) 中的逆元：−z, 1/w, −c mod d"""
    return GenChar(
        alpha.group,
        tuple(-z for z in alpha.z),
        tuple(1 / w for w in alpha.w),
        tuple(-c for c in alpha.dual_residues),
    )


def direct_sum(first: GenChar, second: GenChar) -> GenChar:
    """H(G1 ⊕ G2) ≅ H(G1) ⊕ H(G2) 的参数拼接"""
    return GenChar(product_group(first.group, second.group),
                   first.z + second.z, first.w + second.w,
                   first.dual_residues + second.dual_residues)


def is_unitary(alpha: GenChar, tol: float = 0.0) -> bool:
    """α 是否（数值上）属于对偶群：max|Re z_j| ≤ tol 且 max||w_j| − 1| ≤ tol"""
    if tol < 0:
        raise ValueError(f"容差不能为负数: {tol}")
    re_defect = max((abs(z.real) for z in alpha.z), default=0.0)
    mod_defect = max((abs(abs(w) - 1) for w in alpha.w), default=0.0)
    return re_defect <= tol and mod_defect <= tol


def enumerate_characters(orders: Sequence[int]) -> List[GenChar]:
    """
    枚举有限群 ∏ℤ_{d_i} 的全部特征（按对偶余数字典序）

    有限群上每个广义特征都是酉的，特征与对偶余数元组一一对应。

    Raises:
        InvalidOrderError: 某个阶数小于 2
    """
    orders = validate_orders(orders)
    group = make_group(0, 0, orders)
    characters = [GenChar(group, (), (), residues)
                  for residues in product(*(range(d) for d in orders))]
    logger.debug(f"枚举 {group.describe()} 的特征 {len(characters)} 个")
    return characters


def character_order_check(alpha: GenChar, s: GroupElement) -> float:
    """扭元酉性：|α(s)^{ord(s)} − 1|"""
    q = element_order(s)
    return abs(evaluate(alpha, s) ** q - 1)


def tm_sup(alpha: GenChar, spec: TmSpec) -> float:
    """Ū 上 |α(s) − 1| 的采样上确界（实轴网格含端点，离散轴精确）"""
    axes = box_axis_samples(alpha.group, spec.box, spec.sample_density)
    values = outer_product(axis_factors(alpha, axes))
    return float(np.max(np.abs(values - 1)))


def tm_membership(alpha: GenChar, spec: TmSpec, tol: float = 0.0) -> bool:
    """
    α ∈ T_m = N(Ū, V_m)：采样上确界 + tol < 1/m（V_m 为开集，严格不等式）

    Raises:
        SpecMismatchError: 生成盒与群不一致
    """
    return tm_sup(alpha, spec) + tol < spec.radius


def growth_bounds(alpha: GenChar, t: GroupElement, spec: TmSpec) -> Tuple[float, float, float]:
    """
    T_m 中特征的增长界 (1−1/m)^p ≤ |α(t)| ≤ (1+1/m)^p，p 为 t 的字长

    Returns:
        (lo, hi, |α(t)|)

    Raises:
        NotInTmError: α 不属于 T_m
    """
    if not tm_membership(alpha, spec):
        raise NotInTmError(f"特征不属于 T_{spec.m}")
    p = word_length(t, spec.box)
    lo = (1 - spec.radius) ** p
    hi = (1 + spec.radius) ** p
    return lo, hi, abs(evaluate(alpha, t))


def sample_tm_characters(group: GroupSpec, spec: TmSpec, count: int,
                         rng: np.random.Generator, max_attempts: Optional[int] = None) -> List[GenChar]:
    """
    T_m 的拒绝采样

    实因子在矩形 |Re z| ≤ log(1+1/m)/u、|Im z| ≤ 2·arcsin(1/(2m))/u 内均匀取 z，
    ℤ 因子在以 1 为中心、半径 1/m 的圆盘内取 w，K 部分取平凡特征，再用 tm_membership 拒绝。
    """
    if len(spec.box.real_halfwidths) != group.real_rank:
        raise SpecMismatchError("生成盒与群的实秩不一致")
    max_attempts = max_attempts or 1000 * max(count, 1)
    re_limits = [math.log(1 + spec.radius) / u for u in spec.box.real_halfwidths]
    im_limits = [2 * math.asin(spec.radius / 2) / u for u in spec.box.real_halfwidths]
    accepted = []
    attempts = 0
    while len(accepted) < count:
        attempts += 1
        if attempts > max_attempts:
            raise CharacterError(f"T_{spec.m} 拒绝采样在 {max_attempts} 次尝试内未得到 {count} 个特征")
        z = tuple(complex(rng.uniform(-a, a), rng.uniform(-b, b)) for a, b in zip(re_limits, im_limits))
        w = tuple(1 + spec.radius * rng.uniform(0, 1) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
                  for _ in range(group.int_rank))
        candidate = GenChar(group, z, w, (0,) * group.cyclic_rank)
        if tm_membership(candidate, spec):
            accepted.append(candidate)
    logger.debug(f"T_{spec.m} 拒绝采样: 接受 {count} 个，尝试 {attempts} 次")
    return accepted


def equicontinuity_window(spec: TmSpec, eps: float, n_angles: int = 360, n_radii: int = 50) -> GeneratingBox:
    """
    等度连续窗口 W：对 T_m 中的全部特征与 s ∈ W 有 |α(s) − 1| < ε

    ε ≥ 1/m 时直接取 W = U；否则 W = U/N，N 取自经网格验证的逃逸证书，
    且 N > 1 时整数因子只保留 0 步（K 保持整体，T_m 中的特征在 K 上恒为 1）。

    Raises:
        InvalidEpsilonError: ε ≤ 0
    """
    if not eps > 0:
        raise InvalidEpsilonError(f"ε 必须为正数: {eps}")
    if eps >= spec.radius:
        return spec.box
    cert, _ = certify(spec.m, eps, n_angles, n_radii)
    window = spec.box.scaled(1.0 / cert.N)
    if cert.N > 1:
        window = GeneratingBox(window.real_halfwidths, int_steps=False)
    logger.debug(f"等度连续窗口: m={spec.m}, ε={eps}, N={cert.N}, 半宽={window.real_halfwidths}")
    return window


def _check_window_args(n: int, eps: float, samples: Optional[int] = None) -> None:
    if not (0 < eps < 1):
        raise InvalidEpsilonError(f"ε 必须在 (0, 1) 内: {eps}")
    if n < 1:
        raise InvalidWindowError(f"n 必须 ≥ 1: {n}")
    if samples is not None and samples < 3:
        raise InvalidWindowError(f"采样点数必须 ≥ 3: {samples}")


def _window_defects(zs: np.ndarray, n: int, samples: int) -> np.ndarray:
    """每个 z 在 x ∈ [−n, n] 网格上的 max|e^{zx} − 1|"""
    xs = np.linspace(-n, n, samples)
    return np.max(np.abs(np.exp(np.outer(zs, xs)) - 1), axis=1)


def hr_window_member(zc: complex, n: int, eps: float, samples: int = 2001) -> bool:
    """
    z ∈ W_{n,ε} = {z : |e^{zx} − 1| < ε, x ∈ [−n, n]}（x 取 samples 个均匀点）

    Raises:
        InvalidEpsilonError: ε ∉ (0, 1)
    """
    _check_window_args(n, eps, samples)
    return bool(_window_defects(np.array([complex(zc)]), n, samples)[0] < eps)


def hr_window_boxes(n: int, eps: float, delta: float) -> Tuple[WindowBox, WindowBox]:
    """
    W_{n,ε} 的外部盒与内部盒

    外部盒的实半宽为 log(1+ε)/n；虚部界依赖 |Re z|（见 outer_im_bound），
    盒中只携带与 Re z 无关的包络 π/n。内部盒为 (log(1+δ/2)/n, δ/2)。

    Raises:
        InvalidEpsilonError: ε ∉ (0, 1)
        InvalidDeltaError: δ ∉ (0, 1)
    """
    _check_window_args(n, eps)
    if not (0 < delta < 1):
        raise InvalidDeltaError(f"δ 必须在 (0, 1) 内: {delta}")
    outer = WindowBox(math.log(1 + eps) / n, math.pi / n)
    inner = WindowBox(math.log(1 + delta / 2) / n, delta / 2)
    return outer, inner


def outer_im_bound(abs_re: float, n: int, eps: float) -> float:
    """
    外部区域的虚部界 arccos(u_{n,ε})/n

    u_{n,ε} = (e^{−2|α|n} + 1 − ε²)/(2e^{|α|n})，按原公式计算并截断到 [−1, 1]。
    """
    _check_window_args(n, eps)
    a = abs(abs_re)
    u = (math.exp(-2 * a * n) + 1 - eps * eps) / (2 * math.exp(a * n))
    return math.acos(max(-1.0, min(1.0, u))) / n


def check_outer_containment(n: int, eps: float, count: int, rng: np.random.Generator,
                            samples: int = 2001, batch: int = 512,
                            max_attempts: Optional[int] = None) -> ContainmentReport:
    """
    拒绝采样 W_{n,ε} 的成员，检查外部界

    候选点取自 |Re z| < 2·log(1+ε)/n、|Im z| < arcsin(ε)/n 的矩形：成员的 e^{zx} 留在以 1 为中心、
    半径 ε 的圆盘内，幅角从 0 连续变化，故 n·|Im z| < arcsin ε。
    |Re z| ≥ log(1+ε)/n 计为失败；|Im z| ≥ outer_im_bound 计为公式冲突并记录日志，
    两者都以采样判定为准。

    Raises:
        CharacterError: max_attempts 个候选点内没有得到 count 个成员
    """
    _check_window_args(n, eps, samples)
    max_attempts = max_attempts or 1000 * max(count, 1)
    re_bound = math.log(1 + eps) / n
    im_bound = math.asin(eps) / n
    report = ContainmentReport(n=n, eps=eps, samples=0)
    attempts = 0
    while report.samples < count:
        if attempts >= max_attempts:
            raise CharacterError(f"W_{{{n},{eps}}} 拒绝采样在 {max_attempts} 次尝试内"
                                 f"只得到 {report.samples}/{count} 个成员")
        attempts += batch
        zs = rng.uniform(-2 * re_bound, 2 * re_bound, batch) + 1j * rng.uniform(-im_bound, im_bound, batch)
        members = zs[_window_defects(zs, n, samples) < eps]
        for zc in members[:count - report.samples]:
            report.samples += 1
            if abs(zc.real) >= re_bound:
                report.failures += 1
                report.witness = complex(zc)
                report.worst_value = max(report.worst_value, abs(zc.real))
            if abs(zc.imag) >= outer_im_bound(zc.real, n, eps):
                report.formula_conflicts += 1
                report.notes.append(f"z={complex(zc)} 属于 W_{{{n},{eps}}} 但超出印刷的虚部界")
    if report.failures:
        logger.warning(f"外部包含失败 {report.failures}/{report.samples}: n={n}, ε={eps}")
    if report.formula_conflicts:
        logger.warning(f"u_(n,ε) 公式与采样判定冲突 {report.formula_conflicts} 次: n={n}, ε={eps}")
    return report


def check_inner_containment(n: int, eps: float, delta: float, count: int,
                            rng: np.random.Generator, samples: int = 2001) -> ContainmentReport:
    """
    在内部盒中均匀采样，检查是否落在 W_{n,ε} 内；失败记入报告和日志而不是抛出异常
    """
    _, inner = hr_window_boxes(n, eps, delta)
    _check_window_args(n, eps, samples)
    zs = (rng.uniform(-inner.re_halfwidth, inner.re_halfwidth, count)
          + 1j * rng.uniform(-inner.im_halfwidth, inner.im_halfwidth, count))
    defects = _window_defects(zs, n, samples)
    failed = defects >= eps
    report = ContainmentReport(n=n, eps=eps, samples=count, failures=int(failed.sum()))
    if report.failures:
        worst = int(np.argmax(defects))
        report.worst_value = float(defects[worst])
        report.witness = complex(zs[worst])
        report.notes.append(f"内部盒 δ={delta} 的 {report.failures} 个样本不在 W_{{{n},{eps}}} 内")
        logger.warning(f"内部包含失败 {report.failures}/{count}: n={n}, ε={eps}, δ={delta}, "
                       f"最坏点 {report.witness}（{report.worst_value:.4f}）")
    return report
