"""
逃逸引理
对 ε ≤ |z−1| ≤ 1/m 的环域构造统一的逃逸上界 N（带证书），
计算单点逃逸指标，并以暴力网格扫描作为验收依据
"""
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Optional, Tuple

import numpy as np

from models.data_models import LemmaCertificate, VerificationReport


logger = logging.getLogger(__name__)

# 构造 n₁、n₂、n₃ 时的搜索上限
_MAX_SEARCH = 10_000_000


class LemmaEscapeError(Exception):
    """逃逸引理相关异常"""
    pass


class InvalidMError(LemmaEscapeError, ValueError):
    """m 不是 ≥ 2 的整数"""
    pass


class EpsilonOutOfRangeError(LemmaEscapeError, ValueError):
    """eps 不在 (0, 1/m) 内"""
    pass


class NoEscapeWithinCapError(LemmaEscapeError):
    """网格点在 k_cap 步内没有逃逸"""

    def __init__(self, message: str, witness: complex):
        super().__init__(message)
        self.witness = witness


class CertificateError(LemmaEscapeError):
    """证书内部不变量不成立"""
    pass


def _check_m(m) -> int:
    if isinstance(m, bool) or int(m) != m or m < 2:
        raise InvalidMError(f"m must exceed 1 (m 必须是 ≥ 2 的整数): {m}")
    return int(m)


def escape_index(z: complex, m: int, k_max: int) -> Optional[int]:
    """
    最小的 k ∈ [1, k_max] 使 |z^k − 1| > 1/m

    Args:
        z: 复数
        m: 整数 m ≥ 2
        k_max: 扫描上限

    Returns:
        最小逃逸指标；k_max 内没有逃逸时返回 None

    Raises:
        InvalidMError: m 非法
    """
    m = _check_m(m)
    if k_max < 1:
        raise ValueError(f"k_max 必须 ≥ 1: {k_max}")
    bound = 1.0 / m
    power = complex(z)
    for k in range(1, k_max + 1):
        if abs(power - 1) > bound:
            return k
        power = power * z
    return None


def escape_indices(points: np.ndarray, m: int, k_max: int) -> np.ndarray:
    """
    escape_index 的向量化版本

    Returns:
        与 points 同形的整数数组，未逃逸的位置为 0
    """
    m = _check_m(m)
    bound = 1.0 / m
    points = np.asarray(points, dtype=complex)
    indices = np.zeros(points.shape, dtype=np.int64)
    power = points.copy()
    for k in range(1, k_max + 1):
        newly = (indices == 0) & (np.abs(power - 1) > bound)
        indices[newly] = k
        if not (indices == 0).any():
            break
        power = power * points
    return indices


def _ray_circle_radii(delta: float, eps: float) -> Tuple[float, float]:
    """射线 L_δ 与圆 Γ(1, ε) 的两个交点半径"""
    root = math.sqrt(eps * eps - math.sin(delta) ** 2)
    return math.cos(delta) - root, math.cos(delta) + root


def _least(predicate, start: int = 1) -> int:
    for n in range(start, _MAX_SEARCH):
        if predicate(n):
            return n
    raise CertificateError("构造证书时搜索超出上限")


def validate_certificate(cert: LemmaCertificate) -> None:
    """
    数值复核证书的内部不变量

    Raises:
        CertificateError: 某个不变量不成立
    """
    bound = 1.0 / cert.m
    checks = {
        "0 < eps < 1/m": 0 < cert.eps < bound,
        "0 < delta < pi/2": 0 < cert.delta < math.pi / 2,
        "sin(delta) < eps": math.sin(cert.delta) < cert.eps,
        "r0 < 1 < r1": 0 < cert.r0 < 1 < cert.r1,
        "r0^n2 < 1 - 1/m": cert.r0 ** cert.n2 < 1 - bound,
        "r1^n3 >= 1 + 1/m": cert.r1 ** cert.n3 >= 1 + bound,
        "sin(n1*delta) > 1/m": math.sin(cert.n1 * cert.delta) > bound,
        "n1*delta <= pi/2": cert.n1 * cert.delta <= math.pi / 2,
        "N >= max(n1, n2, n3)": cert.N >= max(cert.n1, cert.n2, cert.n3),
    }
    failed = [name for name, ok in checks.items() if not ok]
    if failed:
        raise CertificateError(f"证书不变量不成立: {', '.join(failed)}")


def compute_N(m: int, eps: float) -> LemmaCertificate:
    """
    按引理证明的三种情形构造 N

    δ = min(arcsin(eps)/2, π/6)；r₀、r₁ 为射线与圆 Γ(1, eps) 的交点半径；
    n₁ 为满足 sin(nδ) > 1/m 且 nδ ≤ π/2 的最小 n；n₂ 为满足 r₀ⁿ < 1−1/m 的最小 n；
    n₃ 为满足 r₁ⁿ ≥ 1+1/m 的最小 n；N = max(n₁, n₂, n₃)。

    Raises:
        InvalidMError: m 非法
        EpsilonOutOfRangeError: eps ≤ 0 或 eps ≥ 1/m
    """
    m = _check_m(m)
    bound = 1.0 / m
    if not (0 < eps < bound):
        raise EpsilonOutOfRangeError(f"eps must be < 1/m (需要 0 < eps < 1/m): eps={eps}, m={m}")

    delta = min(math.asin(eps) / 2, math.pi / 6)
    r0, r1 = _ray_circle_radii(delta, eps)
    n1 = _least(lambda n: math.sin(n * delta) > bound)
    if n1 * delta > math.pi / 2:
        raise CertificateError(f"n1·δ 超出 π/2: n1={n1}, δ={delta}")
    n2 = _least(lambda n: r0 ** n < 1 - bound)
    n3 = _least(lambda n: r1 ** n >= 1 + bound)

    cert = LemmaCertificate(m=m, eps=float(eps), delta=delta, r0=r0, r1=r1,
                            n1=n1, n2=n2, n3=n3, N=max(n1, n2, n3))
    validate_certificate(cert)
    logger.debug(f"证书构造完成: {cert.to_dict()}")
    return cert


def _annulus_grid(m: int, eps: float, n_angles: int, n_radii: int) -> np.ndarray:
    radii = np.linspace(eps, 1.0 / m, n_radii)
    angles = 2 * np.pi * np.arange(n_angles) / n_angles
    return 1 + radii[None, :] * np.exp(1j * angles)[:, None]


def brute_force_max_escape(m: int, eps: float, n_angles: int, n_radii: int, k_cap: int,
                           parallel: int = 1) -> Tuple[int, complex]:
    """
    在环域网格 z = 1 + ρ·e^{iθ} 上扫描逃逸指标的最大值

    Args:
        m: 整数 m ≥ 2
        eps: 环域内半径
        n_angles: 角度点数（θ ∈ [0, 2π)）
        n_radii: 半径点数（ρ ∈ [eps, 1/m]，含端点）
        k_cap: 每个点的扫描上限
        parallel: 按角度带并行的线程数

    Returns:
        (max_k, witness)：最大逃逸指标及取得最大值的网格点

    Raises:
        NoEscapeWithinCapError: 某个网格点在 k_cap 步内没有逃逸
    """
    m = _check_m(m)
    if n_angles < 2 or n_radii < 2:
        raise ValueError(f"网格维数必须 ≥ 2: {n_angles}x{n_radii}")
    if k_cap < 1:
        raise ValueError(f"k_cap 必须 ≥ 1: {k_cap}")

    start_time = time.time()
    grid = _annulus_grid(m, eps, n_angles, n_radii)
    bands = np.array_split(np.arange(n_angles), max(1, min(parallel, n_angles)))

    def scan(rows: np.ndarray) -> np.ndarray:
        return escape_indices(grid[rows], m, k_cap)

    if parallel > 1:
        with ThreadPoolExecutor(max_workers=parallel) as pool:
            parts = list(pool.map(scan, bands))
    else:
        parts = [scan(rows) for rows in bands]
    indices = np.concatenate(parts, axis=0)

    stuck = np.argwhere(indices == 0)
    if len(stuck):
        witness = complex(grid[tuple(stuck[0])])
        raise NoEscapeWithinCapError(f"网格点 {witness} 在 {k_cap} 步内没有逃逸", witness)

    flat = int(np.argmax(indices))
    max_k = int(indices.flat[flat])
    witness = complex(grid.flat[flat])
    logger.debug(f"网格扫描 {n_angles}x{n_radii} 完成，max_k={max_k}，耗时 {time.time() - start_time:.3f}秒")
    return max_k, witness


def verify_certificate(cert: LemmaCertificate, n_angles: int = 360, n_radii: int = 50,
                       k_cap: Optional[int] = None, parallel: int = 1) -> VerificationReport:
    """
    用暴力网格验证证书：holds = (网格最大逃逸指标 ≤ cert.N)

    Raises:
        NoEscapeWithinCapError: 透传网格扫描的异常
    """
    if k_cap is None:
        k_cap = max(8 * cert.N, 256)
    max_k, witness = brute_force_max_escape(cert.m, cert.eps, n_angles, n_radii, k_cap, parallel)
    return VerificationReport(holds=max_k <= cert.N, max_k=max_k, witness=witness)


def certify(m: int, eps: float, n_angles: int = 360, n_radii: int = 50,
            parallel: int = 1) -> Tuple[LemmaCertificate, VerificationReport]:
    """
    构造并验证证书；验证失败时把 N 加倍直到网格验证通过

    Returns:
        (证书, 最终验证报告)
    """
    cert = compute_N(m, eps)
    report = verify_certificate(cert, n_angles, n_radii, parallel=parallel)
    while not report.holds:
        doubled = replace(cert, N=2 * cert.N)
        logger.warning(f"证书 N={cert.N} 未通过网格验证（max_k={report.max_k}，"
                       f"见证点 {report.witness}），N 加倍为 {doubled.N}")
        cert = doubled
        report = VerificationReport(holds=report.max_k <= cert.N, max_k=report.max_k, witness=report.witness)
    return cert, report
