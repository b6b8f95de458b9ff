"""
数据模型定义
定义了系统中使用的核心数据结构：群 ℝ^m × ℤ^n × K 及其元素、广义特征、
紧支撑网格函数、引理证书、乘性泛函与 Beurling 权
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np


@dataclass(frozen=True)
class GroupSpec:
    """紧生成 LCA 群 ℝ^m × ℤ^n × ∏ℤ_{d_i} 的描述"""
    real_rank: int
    int_rank: int
    cyclic_orders: Tuple[int, ...] = ()

    def __post_init__(self):
        """数据后处理，规范化循环因子阶数并校验"""
        object.__setattr__(self, "cyclic_orders", tuple(int(d) for d in self.cyclic_orders))
        if self.real_rank < 0 or self.int_rank < 0:
            raise ValueError(f"秩不能为负数: m={self.real_rank}, n={self.int_rank}")
        for d in self.cyclic_orders:
            if d < 2:
                raise ValueError(f"循环因子阶数必须 ≥ 2: {d}")

    @property
    def cyclic_rank(self) -> int:
        return len(self.cyclic_orders)

    @property
    def is_discrete(self) -> bool:
        """没有实因子时群是离散的"""
        return self.real_rank == 0

    @property
    def is_finite(self) -> bool:
        return self.real_rank == 0 and self.int_rank == 0

    @property
    def torsion_size(self) -> int:
        """有限部分 K 的阶"""
        return math.prod(self.cyclic_orders) if self.cyclic_orders else 1

    @property
    def haar_convention(self) -> str:
        return "lebesgue x counting x counting"

    def describe(self) -> str:
        """可读的群名称，例如 R x Z x Z2 x Z3"""
        parts = []
        parts += ["R"] * self.real_rank
        parts += ["Z"] * self.int_rank
        parts += [f"Z{d}" for d in self.cyclic_orders]
        return " x ".join(parts) if parts else "{0}"


@dataclass(frozen=True)
class GroupElement:
    """群元素：实坐标、整数坐标、循环余数"""
    group: GroupSpec
    real_coords: Tuple[float, ...] = ()
    int_coords: Tuple[int, ...] = ()
    residues: Tuple[int, ...] = ()

    def __post_init__(self):
        """数据后处理，校验长度并将余数约化到 [0, d_i)"""
        real = tuple(float(x) for x in self.real_coords)
        ints = tuple(int(k) for k in self.int_coords)
        if len(real) != self.group.real_rank:
            raise ValueError(f"实坐标个数 {len(real)} 与群的实秩 {self.group.real_rank} 不一致")
        if len(ints) != self.group.int_rank:
            raise ValueError(f"整数坐标个数 {len(ints)} 与群的整数秩 {self.group.int_rank} 不一致")
        if len(self.residues) != self.group.cyclic_rank:
            raise ValueError(f"余数个数 {len(self.residues)} 与循环因子个数 {self.group.cyclic_rank} 不一致")
        residues = tuple(int(r) % d for r, d in zip(self.residues, self.group.cyclic_orders))
        object.__setattr__(self, "real_coords", real)
        object.__setattr__(self, "int_coords", ints)
        object.__setattr__(self, "residues", residues)

    @property
    def is_identity(self) -> bool:
        return (all(x == 0.0 for x in self.real_coords)
                and all(k == 0 for k in self.int_coords)
                and all(r == 0 for r in self.residues))

    def coordinates(self) -> Tuple:
        """按 (实, 整数, 余数) 顺序展开的坐标"""
        return self.real_coords + tuple(self.int_coords) + tuple(self.residues)


@dataclass(frozen=True)
class GeneratingBox:
    """生成盒 U = ∏[−u_j, u_j] × {−1,0,1}^n × K

    int_steps 为 False 时整数因子只保留 0 步（等度连续窗口在 N > 1 时使用）。
    """
    real_halfwidths: Tuple[float, ...] = ()
    int_steps: bool = True

    def __post_init__(self):
        widths = tuple(float(u) for u in self.real_halfwidths)
        for u in widths:
            if not u > 0:
                raise ValueError(f"生成盒半宽必须为正数: {u}")
        object.__setattr__(self, "real_halfwidths", widths)

    def scaled(self, factor: float) -> "GeneratingBox":
        """实半宽按比例缩放"""
        return GeneratingBox(tuple(u * factor for u in self.real_halfwidths), self.int_steps)


@dataclass(frozen=True)
class GenChar:
    """广义特征 α(t) = exp(Σ z_j x_j) · ∏ w_j^{k_j} · ∏ exp(2πi c_i r_i / d_i)"""
    group: GroupSpec
    z: Tuple[complex, ...] = ()
    w: Tuple[complex, ...] = ()
    dual_residues: Tuple[int, ...] = ()

    def __post_init__(self):
        """数据后处理，校验参数个数、w 非零并约化对偶余数"""
        z = tuple(complex(v) for v in self.z)
        w = tuple(complex(v) for v in self.w)
        if len(z) != self.group.real_rank:
            raise ValueError(f"z 参数个数 {len(z)} 与实秩 {self.group.real_rank} 不一致")
        if len(w) != self.group.int_rank:
            raise ValueError(f"w 参数个数 {len(w)} 与整数秩 {self.group.int_rank} 不一致")
        if len(self.dual_residues) != self.group.cyclic_rank:
            raise ValueError(f"对偶余数个数 {len(self.dual_residues)} 与循环因子个数不一致")
        for value in w:
            if abs(value) == 0:
                raise ValueError("w 参数必须非零")
        residues = tuple(int(c) % d for c, d in zip(self.dual_residues, self.group.cyclic_orders))
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "dual_residues", residues)


@dataclass(frozen=True)
class TmSpec:
    """T_m = N(Ū, V_m) 的描述：m、生成盒与实轴采样密度"""
    m: int
    box: GeneratingBox
    sample_density: int = 1024

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 2:
            raise ValueError(f"m 必须是 ≥ 2 的整数: {self.m}")
        if self.sample_density < 2:
            raise ValueError(f"采样密度必须 ≥ 2: {self.sample_density}")

    @property
    def radius(self) -> float:
        """V_m 的半径 1/m"""
        return 1.0 / self.m


@dataclass(frozen=True)
class WindowBox:
    """复平面中以 0 为中心的矩形 {|Re z| < re_halfwidth, |Im z| < im_halfwidth}"""
    re_halfwidth: float
    im_halfwidth: float

    def __post_init__(self):
        if not (self.re_halfwidth > 0 and self.im_halfwidth > 0):
            raise ValueError(f"窗口半宽必须为正数: ({self.re_halfwidth}, {self.im_halfwidth})")

    def contains(self, zc: complex) -> bool:
        return abs(zc.real) < self.re_halfwidth and abs(zc.imag) < self.im_halfwidth


@dataclass(frozen=True, eq=False)
class CcFunction:
    """紧支撑函数的网格采样

    values 的轴顺序为 (实轴..., 整数轴..., 循环轴...)；实轴上第 j 个网格点的坐标为
    (real_offset + j) · real_step，整数轴上为 int_offset + j，循环轴覆盖全部余数。
    """
    group: GroupSpec
    real_step: Tuple[float, ...]
    real_offset: Tuple[int, ...]
    int_offset: Tuple[int, ...]
    values: np.ndarray

    def __post_init__(self):
        """数据后处理，校验网格维度并冻结取值表"""
        steps = tuple(float(h) for h in self.real_step)
        real_offset = tuple(int(o) for o in self.real_offset)
        int_offset = tuple(int(o) for o in self.int_offset)
        if len(steps) != self.group.real_rank or len(real_offset) != self.group.real_rank:
            raise ValueError("实轴步长/偏移个数与群的实秩不一致")
        if len(int_offset) != self.group.int_rank:
            raise ValueError("整数轴偏移个数与群的整数秩不一致")
        for h in steps:
            if not h > 0:
                raise ValueError(f"网格步长必须为正数: {h}")
        values = np.array(self.values, dtype=complex)
        expected_ndim = self.group.real_rank + self.group.int_rank + self.group.cyclic_rank
        if values.ndim != expected_ndim:
            raise ValueError(f"取值表维数 {values.ndim} 与群维数 {expected_ndim} 不一致")
        linear = self.group.real_rank + self.group.int_rank
        if any(size < 1 for size in values.shape[:linear]):
            raise ValueError("取值表在每个非循环轴上至少需要一个网格点")
        if tuple(values.shape[linear:]) != self.group.cyclic_orders:
            raise ValueError("循环轴长度必须等于对应的循环因子阶数")
        values.flags.writeable = False
        object.__setattr__(self, "real_step", steps)
        object.__setattr__(self, "real_offset", real_offset)
        object.__setattr__(self, "int_offset", int_offset)
        object.__setattr__(self, "values", values)

    @property
    def linear_rank(self) -> int:
        """非循环轴（实轴 + 整数轴）的个数"""
        return self.group.real_rank + self.group.int_rank

    @property
    def extents(self) -> Tuple[int, ...]:
        """每个非循环轴上的支撑跨度（网格点数 − 1）"""
        return tuple(size - 1 for size in self.values.shape[:self.linear_rank])

    @property
    def offsets(self) -> Tuple[int, ...]:
        return self.real_offset + self.int_offset

    @property
    def cell_weight(self) -> float:
        """Haar 单元权重：实轴步长之积，离散轴为 1"""
        return math.prod(self.real_step) if self.real_step else 1.0

    def axis_coordinates(self, axis: int) -> np.ndarray:
        """第 axis 个轴上网格点的坐标（实轴为浮点，其余为整数）"""
        size = self.values.shape[axis]
        if axis < self.group.real_rank:
            return (self.real_offset[axis] + np.arange(size)) * self.real_step[axis]
        if axis < self.linear_rank:
            return self.int_offset[axis - self.group.real_rank] + np.arange(size)
        return np.arange(size)


@dataclass(frozen=True)
class LemmaCertificate:
    """逃逸引理的构造性数据 (δ, r₀, r₁, n₁, n₂, n₃, N)"""
    m: int
    eps: float
    delta: float
    r0: float
    r1: float
    n1: int
    n2: int
    n3: int
    N: int

    def to_dict(self) -> dict:
        return {
            "m": self.m, "eps": self.eps, "delta": self.delta, "r0": self.r0, "r1": self.r1,
            "n1": self.n1, "n2": self.n2, "n3": self.n3, "N": self.N,
        }


@dataclass(frozen=True)
class VerificationReport:
    """证书的暴力网格验证结果"""
    holds: bool
    max_k: int
    witness: complex


@dataclass(frozen=True)
class MultiplicativeFunctional:
    """乘性泛函的求值预言机 f ↦ φ(f)"""
    group: GroupSpec
    evaluator: Callable[[CcFunction], complex]
    label: str = "oracle"

    def __call__(self, f: CcFunction) -> complex:
        if f.group != self.group:
            raise ValueError(f"函数所在群 {f.group.describe()} 与泛函的群 {self.group.describe()} 不一致")
        return complex(self.evaluator(f))


@dataclass(frozen=True)
class RecoveredCharacter:
    """由乘性泛函恢复的特征在采样点上的取值"""
    sample_points: Tuple[GroupElement, ...]
    values: Tuple[complex, ...]
    residual: float = 0.0

    def __post_init__(self):
        if len(self.sample_points) != len(self.values):
            raise ValueError("采样点与取值个数不一致")
        for value in self.values:
            if value == 0:
                raise ValueError("恢复的特征取值必须非零")


@dataclass(frozen=True)
class Weight:
    """Beurling 权 ω(s) = exp(r · Σ|s_j|)，离散因子上权为 1"""
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"权的增长率必须为正数: {self.r}")


@dataclass(frozen=True)
class StripRegion:
    """闭带形区域 Π_{−r,r} = {z : −r ≤ Re z ≤ r}"""
    r: float

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"带宽必须为正数: {self.r}")


@dataclass
class ContainmentReport:
    """H(ℝ) 窗口包含关系的采样检查报告"""
    n: int
    eps: float
    samples: int
    failures: int = 0
    worst_value: float = 0.0
    witness: Optional[complex] = None
    formula_conflicts: int = 0
    notes: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        witness = None if self.witness is None else [self.witness.real, self.witness.imag]
        return {
            "n": self.n,
            "eps": self.eps,
            "samples": self.samples,
            "failures": self.failures,
            "holds": self.holds,
            "worst_value": self.worst_value,
            "witness": witness,
            "formula_conflicts": self.formula_conflicts,
        }
