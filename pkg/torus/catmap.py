"""
微扰猫映射

MapSpec 描述单自由度环面自同构（2×2 幺模整数矩阵 + 踢强度 K），
CoupledSpec 把两个 MapSpec 用耦合强度 Kc 连在一起。

单自由度传播子（坐标表象，j 为输出指标、k 为输入指标）：
    U_jk = A·exp[iπ/(n M12)·(M11 j² − 2jk + M22 k²)]·exp[i K n/(2π)·cos(2πj/n)]
    A = [1/(i n M12)]^(1/2)（主值分支）
两自由度传播子 U2D = diag(C)·(U1 ⊗ U2)，C_{j1j2} = exp[i n Kc/(2π)·cos(2π(j1+j2)/n)]。
"""
import logging
from dataclasses import dataclass

import numpy as np

from config.constants import (DEFAULT_K, DEFAULT_KC, DEFAULT_N, HYPERBOLIC_MATRIX,
                              ELLIPTIC_MATRIX, PROPAGATOR_TOL, DEFAULT_SETTINGS)
from utils.check_utils import assert_unitary
from utils.system_utils import check_memory_budget, complex_matrix_bytes
from .errors import (InvalidSpecError, UnsupportedMapError, DimensionMismatchError,
                     InvalidDimensionError)
from .hilbert import check_dim

logger = logging.getLogger(__name__)

HYPERBOLIC = "hyperbolic"
ELLIPTIC = "elliptic"


@dataclass(frozen=True)
class MapSpec:
    """单自由度微扰猫映射"""
    m: tuple
    k: float = DEFAULT_K

    def __post_init__(self):
        m = tuple(tuple(int(x) for x in row) for row in self.m)
        if len(m) != 2 or any(len(row) != 2 for row in m):
            raise InvalidSpecError(f"映射矩阵必须是 2×2, 得到 {self.m!r}")
        if any(float(x) != y for row_in, row in zip(self.m, m) for x, y in zip(row_in, row)):
            raise InvalidSpecError(f"映射矩阵元素必须是整数, 得到 {self.m!r}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "k", float(self.k))
        if not np.isfinite(self.k):
            raise InvalidSpecError(f"踢强度必须有限, 得到 {self.k}")
        if self.det != 1:
            raise InvalidSpecError(f"映射矩阵行列式必须为 1, 得到 {self.det}")
        if abs(self.trace) == 2:
            raise InvalidSpecError(f"抛物型映射（|trace| = 2）不受支持: {m}")

    @property
    def det(self):
        (a, b), (c, d) = self.m
        return a * d - b * c

    @property
    def trace(self):
        return self.m[0][0] + self.m[1][1]

    @property
    def kind(self):
        return map_kind(self)

    def as_array(self):
        return np.array(self.m, dtype=float)


@dataclass(frozen=True)
class CoupledSpec:
    """两个耦合的微扰猫映射"""
    spec1: MapSpec
    spec2: MapSpec
    kc: float = DEFAULT_KC
    n: int = DEFAULT_N

    def __post_init__(self):
        object.__setattr__(self, "kc", float(self.kc))
        if not np.isfinite(self.kc):
            raise InvalidSpecError(f"耦合强度必须有限, 得到 {self.kc}")
        object.__setattr__(self, "n", check_dim(self.n))


def map_kind(spec):
    """按 |trace| 分类：> 2 双曲，< 2 椭圆"""
    return HYPERBOLIC if abs(spec.trace) > 2 else ELLIPTIC


def hyperbolic_spec(k=DEFAULT_K):
    return MapSpec(HYPERBOLIC_MATRIX, k)


def elliptic_spec(k=DEFAULT_K):
    return MapSpec(ELLIPTIC_MATRIX, k)


# 场景名 -> (子系统 1, 子系统 2) 的映射类型
DYNAMICS = {
    "EE": (ELLIPTIC_MATRIX, ELLIPTIC_MATRIX),
    "HE": (HYPERBOLIC_MATRIX, ELLIPTIC_MATRIX),
    "HH": (HYPERBOLIC_MATRIX, HYPERBOLIC_MATRIX),
}


def coupled_spec(dynamics, n=DEFAULT_N, k=DEFAULT_K, kc=DEFAULT_KC):
    """按场景名（EE/HE/HH）构造 CoupledSpec"""
    key = str(dynamics).upper()
    if key not in DYNAMICS:
        raise InvalidSpecError(f"未知动力学类型 {dynamics!r}, 可选 {sorted(DYNAMICS)}")
    m1, m2 = DYNAMICS[key]
    return CoupledSpec(MapSpec(m1, k), MapSpec(m2, k), kc, n)


def _check_max_n(n, max_n):
    if n > max_n:
        raise InvalidDimensionError(f"n = {n} 超出稠密矩阵上限 {max_n}")


def propagator_1d(spec, n, verify=False, max_n=DEFAULT_SETTINGS["max_hilbert_dim"]):
    """单自由度量子传播子"""
    n = check_dim(n)
    _check_max_n(n, max_n)
    (m11, m12), (_, m22) = spec.m
    if m12 == 0:
        raise UnsupportedMapError(f"传播子公式要求 M12 ≠ 0, 映射 {spec.m}")
    j = np.arange(n)[:, None]
    k = np.arange(n)[None, :]
    amplitude = np.sqrt(1.0 / (1j * n * m12))
    quadratic = np.pi / (n * m12) * (m11 * j * j - 2 * j * k + m22 * k * k)
    kick = spec.k * n / (2 * np.pi) * np.cos(2 * np.pi * j / n)
    u = amplitude * np.exp(1j * (quadratic + kick))
    if verify:
        assert_unitary(u, PROPAGATOR_TOL, f"propagator_1d{spec.m}")
    return u


def coupling_matrix(n, kc):
    """耦合相位 C_{j1j2}，以 n×n 数组返回（展平即 n² 维对角）"""
    n = check_dim(n)
    j = np.arange(n)
    total = j[:, None] + j[None, :]
    return np.exp(1j * n * kc / (2 * np.pi) * np.cos(2 * np.pi * total / n))


def _coupling_grid(c_diag, n):
    c = np.asarray(c_diag)
    if c.ndim == 2 and c.shape[0] == c.shape[1] == n * n:
        c = np.diag(c)
    if c.size != n * n:
        raise DimensionMismatchError(f"耦合对角元个数 {c.size} 与 n² = {n * n} 不符")
    return c.reshape(n, n)


def _left(u1, u2, c, x):
    """diag(C)(U1⊗U2) 左乘 x（x 形状 (n², m)）"""
    n = u1.shape[0]
    m = x.shape[1]
    y = (u1 @ x.reshape(n, n * m)).reshape(n, n, m)
    y = u2 @ y
    y *= c[:, :, None]
    return y.reshape(n * n, m)


def _left_adjoint(u1, u2, c, x):
    """(U1⊗U2)† diag(C)* 左乘 x"""
    n = u1.shape[0]
    m = x.shape[1]
    y = x.reshape(n, n, m) * c.conj()[:, :, None]
    y = (u1.conj().T @ y.reshape(n, n * m)).reshape(n, n, m)
    y = u2.conj().T @ y
    return y.reshape(n * n, m)


def apply_propagator_structured(u1, u2, c_diag, target, heisenberg=False, adjoint=False):
    """
    不构造 n²×n² 矩阵地作用两自由度传播子。

    target 为态矢量时返回 Uψ（adjoint=True 时 U†ψ）；
    为算符时返回 U·A（adjoint=True 时 U†·A），heisenberg=True 时返回 U† A U。
    """
    u1 = np.asarray(u1)
    u2 = np.asarray(u2)
    n = u1.shape[0]
    if u2.shape[0] != n:
        raise DimensionMismatchError(f"U1 ({n}) 与 U2 ({u2.shape[0]}) 维数不同")
    c = _coupling_grid(c_diag, n)
    target = np.asarray(target)
    if target.shape[0] != n * n:
        raise DimensionMismatchError(f"目标维数 {target.shape[0]} 与 n² = {n * n} 不符")
    if target.ndim == 1:
        step = _left_adjoint if adjoint else _left
        return step(u1, u2, c, target.reshape(-1, 1).astype(np.complex128)).ravel()
    if target.shape != (n * n, n * n):
        raise DimensionMismatchError(f"算符形状 {target.shape} 与 n² = {n * n} 不符")
    target = target.astype(np.complex128)
    if heisenberg:
        b = _left_adjoint(u1, u2, c, target)
        return _left_adjoint(u1, u2, c, b.conj().T).conj().T
    step = _left_adjoint if adjoint else _left
    return step(u1, u2, c, target)


@dataclass(frozen=True, eq=False)
class Propagator2D:
    """结构化两自由度传播子（单步 Floquet 算符）"""
    u1: np.ndarray
    u2: np.ndarray
    coupling: np.ndarray

    @property
    def n(self):
        return self.u1.shape[0]

    @property
    def dim(self):
        return self.n * self.n

    def apply(self, target):
        return apply_propagator_structured(self.u1, self.u2, self.coupling, target)

    def apply_adjoint(self, target):
        return apply_propagator_structured(self.u1, self.u2, self.coupling, target, adjoint=True)

    def conjugate(self, op):
        """一步 Heisenberg 演化 U† A U"""
        return apply_propagator_structured(self.u1, self.u2, self.coupling, op, heisenberg=True)

    def with_phase(self, phi):
        """乘以整体相位 e^{iφ}（观测量应与之无关）"""
        return Propagator2D(self.u1, self.u2, self.coupling * np.exp(1j * phi))

    def dense(self):
        check_memory_budget(complex_matrix_bytes(self.dim, self.dim), "稠密两自由度传播子")
        return self.coupling.reshape(-1)[:, None] * np.kron(self.u1, self.u2)


@dataclass(frozen=True, eq=False)
class DensePropagator:
    """稠密幺正矩阵，接口与 Propagator2D 相同"""
    matrix: np.ndarray

    @property
    def dim(self):
        return self.matrix.shape[0]

    def apply(self, target):
        return self.matrix @ target

    def apply_adjoint(self, target):
        return self.matrix.conj().T @ target

    def conjugate(self, op):
        return self.matrix.conj().T @ op @ self.matrix

    def with_phase(self, phi):
        return DensePropagator(self.matrix * np.exp(1j * phi))

    def dense(self):
        return self.matrix


def as_propagator(u):
    """把 ndarray 包装成传播子对象，已是传播子则原样返回"""
    if isinstance(u, (Propagator2D, DensePropagator)):
        return u
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionMismatchError(f"传播子必须是方阵, 得到形状 {u.shape}")
    return DensePropagator(u)


def build_propagator(spec, verify=False, max_n=DEFAULT_SETTINGS["max_hilbert_dim"]):
    """按 CoupledSpec 构造结构化传播子（整个运行只构造一次）"""
    n = spec.n
    u1 = propagator_1d(spec.spec1, n, verify=verify, max_n=max_n)
    u2 = propagator_1d(spec.spec2, n, verify=verify, max_n=max_n)
    prop = Propagator2D(u1, u2, coupling_matrix(n, spec.kc))
    logger.debug(f"[传播子] n={n} {map_kind(spec.spec1)}/{map_kind(spec.spec2)} kc={spec.kc}")
    return prop


def propagator_2d(spec, verify=False, max_n=DEFAULT_SETTINGS["max_hilbert_dim"]):
    """稠密 n²×n² 两自由度传播子 diag(C)·(U1⊗U2)"""
    u = build_propagator(spec, verify=verify, max_n=max_n).dense()
    if verify:
        assert_unitary(u, PROPAGATOR_TOL, "propagator_2d")
    return u
