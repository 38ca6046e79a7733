"""
经典耦合微扰猫映射

单自由度：(q', p') = M·(q, p + ε(q)) mod 1，ε(q) = −(K/2π)·sin(2πq)
两自由度：每个自由度先受 ε(自身 q) + κ(q1, q2) 的踢，再作用各自的 M，
κ(q1, q2) = −(Kc/2π)·sin(2π(q1 + q2))。
系综坐标以 (size, 4) 数组存放，列顺序 (q1, p1, q2, p2)。
"""
import logging
import math
from dataclasses import dataclass

import numba as nb
import numpy as np
from scipy import linalg

from config.constants import LYAPUNOV_REORTH_EVERY, LYAPUNOV_TRANSIENT, CSE_CONVENTION
from .catmap import MapSpec, CoupledSpec, build_propagator
from .errors import NumericalHealthError, InvalidSpecError
from .hilbert import check_dim, partial_trace_pure
from .states import wrap_unit, coherent_state, product_state, evolve_state
from .wigner import spectrum_entropy

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# 默认的一般位置种子点（避开不动点与周期轨道）
GENERIC_SEED = (0.1234567, 0.3456789, 0.6543211, 0.8765433)


@dataclass(frozen=True)
class ClassicalPoint4D:
    """四维相空间点，坐标构造时约化到 [0, 1)"""
    q1: float
    p1: float
    q2: float
    p2: float

    def __post_init__(self):
        for name in ("q1", "p1", "q2", "p2"):
            object.__setattr__(self, name, wrap_unit(getattr(self, name)))

    def as_array(self):
        return np.array([self.q1, self.p1, self.q2, self.p2])

    @classmethod
    def from_array(cls, x):
        return cls(*(float(v) for v in x))


@dataclass(frozen=True, eq=False)
class CoarseDistribution:
    """g⁴ 个格子的粗粒化分布，行为 (q1,p1) 格子、列为 (q2,p2) 格子"""
    g: int
    weights: np.ndarray

    def __post_init__(self):
        side = self.g * self.g
        if self.weights.shape != (side, side):
            raise ValueError(f"权重形状 {self.weights.shape} 与 g = {self.g} 不符")
        if np.any(self.weights < 0):
            raise ValueError("粗粒化分布权重为负")


@dataclass(frozen=True)
class CseSample:
    t: int
    cse: float


@nb.njit(cache=True)
def _wrap(x):
    r = x % 1.0
    if r >= 1.0:
        r = 0.0
    return r


@nb.njit(cache=True)
def _step_inplace(x, m1, k1, m2, k2, kc):
    q1 = x[0]
    q2 = x[2]
    kappa = -kc / TWO_PI * math.sin(TWO_PI * (q1 + q2))
    p1 = x[1] - k1 / TWO_PI * math.sin(TWO_PI * q1) + kappa
    p2 = x[3] - k2 / TWO_PI * math.sin(TWO_PI * q2) + kappa
    x[0] = _wrap(m1[0, 0] * q1 + m1[0, 1] * p1)
    x[1] = _wrap(m1[1, 0] * q1 + m1[1, 1] * p1)
    x[2] = _wrap(m2[0, 0] * q2 + m2[0, 1] * p2)
    x[3] = _wrap(m2[1, 0] * q2 + m2[1, 1] * p2)


@nb.njit(parallel=True, cache=True)
def _evolve_kernel(points, m1, k1, m2, k2, kc, t):
    out = points.copy()
    for i in nb.prange(out.shape[0]):
        x = out[i]
        for _ in range(t):
            _step_inplace(x, m1, k1, m2, k2, kc)
    return out


def _spec_arrays(spec):
    return (spec.spec1.as_array(), spec.spec1.k, spec.spec2.as_array(), spec.spec2.k, spec.kc)


def step_1d(point, spec):
    """单自由度一步"""
    q, p = (float(v) for v in point)
    p = p - spec.k / TWO_PI * math.sin(TWO_PI * q)
    (a, b), (c, d) = spec.m
    return wrap_unit(a * q + b * p), wrap_unit(c * q + d * p)


def step_2d(point, spec):
    """两自由度一步"""
    x = np.asarray(point.as_array() if isinstance(point, ClassicalPoint4D) else point,
                   dtype=np.float64).copy()
    _step_inplace(x, *_spec_arrays(spec))
    return ClassicalPoint4D.from_array(x)


def evolve_ensemble(points, spec, t):
    """
    系综逐点演化 t 步，保持顺序。

    输入为 ClassicalPoint4D 列表时返回列表，为 (size, 4) 数组时返回数组。
    """
    if t < 0:
        raise ValueError(f"t 必须 ≥ 0, 得到 {t}")
    as_list = not isinstance(points, np.ndarray)
    if as_list:
        if len(points) == 0:
            return []
        arr = np.array([p.as_array() for p in points], dtype=np.float64)
    else:
        arr = np.ascontiguousarray(points, dtype=np.float64)
        if arr.size == 0:
            return arr.reshape(0, 4)
    out = _evolve_kernel(arr, *_spec_arrays(spec), int(t))
    if as_list:
        return [ClassicalPoint4D.from_array(row) for row in out]
    return out


def inverse_kick(points, spec):
    """
    撤销一次踢（q 不变，p 减去 ε + κ）。

    量子一步是先映射后踢，经典一步是先踢后映射；
    系综先作 inverse_kick 再经典演化 t 步，与量子 t 步的位置分布对应。
    """
    out = np.array(points, dtype=np.float64, copy=True)
    q1, q2 = out[:, 0], out[:, 2]
    kappa = -spec.kc / TWO_PI * np.sin(TWO_PI * (q1 + q2))
    out[:, 1] += spec.spec1.k / TWO_PI * np.sin(TWO_PI * q1) - kappa
    out[:, 3] += spec.spec2.k / TWO_PI * np.sin(TWO_PI * q2) - kappa
    out = np.mod(out, 1.0)
    out[out >= 1.0] = 0.0
    return out


def ehrenfest_deviation(spec, center1, center2, t, size, rng):
    """
    位置观测量 <sin 2πq1> 的量子值与经典系综平均之差的绝对值。

    量子侧从直积相干态演化 t 步，经典侧用对应的高斯系综。
    """
    n = spec.n
    psi = product_state(coherent_state(n, center1), coherent_state(n, center2))
    psi = evolve_state(psi, build_propagator(spec), t)
    rho1 = partial_trace_pure(psi, (n, n), keep=1)
    quantum = float(np.real(np.sum(np.diag(rho1) * np.sin(TWO_PI * np.arange(n) / n))))
    center = (*center1, *center2)
    points = evolve_ensemble(inverse_kick(gaussian_ensemble(center, n, size, rng), spec), spec, t)
    classical = float(np.mean(np.sin(TWO_PI * points[:, 0])))
    return abs(quantum - classical)


def tangent_map_1d(point, spec):
    """单自由度雅可比矩阵 M·[[1, 0], [ε'(q), 1]]"""
    q = float(point[0])
    kick = np.array([[1.0, 0.0], [-spec.k * math.cos(TWO_PI * q), 1.0]])
    return spec.as_array() @ kick


def tangent_map_2d(point, spec):
    """两自由度雅可比矩阵（坐标顺序 q1, p1, q2, p2）"""
    q1, _, q2, _ = (float(v) for v in point)
    dk = -spec.kc * math.cos(TWO_PI * (q1 + q2))
    kick = np.eye(4)
    kick[1, 0] = -spec.spec1.k * math.cos(TWO_PI * q1) + dk
    kick[1, 2] = dk
    kick[3, 2] = -spec.spec2.k * math.cos(TWO_PI * q2) + dk
    kick[3, 0] = dk
    linear = linalg.block_diag(spec.spec1.as_array(), spec.spec2.as_array())
    return linear @ kick


def lyapunov_estimate(spec, t_steps, seed_point=None, transient=LYAPUNOV_TRANSIENT,
                      reorth_every=LYAPUNOV_REORTH_EVERY):
    """
    切线映射乘积 + 周期性 QR 再正交化估计 Lyapunov 谱，降序返回。

    spec 为 MapSpec 时返回 2 个指数，为 CoupledSpec 时返回 4 个。
    """
    if t_steps < 100:
        raise ValueError(f"t_steps 至少为 100, 得到 {t_steps}")
    if isinstance(spec, MapSpec):
        x = np.array(GENERIC_SEED[:2] if seed_point is None else seed_point, dtype=float)
    elif isinstance(spec, CoupledSpec):
        x = np.array(GENERIC_SEED if seed_point is None else seed_point, dtype=float)
    else:
        raise InvalidSpecError(f"不支持的映射类型 {type(spec).__name__}")
    one_dof = isinstance(spec, MapSpec)

    dim = x.shape[0]
    q = np.eye(dim)
    log_sum = np.zeros(dim)
    for i in range(transient + t_steps):
        if one_dof:
            q = tangent_map_1d(x, spec) @ q
            x = np.array(step_1d(x, spec))
        else:
            q = tangent_map_2d(x, spec) @ q
            x = step_2d(x, spec).as_array()
        done = i + 1
        if done % reorth_every == 0 or done == transient + t_steps:
            q, r = linalg.qr(q)
            diag = np.abs(np.diag(r))
            if not np.all(np.isfinite(diag)) or np.any(diag == 0):
                raise NumericalHealthError(f"切线向量在第 {done} 步发散或退化")
            # 暂态内的伸缩不计入
            if done > transient:
                log_sum += np.log(diag)
    exponents = np.sort(log_sum / t_steps)[::-1]
    logger.debug(f"[Lyapunov] {exponents}")
    return exponents


def gaussian_ensemble(center, n, size, rng):
    """
    相干态的经典对应：以 center 为中心、每个坐标方差 1/(4πn) 的高斯系综。

    center 为 (q, p) 或 (q1, p1, q2, p2)；返回形状 (size, len(center)) 的数组。
    """
    n = check_dim(n)
    center = np.asarray(center, dtype=float).ravel()
    if center.size not in (2, 4):
        raise ValueError(f"中心坐标长度必须是 2 或 4, 得到 {center.size}")
    sigma = 1.0 / math.sqrt(4.0 * math.pi * n)
    points = center[None, :] + sigma * rng.standard_normal((int(size), center.size))
    points = np.mod(points, 1.0)
    points[points >= 1.0] = 0.0
    return points


def coarse_distribution(points, g):
    """按 (q1,p1) × (q2,p2) 划分的 g²×g² 归一化直方图"""
    if int(g) != g or g < 2:
        raise ValueError(f"格子数 g 必须是 ≥ 2 的整数, 得到 {g!r}")
    g = int(g)
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=float)
    else:
        arr = np.array([p.as_array() for p in points], dtype=float)
    if arr.size == 0:
        raise ValueError("系综为空")
    cells = np.minimum((arr * g).astype(np.int64), g - 1)
    row = cells[:, 0] * g + cells[:, 1]
    col = cells[:, 2] * g + cells[:, 3]
    side = g * g
    counts = np.bincount(row * side + col, minlength=side * side).astype(float)
    return CoarseDistribution(g=g, weights=counts.reshape(side, side) / arr.shape[0])


def cse(dist):
    """经典可分离熵：粗粒化分布矩阵奇异值谱的熵"""
    return spectrum_entropy(linalg.svdvals(dist.weights))


def cse_series(spec, center, t_max, g, size, rng):
    """从高斯系综出发，逐步给出 t = 0..t_max 的 CSE"""
    points = gaussian_ensemble(center, spec.n, size, rng)
    samples = [CseSample(0, cse(coarse_distribution(points, g)))]
    for t in range(1, int(t_max) + 1):
        points = evolve_ensemble(points, spec, 1)
        samples.append(CseSample(t, cse(coarse_distribution(points, g))))
    logger.debug(f"[CSE] g={g} size={size} {CSE_CONVENTION}")
    return samples
