"""
时序外关联函数（OTOC）

C(t) = <[A(t), B][A(t), B]†>，A(t) = (U†)^t A U^t。

两种平均：
- state_expectation：<·> = Tr(ρ0 ·)。ρ0 为纯态时走矢量路径
  C(t) = ||[A(t), B]† ψ||²，只演化态矢量，不构造 A(t)；
- normalized_trace：<·> = Tr(·)/dim，走稠密路径（小 n 交叉验证用）。

二点/四点关联函数按各自约定使 C = −2(c4 − c2)/norm 严格成立：
- normalized_trace：c2 = Tr[A(t)²B²]，c4 = Tr[A(t)BA(t)B]，norm = dim；
- state_expectation：c2 = ½<A(t)B²A(t) + BA(t)²B>，c4 = <A(t)BA(t)B>，norm = 1。

c4 不做对称化，虚部如实记录。厄米 A、B 下 Tr[A(t)BA(t)B] 为实数，
B = ρ0 = |ψ><ψ| 时 <A(t)ρ0A(t)ρ0> = <A(t)>² 也为实数；这两种情形虚部超出容差即判为数值异常。
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from config.constants import SPLIT_IDENTITY_TOL, PROPERTY_TOL
from .catmap import as_propagator
from .errors import (DimensionMismatchError, NonPureStateError, ZeroSeriesError,
                     IncompleteBasisError, NumericalHealthError)
from .hilbert import (position_operator, momentum_operator, clock_operator, shift_operator,
                      check_state)

logger = logging.getLogger(__name__)

STATE_EXPECTATION = "state_expectation"
NORMALIZED_TRACE = "normalized_trace"
AVERAGES = (STATE_EXPECTATION, NORMALIZED_TRACE)

X2D = "X2D"
P2D = "P2D"
INITIAL_DENSITY = "initial_density"


@dataclass(frozen=True, eq=False)
class KronOperator:
    """两自由度直积算符 left ⊗ right，按 n×n 重排作用，不展开成 n²×n²"""
    left: np.ndarray
    right: np.ndarray

    @property
    def dim(self):
        return self.left.shape[0] * self.right.shape[0]

    def apply(self, psi):
        n1, n2 = self.left.shape[0], self.right.shape[0]
        m = np.asarray(psi).reshape(n1, n2)
        return (self.left @ m @ self.right.T).reshape(-1)

    def adjoint(self):
        return KronOperator(self.left.conj().T, self.right.conj().T)

    def dense(self):
        return np.kron(self.left, self.right)


@dataclass(frozen=True, eq=False)
class ProjectorOperator:
    """纯态投影 |ψ><ψ|"""
    psi: np.ndarray

    @property
    def dim(self):
        return self.psi.shape[0]

    def apply(self, v):
        return self.psi * np.vdot(self.psi, v)

    def adjoint(self):
        return self

    def dense(self):
        return np.outer(self.psi, self.psi.conj())


@dataclass(frozen=True, eq=False)
class DenseOperator:
    matrix: np.ndarray

    @property
    def dim(self):
        return self.matrix.shape[0]

    def apply(self, v):
        return self.matrix @ v

    def adjoint(self):
        return DenseOperator(self.matrix.conj().T)

    def dense(self):
        return self.matrix


OperatorChoice = Union[str, np.ndarray]


@dataclass(frozen=True, eq=False)
class OtocConfig:
    """OTOC 的算符与平均方式"""
    operator_a: OperatorChoice = X2D
    operator_b: OperatorChoice = P2D
    average: str = STATE_EXPECTATION

    def __post_init__(self):
        if self.average not in AVERAGES:
            raise ValueError(f"未知平均方式 {self.average!r}, 可选 {AVERAGES}")
        if isinstance(self.operator_a, str) and self.operator_a not in (X2D, P2D):
            raise ValueError(f"未知算符 A {self.operator_a!r}")
        if isinstance(self.operator_b, str) and self.operator_b not in (P2D, INITIAL_DENSITY):
            raise ValueError(f"未知算符 B {self.operator_b!r}")


@dataclass(frozen=True)
class CorrelatorSample:
    """单个时间步的关联函数"""
    t: int
    c: float
    c2: float
    c4_real: float
    c4_imag: float
    norm: float = 1.0
    # c4 在该配置下理论上为实数
    real_c4: bool = False

    @property
    def split_residual(self):
        return abs(self.c - split_identity(self.c2, self.c4_real, self.norm))


@dataclass(frozen=True)
class Correlators:
    c2: float
    c4: complex
    norm: float


def x2d(n):
    """X2D = X¹ ⊗ X²"""
    x = position_operator(n)
    return KronOperator(x, x)


def p2d(n):
    """P2D = P¹ ⊗ P²"""
    p = momentum_operator(n)
    return KronOperator(p, p)


def _resolve_operator(choice, n, psi=None):
    if isinstance(choice, (KronOperator, ProjectorOperator, DenseOperator)):
        return choice
    if isinstance(choice, str):
        if choice == X2D:
            return x2d(n)
        if choice == P2D:
            return p2d(n)
        if choice == INITIAL_DENSITY:
            if psi is None:
                raise NonPureStateError("B = ρ(0) 需要初始纯态")
            return ProjectorOperator(psi)
        raise ValueError(f"未知算符 {choice!r}")
    matrix = np.asarray(choice)
    if matrix.shape != (n * n, n * n):
        raise DimensionMismatchError(f"自定义算符形状 {matrix.shape} 与 n² = {n * n} 不符")
    return DenseOperator(matrix)


def _subsystem_n(dim):
    n = int(round(np.sqrt(dim)))
    if n * n != dim:
        raise DimensionMismatchError(f"维数 {dim} 不是 n²")
    return n


def pure_vector(rho0, tol=1e-10):
    """从一维态矢量或秩 1 密度矩阵取出 ψ"""
    rho0 = np.asarray(rho0)
    if rho0.ndim == 1:
        return check_state(rho0)
    pur = float(np.real(np.vdot(rho0, rho0)))
    if abs(pur - 1.0) > tol:
        raise NonPureStateError(f"矢量路径要求纯态, Tr ρ² = {pur:.12f}")
    evals, evecs = np.linalg.eigh(rho0)
    return evecs[:, -1]


def _dense_density(rho0):
    rho0 = np.asarray(rho0)
    if rho0.ndim == 1:
        return np.outer(rho0, rho0.conj())
    return rho0


def split_identity(c2, c4_real, norm):
    """C = −2(C4 − C2)/N"""
    return -2.0 * (c4_real - c2) / norm


def heisenberg_evolve(a, u, t):
    """A(t) = (U†)^t A U^t，逐步共轭"""
    if t < 0:
        raise ValueError(f"t 必须 ≥ 0, 得到 {t}")
    prop = as_propagator(u)
    a = np.asarray(a)
    if a.shape != (prop.dim, prop.dim):
        raise DimensionMismatchError(f"算符形状 {a.shape} 与传播子维数 {prop.dim} 不符")
    for _ in range(int(t)):
        a = prop.conjugate(a)
    return a


def _heisenberg_apply(op, prop, t, phi):
    """A(t)φ = U^{−t} A U^t φ：正向演化、作用、反向演化"""
    v = np.asarray(phi, dtype=np.complex128)
    for _ in range(t):
        v = prop.apply(v)
    v = op.apply(v)
    for _ in range(t):
        v = prop.apply_adjoint(v)
    return v


def _vector_sample(a_op, b_op, prop, psi, t):
    """矢量路径：[A(t),B]†ψ = B†A(t)†ψ − A(t)†B†ψ"""
    a_dag = a_op.adjoint()
    b_dag = b_op.adjoint()
    w = b_dag.apply(_heisenberg_apply(a_dag, prop, t, psi))
    u = _heisenberg_apply(a_dag, prop, t, b_dag.apply(psi))
    diff = w - u
    c = float(np.real(np.vdot(diff, diff)))
    c2 = 0.5 * float(np.real(np.vdot(w, w) + np.vdot(u, u)))
    # <w|u> = <A(t)BA(t)B>（厄米 A、B）
    c4 = np.vdot(w, u)
    return CorrelatorSample(t=int(t), c=c, c2=c2, c4_real=float(c4.real),
                            c4_imag=float(c4.imag), norm=1.0,
                            real_c4=isinstance(b_op, ProjectorOperator))


def correlators_2_4(a, b, u, t, average=NORMALIZED_TRACE, rho=None):
    """稠密路径的二点/四点关联函数"""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"A {a.shape} 与 B {b.shape} 形状不同")
    a_t = heisenberg_evolve(a, u, t)
    ab = a_t @ b
    if average == NORMALIZED_TRACE:
        c2 = np.trace(a_t @ a_t @ b @ b)
        c4 = np.trace(ab @ ab)
        return Correlators(float(c2.real), complex(c4), float(a.shape[0]))
    if average != STATE_EXPECTATION:
        raise ValueError(f"未知平均方式 {average!r}")
    if rho is None:
        raise ValueError("state_expectation 需要 ρ0")
    rho = _dense_density(rho)
    c2 = 0.5 * np.trace(rho @ (a_t @ b @ b @ a_t + b @ a_t @ a_t @ b))
    c4 = np.trace(rho @ ab @ ab)
    return Correlators(float(c2.real), complex(c4), 1.0)


def _is_hermitian(m):
    scale = max(1.0, float(np.abs(m).max()))
    return np.allclose(m, m.conj().T, rtol=0.0, atol=PROPERTY_TOL * scale)


def _dense_sample(a, b, u, t, average, rho, b_is_state=False):
    a_t = heisenberg_evolve(a, u, t)
    comm = a_t @ b - b @ a_t
    m = comm @ comm.conj().T
    if average == NORMALIZED_TRACE:
        c = np.trace(m).real / a.shape[0]
    else:
        c = np.trace(_dense_density(rho) @ m).real
    corr = correlators_2_4(a, b, u, t, average, rho)
    real_c4 = _is_hermitian(a) and _is_hermitian(b) and (average == NORMALIZED_TRACE or b_is_state)
    return CorrelatorSample(t=int(t), c=float(c), c2=corr.c2, c4_real=float(corr.c4.real),
                            c4_imag=float(corr.c4.imag), norm=corr.norm, real_c4=real_c4)


def otoc_full(cfg, rho0, u, t, path="auto"):
    """
    计算 t 时刻的 CorrelatorSample。

    path="auto" 时：state_expectation 且 ρ0 为纯态走矢量路径，其余走稠密路径；
    path="vector" 强制矢量路径（ρ0 非纯态时报错）；path="dense" 强制稠密路径。
    """
    if t < 0:
        raise ValueError(f"t 必须 ≥ 0, 得到 {t}")
    prop = as_propagator(u)
    n = _subsystem_n(prop.dim)
    use_vector = path == "vector" or (path == "auto" and cfg.average == STATE_EXPECTATION
                                      and _is_pure(rho0))
    if use_vector:
        if cfg.average != STATE_EXPECTATION:
            raise ValueError("矢量路径只支持 state_expectation 平均")
        psi = pure_vector(rho0)
        a_op = _resolve_operator(cfg.operator_a, n, psi)
        b_op = _resolve_operator(cfg.operator_b, n, psi)
        return check_sample(_vector_sample(a_op, b_op, prop, psi, int(t)))
    rho = _dense_density(rho0)
    psi = pure_vector(rho0) if _is_pure(rho0) else None
    a = _resolve_operator(cfg.operator_a, n, psi).dense()
    b_is_state = isinstance(cfg.operator_b, str) and cfg.operator_b == INITIAL_DENSITY
    b = rho if b_is_state else _resolve_operator(cfg.operator_b, n, psi).dense()
    return check_sample(_dense_sample(a, b, prop, int(t), cfg.average, rho, b_is_state))


def _is_pure(rho0, tol=1e-10):
    rho0 = np.asarray(rho0)
    if rho0.ndim == 1:
        return True
    return abs(float(np.real(np.vdot(rho0, rho0))) - 1.0) <= tol


def otoc_time_series(cfg, psi, u, t_max):
    """矢量路径逐步给出 t = 0..t_max 的 CorrelatorSample"""
    if cfg.average != STATE_EXPECTATION:
        raise ValueError("时间序列只支持 state_expectation 平均")
    prop = as_propagator(u)
    n = _subsystem_n(prop.dim)
    psi = check_state(psi)
    a_op = _resolve_operator(cfg.operator_a, n, psi)
    b_op = _resolve_operator(cfg.operator_b, n, psi)
    samples = []
    for t in range(int(t_max) + 1):
        sample = _vector_sample(a_op, b_op, prop, psi, t)
        check_sample(sample)
        samples.append(sample)
    return samples


def check_sample(sample, tol=SPLIT_IDENTITY_TOL):
    """每个样本都必须满足 C ≥ 0 与二、四点关联拆分恒等式；real_c4 时 c4 虚部须在容差内"""
    if sample.c < -PROPERTY_TOL:
        raise NumericalHealthError(f"t={sample.t}: C(t) = {sample.c:.3e} < 0")
    if not sample.split_residual <= tol * max(1.0, abs(sample.c)):
        raise NumericalHealthError(
            f"t={sample.t}: 拆分恒等式偏差 {sample.split_residual:.3e} > {tol:.0e}")
    if sample.real_c4 and not abs(sample.c4_imag) <= tol * max(1.0, abs(sample.c4_real)):
        raise NumericalHealthError(f"t={sample.t}: c4 虚部 {sample.c4_imag:.3e} 超出容差")
    return sample


def clock_shift_basis(n):
    """子系统 Heisenberg-Weyl 基 {U^a V^b/√n}，在 Hilbert-Schmidt 内积下正交归一"""
    u = clock_operator(n)
    v = shift_operator(n)
    basis = []
    ua = np.eye(n, dtype=np.complex128)
    for _ in range(n):
        m = ua.copy()
        for _ in range(n):
            basis.append(m / np.sqrt(n))
            m = m @ v
        ua = ua @ u
    return basis


def _weyl_expectations(psi, n, subsystem):
    """全部 <ψ|M_ab|ψ>（M_ab 作用在 subsystem 上），返回 n×n 数组 [a, b]"""
    m = np.asarray(psi).reshape(n, n)
    if subsystem == 1:
        m = m.T
    values = np.empty((n, n), dtype=np.complex128)
    for b in range(n):
        # V^b 沿子系统指标平移 b 位
        shifted = np.roll(m, b, axis=1)
        g = np.sum(m.conj() * shifted, axis=0)
        # Σ_j ω^{a j} g_j = n·ifft(g)[a]
        values[:, b] = n * np.fft.ifft(g)
    return values / np.sqrt(n)


@lru_cache(maxsize=None)
def re_prefactor(n):
    """
    基求和的整体常数：要求 t=0 直积态 |0>⊗|0> 上结果等于 Tr ρ1² = 1。
    对 Hilbert-Schmidt 正交归一基其值为 1。
    """
    psi = np.zeros(n * n, dtype=np.complex128)
    psi[0] = 1.0
    raw = float(np.sum(np.abs(_weyl_expectations(psi, n, 2)) ** 2))
    return 1.0 / raw


def otoc_re_sum(rho0, u, t, basis_subsystem=2, method="vector"):
    """
    OTOC-RE 基求和 Σ_M Tr[M(t)† ρ0 M(t) ρ0]（M 遍历子系统 basis_subsystem 的完备基），
    结果应等于 Tr ρ1²(t) = exp(−S2)。
    """
    if basis_subsystem not in (1, 2):
        raise ValueError(f"basis_subsystem 必须是 1 或 2, 得到 {basis_subsystem!r}")
    prop = as_propagator(u)
    n = _subsystem_n(prop.dim)
    psi = pure_vector(rho0)
    if method == "vector":
        psi_t = psi
        for _ in range(int(t)):
            psi_t = prop.apply(psi_t)
        values = _weyl_expectations(psi_t, n, basis_subsystem)
        return re_prefactor(n) * float(np.sum(np.abs(values) ** 2))
    if method != "dense":
        raise ValueError(f"未知方法 {method!r}")
    return re_prefactor(n) * _re_sum_dense(psi, prop, n, int(t), basis_subsystem)


def _re_sum_dense(psi, prop, n, t, subsystem):
    basis = clock_shift_basis(n)
    if len(basis) != n * n:
        raise IncompleteBasisError(f"基元素个数 {len(basis)} ≠ n² = {n * n}")
    rho = np.outer(psi, psi.conj())
    eye = np.eye(n, dtype=np.complex128)
    total = 0.0
    for m in basis:
        big = np.kron(eye, m) if subsystem == 2 else np.kron(m, eye)
        m_t = heisenberg_evolve(big, prop, t)
        total += float(np.real(np.trace(m_t.conj().T @ rho @ m_t @ rho)))
    return total


def rescale_factor(series, reference):
    """非负最小二乘标量 α = max(0, Σ s·r / Σ s²)"""
    s = np.asarray(series, dtype=float)
    r = np.asarray(reference, dtype=float)
    if s.shape != r.shape:
        raise DimensionMismatchError(f"序列长度 {s.shape} 与参考 {r.shape} 不同")
    denom = float(np.dot(s, s))
    if denom == 0.0:
        raise ZeroSeriesError("待缩放序列恒为零")
    return max(0.0, float(np.dot(s, r)) / denom)


def rescale_for_comparison(series, reference):
    """α·series，α 为最小二乘缩放因子"""
    return rescale_factor(series, reference) * np.asarray(series, dtype=float)
