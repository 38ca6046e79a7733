"""
密度算符的 Schmidt 分解、Wigner 可分离熵（WSE）与离散 Wigner 函数

离散 Wigner 函数取倍格点中点约定（doubled-lattice-midpoint/v1）：
    W(a, b) = 1/(2N)·Σ_{r+s=a} ρ_rs·exp(−iπ b(r−s)/N)，a, b ∈ [0, 2N)
格点 (a, b) 对应相空间点 (q, p) = (a/2N, b/2N)。性质：
- W 为实数，全格点求和为 1；
- Σ_b W(2j, b) = ρ_jj，奇数行求和为 0；Σ_a W(a, 2k) = <p_k|ρ|p_k>/2；
- Σ W_ψ·W_φ = |<ψ|φ>|²/(2N)。
偶数行上 W(a, b+N) = W(a, b)（倍格点的镜像）。

两自由度时 W 以 (a1,b1) 为行、(a2,b2) 为列排成 (2n)²×(2n)² 矩阵，
其奇异值与 ρ 的算符 Schmidt 谱成正比（比例 1/(2n)）。
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import fft, linalg

from config.constants import SCHMIDT_DROP_TOL, WIGNER_IMAG_TOL, WIGNER_CONVENTION, DEFAULT_SETTINGS
from utils.system_utils import check_memory_budget, complex_matrix_bytes
from .entropy import shannon_entropy
from .errors import (DimensionMismatchError, ZeroSeriesError, BudgetExceededError,
                     NumericalHealthError)
from .hilbert import check_dim, check_state

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SchmidtSpectrum:
    """算符 Schmidt 奇异值（非增）及其 2-范数"""
    sigmas: np.ndarray
    norm: float

    @property
    def normalized(self):
        if self.norm == 0.0:
            raise ZeroSeriesError("Schmidt 谱全为零")
        return self.sigmas / self.norm

    @property
    def rank(self):
        return int(np.count_nonzero(self.sigmas > SCHMIDT_DROP_TOL))


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """倍格点上的实值 Wigner 函数；单自由度形状 (2n, 2n)，两自由度 (2n,)*4"""
    n: int
    values: np.ndarray
    imag_residue: float = 0.0
    convention: str = field(default=WIGNER_CONVENTION)

    @property
    def dof(self):
        return self.values.ndim // 2

    def position_marginal(self):
        """Σ_b W(2j, b)，长度 n"""
        self._require_1d()
        return self.values.sum(axis=1)[::2]

    def momentum_marginal(self):
        """2·Σ_a W(a, 2k)，长度 n"""
        self._require_1d()
        return 2.0 * self.values.sum(axis=0)[::2]

    def max_point(self):
        """最大值所在格点的相空间坐标"""
        idx = np.unravel_index(np.argmax(self.values), self.values.shape)
        return tuple(i / (2.0 * self.n) for i in idx)

    def as_matrix(self):
        """两自由度网格按子系统展平为 (2n)²×(2n)² 矩阵"""
        side = (2 * self.n) ** 2
        if self.dof == 1:
            return self.values
        return self.values.reshape(side, side)

    def metadata(self):
        return {
            "convention": self.convention,
            "n": self.n,
            "dof": self.dof,
            "lattice": "(q, p) = (a/2n, b/2n), a, b in [0, 2n)",
            "imag_residue": self.imag_residue,
        }

    def _require_1d(self):
        if self.dof != 1:
            raise DimensionMismatchError("边缘分布只对单自由度网格定义")


def _reshuffle(rho, dims):
    n1, n2 = (int(d) for d in dims)
    rho = np.asarray(rho)
    if rho.shape != (n1 * n2, n1 * n2):
        raise DimensionMismatchError(f"密度矩阵形状 {rho.shape} 与划分 {n1}×{n2} 不符")
    # R[(j1,k1),(j2,k2)] = ρ[(j1,j2),(k1,k2)]
    return rho.reshape(n1, n2, n1, n2).transpose(0, 2, 1, 3).reshape(n1 * n1, n2 * n2)


def operator_schmidt(rho, dims):
    """算符 Schmidt 分解的奇异值"""
    sigmas = linalg.svdvals(_reshuffle(rho, dims))
    return SchmidtSpectrum(sigmas=sigmas, norm=float(np.sqrt(np.sum(sigmas ** 2))))


def spectrum_entropy(sigmas, drop_tol=SCHMIDT_DROP_TOL):
    """−Σ σ̃² ln σ̃²，σ̃ 为归一化奇异值；低于 drop_tol 的值丢弃"""
    sigmas = np.asarray(sigmas, dtype=float)
    sigmas = sigmas[sigmas > drop_tol]
    if sigmas.size == 0:
        raise ZeroSeriesError("奇异值谱全为零")
    weights = sigmas ** 2
    return shannon_entropy(weights / weights.sum())


def wse(spec):
    """Wigner 可分离熵"""
    return spectrum_entropy(spec.sigmas)


def wse_pure_fast(psi, dims):
    """纯态 WSE：σ̃_ij² = λ_i²λ_j²，λ 为态的 Schmidt 系数，结果等于 2·S_VN(ρ1)"""
    psi = check_state(psi)
    n1, n2 = (int(d) for d in dims)
    if psi.shape[0] != n1 * n2:
        raise DimensionMismatchError(f"态维数 {psi.shape[0]} 与划分 {n1}×{n2} 不符")
    lam = linalg.svdvals(psi.reshape(n1, n2))
    probs = lam ** 2
    return shannon_entropy(np.outer(probs, probs).ravel())


def wigner_transform_matrix(n):
    """T[(a,b),(r,s)] = δ_{a,r+s}·exp(−iπ b(r−s)/n)/(2n)，形状 (4n², n²)"""
    n = check_dim(n)
    a = np.arange(2 * n)[:, None, None, None]
    b = np.arange(2 * n)[None, :, None, None]
    r = np.arange(n)[None, None, :, None]
    s = np.arange(n)[None, None, None, :]
    t = (a == r + s) * np.exp(-1j * np.pi * b * (r - s) / n) / (2 * n)
    return t.reshape(4 * n * n, n * n)


def _real_part(values, what):
    residue = float(np.max(np.abs(values.imag))) if values.size else 0.0
    if not residue <= WIGNER_IMAG_TOL:
        raise NumericalHealthError(f"{what} 虚部残差 {residue:.3e} > {WIGNER_IMAG_TOL:.0e}")
    return np.ascontiguousarray(values.real), residue


def wigner_grid_1d(rho, n):
    """单自由度快速路径：每条反对角线 r+s=a 做一次长度 2n 的 FFT"""
    n = check_dim(n)
    rho = _as_density(rho, n)
    r = np.arange(n)[:, None]
    s = np.arange(n)[None, :]
    h = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    h[r + s, (r - s) % (2 * n)] = rho
    values, residue = _real_part(fft.fft(h, axis=1) / (2 * n), "单自由度 Wigner 网格")
    return WignerGrid(n=n, values=values, imag_residue=residue)


def _wigner_grid_2d(rho, n, max_n):
    if n > max_n:
        raise BudgetExceededError(f"两自由度 Wigner 网格只支持 n ≤ {max_n}, 得到 n = {n}")
    side = (2 * n) ** 2
    check_memory_budget(complex_matrix_bytes(side, side), "两自由度 Wigner 网格")
    t = wigner_transform_matrix(n)
    w = t @ _reshuffle(rho, (n, n)) @ t.T
    values, residue = _real_part(w, "两自由度 Wigner 网格")
    return WignerGrid(n=n, values=values.reshape((2 * n,) * 4), imag_residue=residue)


def _as_density(rho, dim):
    rho = np.asarray(rho)
    if rho.ndim == 1:
        rho = np.outer(rho, rho.conj())
    if rho.shape != (dim, dim):
        raise DimensionMismatchError(f"密度矩阵形状 {rho.shape} 与维数 {dim} 不符")
    return rho


def wigner_grid(rho, n, max_n=DEFAULT_SETTINGS["wigner_max_n"]):
    """按 ρ 的维数（n 或 n²）选择单/两自由度网格"""
    n = check_dim(n)
    rho = np.asarray(rho)
    dim = rho.shape[0]
    if dim == n:
        return wigner_grid_1d(rho, n)
    if dim == n * n:
        return _wigner_grid_2d(_as_density(rho, dim), n, max_n)
    raise DimensionMismatchError(f"ρ 维数 {dim} 既不是 n = {n} 也不是 n² = {n * n}")


@dataclass(frozen=True)
class CrosscheckReport:
    max_deviation: float
    grid_rank: int
    operator_rank: int


def wigner_schmidt_crosscheck(rho, dims, max_n=DEFAULT_SETTINGS["wigner_max_n"]):
    """网格奇异值谱与算符 Schmidt 谱（各自归一化后）的最大偏差"""
    n1, n2 = (int(d) for d in dims)
    if n1 != n2:
        raise DimensionMismatchError(f"Wigner 交叉检验要求 n1 = n2, 得到 {n1}×{n2}")
    rho = _as_density(rho, n1 * n2)
    grid = _wigner_grid_2d(rho, n1, max_n)
    grid_sigmas = linalg.svdvals(grid.as_matrix())
    grid_spec = SchmidtSpectrum(grid_sigmas, float(np.sqrt(np.sum(grid_sigmas ** 2))))
    op_spec = operator_schmidt(rho, dims)
    a = grid_spec.normalized
    b = op_spec.normalized
    size = max(a.size, b.size)
    a = np.pad(a, (0, size - a.size))
    b = np.pad(b, (0, size - b.size))
    report = CrosscheckReport(
        max_deviation=float(np.max(np.abs(a - b))),
        grid_rank=grid_spec.rank,
        operator_rank=op_spec.rank,
    )
    logger.debug(f"[Wigner 交叉检验] n={n1} 偏差 {report.max_deviation:.3e}")
    return report
