"""
约化密度矩阵上的纠缠熵

全部使用自然对数（nats）。厄米本征求解器给出的 [−1e-10, 0) 小负本征值截断为 0，
更负的本征值视为数值错误。
"""
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from config.constants import EIGEN_CLIP_TOL
from .errors import NumericalHealthError
from .hilbert import check_dim


@dataclass(frozen=True)
class EntropySample:
    """单个时间步的熵"""
    t: int
    s_linear: float
    s_vn: float
    s_renyi2: float
    purity: float


@dataclass(frozen=True)
class RmtSaturation:
    """n×n 两体 Haar 随机纯态的饱和参考值"""
    purity_sat: float
    s_l_sat: float
    s_vn_sat: float
    provenance: dict


def clipped_eigenvalues(rho1, tol=EIGEN_CLIP_TOL):
    """厄米本征值，截断微小负值"""
    evals = linalg.eigvalsh(np.asarray(rho1))
    if evals.size and evals[0] < -tol:
        raise NumericalHealthError(f"约化密度矩阵本征值 {evals[0]:.3e} < −{tol:.0e}")
    return np.clip(evals, 0.0, None)


def purity(rho1):
    """Tr ρ²（对厄米 ρ 等于 Σ|ρ_ij|²）"""
    rho1 = np.asarray(rho1)
    return float(np.real(np.vdot(rho1, rho1)))


def linear_entropy(rho1):
    """S_L = 1 − Tr ρ²"""
    return 1.0 - purity(rho1)


def shannon_entropy(probs):
    """−Σ p ln p，约定 0·ln 0 = 0"""
    probs = np.asarray(probs, dtype=float)
    probs = probs[probs > 0]
    return float(-np.sum(probs * np.log(probs)))


def von_neumann(rho1):
    """S_VN = −Σ λ ln λ"""
    return shannon_entropy(clipped_eigenvalues(rho1))


def renyi2(rho1):
    """S_2 = −ln Tr ρ²"""
    return float(-np.log(purity(rho1)))


def entropy_sample(t, rho1):
    """一次求出全部熵"""
    pur = purity(rho1)
    return EntropySample(
        t=int(t),
        s_linear=1.0 - pur,
        s_vn=von_neumann(rho1),
        s_renyi2=float(-np.log(pur)),
        purity=pur,
    )


def rmt_saturation(n):
    """随机矩阵饱和值：purity = 2n/(n²+1)，S_VN ≈ ln n − 1/2"""
    n = check_dim(n)
    purity_sat = 2.0 * n / (n * n + 1.0)
    return RmtSaturation(
        purity_sat=purity_sat,
        s_l_sat=1.0 - purity_sat,
        s_vn_sat=float(np.log(n) - 0.5),
        provenance={
            "purity_sat": "exact Haar average 2n/(n^2+1)",
            "s_l_sat": "1 - purity_sat",
            "s_vn_sat": "asymptotic Page value ln(n) - 1/2",
        },
    )
