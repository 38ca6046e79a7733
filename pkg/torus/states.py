"""初始态：环面相干态、两体直积态、密度矩阵与随机态"""
from dataclasses import dataclass

import numpy as np

from config.constants import COHERENT_IMAGE_WINDOW, COHERENT_MIN_N, NORM_TOL
from .catmap import as_propagator
from .hilbert import check_dim, check_state


@dataclass(frozen=True)
class PhasePoint:
    """环面上的相空间点，坐标构造时约化到 [0, 1)"""
    q: float
    p: float

    def __post_init__(self):
        object.__setattr__(self, "q", wrap_unit(self.q))
        object.__setattr__(self, "p", wrap_unit(self.p))

    @classmethod
    def parse(cls, value):
        """从 'q,p' 字符串或二元组构造"""
        if isinstance(value, PhasePoint):
            return value
        if isinstance(value, str):
            parts = [s.strip() for s in value.split(",")]
            if len(parts) != 2:
                raise ValueError(f"相空间点格式应为 'q,p', 得到 {value!r}")
            return cls(float(parts[0]), float(parts[1]))
        q, p = value
        return cls(float(q), float(p))

    def as_tuple(self):
        return (self.q, self.p)


def wrap_unit(x):
    """模 1 约化，保证结果严格落在 [0, 1)"""
    r = float(x) % 1.0
    return 0.0 if r >= 1.0 else r


def image_window(n):
    """周期化求和的像窗口 |m| ≤ w；n < 8 时自动放宽"""
    if n >= COHERENT_MIN_N:
        return COHERENT_IMAGE_WINDOW
    return COHERENT_IMAGE_WINDOW + (COHERENT_MIN_N - n)


def coherent_state(n, center):
    """
    环面相干态（周期化高斯波包）

    ψ_j ∝ Σ_m exp[−πn(j/n − q0 − m)² + 2πi n p0 (j/n − m)]
    """
    n = check_dim(n)
    center = PhasePoint.parse(center)
    w = image_window(n)
    x = np.arange(n)[:, None] / n
    m = np.arange(-w, w + 1)[None, :]
    shifted = x - m
    exponent = -np.pi * n * (shifted - center.q) ** 2 + 2j * np.pi * n * center.p * shifted
    psi = np.exp(exponent).sum(axis=1)
    return psi / np.linalg.norm(psi)


def product_state(psi1, psi2):
    """两体直积态 ψ_{j1·n2+j2} = ψ1_{j1}·ψ2_{j2}"""
    psi = np.kron(np.asarray(psi1), np.asarray(psi2))
    return psi / np.linalg.norm(psi)


def density_of(psi):
    """纯态密度矩阵 |ψ><ψ|"""
    psi = check_state(psi)
    return np.outer(psi, psi.conj())


def evolve_state(psi, u, t):
    """ψ(t) = U^t ψ"""
    prop = as_propagator(u)
    psi = np.asarray(psi, dtype=np.complex128)
    for _ in range(int(t)):
        psi = prop.apply(psi)
    return psi


def phase_space_centroid(psi):
    """由 <U> 与 <V> 的辐角给出单自由度态的圆周平均中心 (q, p)"""
    psi = np.asarray(psi)
    n = psi.shape[0]
    probs = np.abs(psi) ** 2
    clock = np.sum(probs * np.exp(2j * np.pi * np.arange(n) / n))
    # <V> = Σ ψ*_{j+1} ψ_j，动量为 p 的平面波给出 e^{−2πip}
    shift = np.vdot(np.roll(psi, -1), psi)
    q = np.angle(clock) / (2 * np.pi)
    p = -np.angle(shift) / (2 * np.pi)
    return wrap_unit(q), wrap_unit(p)


def fidelity(psi, phi):
    """|<ψ|φ>|²"""
    return float(abs(np.vdot(psi, phi)) ** 2)


def _wrapped_variance(probs, center_index):
    n = probs.shape[0]
    d = (np.arange(n) - center_index + n / 2) % n - n / 2
    return float(np.sum(probs * d * d))


def marginal_variances(psi, center):
    """
    位置与动量边缘分布绕中心的方差（格点单位，按环面最短距离计）。

    动量分布取 |F†ψ|²，动量指标 k 对应 p = k/n。
    """
    psi = np.asarray(psi)
    n = psi.shape[0]
    center = PhasePoint.parse(center)
    momentum = np.fft.fft(psi) / np.sqrt(n)
    return (_wrapped_variance(np.abs(psi) ** 2, center.q * n),
            _wrapped_variance(np.abs(momentum) ** 2, center.p * n))


def random_pure_state(dim, rng):
    """Haar 随机纯态（复高斯向量归一化）"""
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return psi / np.linalg.norm(psi)


def random_density_matrix(dim, rng, rank=None):
    """随机混合态：对 dim×rank 的 Haar 纯态求偏迹"""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_hermitian(dim, rng):
    """随机厄米矩阵（GUE 形式）"""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2


def random_unitary(dim, rng):
    """Haar 随机幺正矩阵（QR 加相位修正）"""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def is_normalized(psi, tol=NORM_TOL):
    return abs(np.linalg.norm(psi) - 1.0) <= tol
