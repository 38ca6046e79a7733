"""
环面希尔伯特空间

维数为 n 的有限希尔伯特空间（有效普朗克常数 1/(2πn)）上的标准算符：
时钟/移位算符、离散傅里叶变换、位置/动量算符、张量积与偏迹。

约定：
- 算符与态都是 numpy 数组，构造后不再修改；
- 两体指标 index = j1·n2 + j2（子系统 1 为外层指标）；
- DFT 取 <q_j|p_k> = exp(+2πi jk/n)/√n，此时 P 在动量指标 k 上的本征值为 −sin(2πk/n)。
"""
import numpy as np

from config.constants import PROPERTY_TOL, NORM_TOL, EIGEN_CLIP_TOL, DEFAULT_SETTINGS
from utils.check_utils import assert_unitary, assert_hermitian, max_abs
from .errors import (InvalidDimensionError, DimensionMismatchError,
                     NonNormalizedStateError, NumericalHealthError)

MAX_TENSOR_DIM = DEFAULT_SETTINGS["max_hilbert_dim"] ** 2


def check_dim(n):
    """校验单自由度维数 n ≥ 2，返回 int"""
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise InvalidDimensionError(f"希尔伯特空间维数必须是 ≥ 2 的整数, 得到 {n!r}")
    return int(n)


def effective_hbar(n):
    """有效普朗克常数 ħ = 1/(2πn)"""
    return 1.0 / (2.0 * np.pi * check_dim(n))


def shift_operator(n, verify=False):
    """移位算符 V：<q'|V|q> = 1 当且仅当 q' = q+1 mod n"""
    n = check_dim(n)
    v = np.roll(np.eye(n, dtype=np.complex128), 1, axis=0)
    if verify:
        assert_unitary(v, PROPERTY_TOL, "shift_operator")
    return v


def clock_operator(n, verify=False):
    """时钟算符 U = diag(exp(2πi q/n))"""
    n = check_dim(n)
    u = np.diag(np.exp(2j * np.pi * np.arange(n) / n))
    if verify:
        assert_unitary(u, PROPERTY_TOL, "clock_operator")
    return u


def position_operator(n, verify=False):
    """X = (U − U†)/2i = diag(sin(2πq/n))"""
    n = check_dim(n)
    u = clock_operator(n)
    x = (u - u.conj().T) / 2j
    if verify:
        assert_hermitian(x, PROPERTY_TOL, "position_operator")
    return x


def momentum_operator(n, verify=False):
    """P = (V − V†)/2i"""
    n = check_dim(n)
    v = shift_operator(n)
    p = (v - v.conj().T) / 2j
    if verify:
        assert_hermitian(p, PROPERTY_TOL, "momentum_operator")
    return p


def dft_matrix(n, verify=False):
    """F_jk = exp(+2πi jk/n)/√n，第 k 列为动量本征态 |p_k>"""
    n = check_dim(n)
    j = np.arange(n)
    f = np.exp(2j * np.pi * np.outer(j, j) / n) / np.sqrt(n)
    if verify:
        assert_unitary(f, PROPERTY_TOL, "dft_matrix")
    return f


def tensor_product(a, b, max_dim=MAX_TENSOR_DIM):
    """Kronecker 积，子系统 1（a）为外层指标"""
    a = np.asarray(a)
    b = np.asarray(b)
    dim = a.shape[0] * b.shape[0]
    if dim > max_dim:
        raise InvalidDimensionError(f"张量积维数 {dim} 超出上限 {max_dim}")
    return np.kron(a, b)


def _check_bipartite(dim, dims):
    n1, n2 = dims
    if dim != n1 * n2:
        raise DimensionMismatchError(f"维数 {dim} 与子系统划分 {n1}×{n2} 不一致")
    return int(n1), int(n2)


def _check_keep(keep):
    if keep not in (1, 2):
        raise ValueError(f"keep 必须是 1 或 2, 得到 {keep!r}")
    return keep


def partial_trace(rho, dims, keep):
    """偏迹：保留子系统 keep（1 或 2）"""
    rho = np.asarray(rho)
    n1, n2 = _check_bipartite(rho.shape[0], dims)
    r = rho.reshape(n1, n2, n1, n2)
    if _check_keep(keep) == 1:
        return np.einsum("ijkj->ik", r)
    return np.einsum("ijil->jl", r)


def partial_trace_pure(psi, dims, keep):
    """纯态快速偏迹：振幅重排为 n1×n2 矩阵 M，ρ1 = M M†，ρ2 = Mᵀ M*"""
    psi = np.asarray(psi)
    n1, n2 = _check_bipartite(psi.shape[0], dims)
    m = psi.reshape(n1, n2)
    if _check_keep(keep) == 1:
        return m @ m.conj().T
    return m.T @ m.conj()


def check_state(psi, tol=NORM_TOL):
    """校验态矢量归一化"""
    psi = np.asarray(psi)
    if psi.ndim != 1:
        raise DimensionMismatchError(f"态矢量必须是一维数组, 得到形状 {psi.shape}")
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > tol:
        raise NonNormalizedStateError(f"态矢量范数 {norm:.15f} 偏离 1")
    return psi


def check_density(rho, tol=NORM_TOL, eig_tol=EIGEN_CLIP_TOL):
    """校验密度矩阵：厄米、迹为 1、本征值 ≥ −eig_tol"""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimensionMismatchError(f"密度矩阵必须是方阵, 得到形状 {rho.shape}")
    if max_abs(rho - rho.conj().T) > tol:
        raise NumericalHealthError("密度矩阵非厄米")
    trace = np.trace(rho).real
    if abs(trace - 1.0) > tol:
        raise NumericalHealthError(f"密度矩阵迹 {trace:.15f} 偏离 1")
    smallest = np.linalg.eigvalsh(rho)[0]
    if smallest < -eig_tol:
        raise NumericalHealthError(f"密度矩阵最小本征值 {smallest:.3e} 为负")
    return rho
