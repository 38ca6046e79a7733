"""数值检查工具"""
import numpy as np

from torus.errors import NumericalHealthError


def max_abs(a):
    """最大范数（逐元素绝对值的最大值）"""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def unitarity_residual(u):
    """max|U†U − I|"""
    u = np.asarray(u)
    return max_abs(u.conj().T @ u - np.eye(u.shape[0]))


def hermiticity_residual(a):
    """max|A − A†|"""
    a = np.asarray(a)
    return max_abs(a - a.conj().T)


def assert_unitary(u, tol, what="operator"):
    """断言幺正性，失败时抛出 NumericalHealthError"""
    residual = unitarity_residual(u)
    if not residual <= tol:
        raise NumericalHealthError(f"{what} 非幺正: max|U†U-I| = {residual:.3e} > {tol:.1e}")
    return residual


def assert_hermitian(a, tol, what="operator"):
    """断言厄米性"""
    residual = hermiticity_residual(a)
    if not residual <= tol:
        raise NumericalHealthError(f"{what} 非厄米: max|A-A†| = {residual:.3e} > {tol:.1e}")
    return residual


def assert_close(value, expected, tol, what):
    """断言两个标量（或数组）在容差内一致"""
    residual = max_abs(np.asarray(value) - np.asarray(expected))
    if not residual <= tol:
        raise NumericalHealthError(f"{what}: 偏差 {residual:.3e} > {tol:.1e}")
    return residual
