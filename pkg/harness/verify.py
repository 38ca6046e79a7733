"""
不变量检验套件
每个检验返回测得的残差与容差；fast 级别的两体检验只用 n ≤ 16，full 级别追加大维数与长时间检验。
"""
import math
import logging
from dataclasses import dataclass, asdict

import numpy as np

from torus.catmap import (coupled_spec, build_propagator, propagator_1d, hyperbolic_spec,
                          elliptic_spec, map_kind, MapSpec, HYPERBOLIC_MATRIX, HYPERBOLIC)
from torus.classical import (lyapunov_estimate, tangent_map_2d, evolve_ensemble,
                             ehrenfest_deviation, coarse_distribution, gaussian_ensemble, cse,
                             CoarseDistribution)
from torus.entropy import purity, renyi2, von_neumann, linear_entropy, rmt_saturation
from torus.hilbert import (clock_operator, shift_operator, momentum_operator, position_operator,
                           dft_matrix, partial_trace, partial_trace_pure)
from torus.otoc import (OtocConfig, otoc_full, otoc_re_sum, heisenberg_evolve, correlators_2_4,
                        split_identity, X2D, P2D, INITIAL_DENSITY, NORMALIZED_TRACE)
from torus.states import (coherent_state, product_state, evolve_state, random_pure_state,
                          random_density_matrix, random_hermitian, fidelity, marginal_variances)
from torus.wigner import (operator_schmidt, wse, wse_pure_fast, wigner_grid_1d,
                          wigner_schmidt_crosscheck)
from utils.check_utils import max_abs, unitarity_residual

logger = logging.getLogger(__name__)

FAST = "fast"
FULL = "full"
LEVELS = (FAST, FULL)

SEED = 20240101


@dataclass
class InvariantResult:
    name: str
    level: str
    passed: bool
    residual: float
    tol: float
    detail: str = ""


@dataclass
class VerifyReport:
    level: str
    results: list

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def to_dict(self):
        return {
            "level": self.level,
            "passed": self.passed,
            "count": len(self.results),
            "failed": [r.name for r in self.results if not r.passed],
            "invariants": [asdict(r) for r in self.results],
        }


# 名称 -> (级别, 检验函数)
INVARIANTS = {}


def invariant(name, level=FAST):
    """注册一个不变量检验；函数返回 (残差, 容差[, 说明])"""
    def decorator(func):
        INVARIANTS[name] = (level, func)
        return func
    return decorator


def _hh_state(n, t, dynamics="HH"):
    spec = coupled_spec(dynamics, n)
    prop = build_propagator(spec)
    psi0 = product_state(coherent_state(n, (0.5, 0.5)), coherent_state(n, (0.3, 0.6)))
    return prop, psi0, evolve_state(psi0, prop, t)


@invariant("weyl_relation")
def check_weyl(rng):
    worst = 0.0
    for n in (4, 8):
        u, v = clock_operator(n), shift_operator(n)
        worst = max(worst, max_abs(u @ v - np.exp(2j * np.pi / n) * v @ u))
    return worst, 1e-10


@invariant("dft_diagonalizes_momentum")
def check_dft(rng):
    n = 8
    f = dft_matrix(n)
    return max_abs(f.conj().T @ momentum_operator(n) @ f + position_operator(n)), 1e-10


@invariant("partial_trace_positivity")
def check_partial_trace(rng):
    """200 个随机 ρ：偏迹保迹且最小本征值 ≥ −1e-10"""
    worst = 0.0
    for dims in ((2, 3), (3, 3), (4, 2)):
        for _ in range(200):
            rho = random_density_matrix(dims[0] * dims[1], rng)
            for keep in (1, 2):
                red = partial_trace(rho, dims, keep=keep)
                worst = max(worst, abs(np.trace(red).real - 1.0),
                            max(0.0, -float(np.linalg.eigvalsh(red)[0])))
    return worst, 1e-10


@invariant("unitarity_1d")
def check_unitarity_1d(rng):
    worst = 0.0
    for n in (4, 8, 16, 32, 64):
        for spec in (hyperbolic_spec(), elliptic_spec()):
            worst = max(worst, unitarity_residual(propagator_1d(spec, n)))
    return worst, 1e-8


@invariant("unitarity_2d")
def check_unitarity_2d(rng):
    worst = 0.0
    for n in (4, 8):
        for dynamics in ("EE", "HE", "HH"):
            worst = max(worst, unitarity_residual(build_propagator(coupled_spec(dynamics, n)).dense()))
    return worst, 1e-8


@invariant("unitarity_2d_structured", level=FULL)
def check_unitarity_2d_structured(rng):
    """n = 64：U1、U2 幺正且耦合相位模为 1 即可保证 U2D 幺正"""
    worst = 0.0
    for n in (16, 32, 64):
        prop = build_propagator(coupled_spec("HH", n))
        worst = max(worst, unitarity_residual(prop.u1), unitarity_residual(prop.u2),
                    max_abs(np.abs(prop.coupling) - 1.0))
    return worst, 1e-8


@invariant("structured_matches_dense")
def check_structured_dense(rng):
    """每个 n ∈ {4, 8, 16} 取 50 个随机目标（态矢量 + 算符）"""
    worst = 0.0
    for n in (4, 8, 16):
        prop = build_propagator(coupled_spec("HH", n))
        u = prop.dense()
        for i in range(50):
            psi = random_pure_state(n * n, rng)
            worst = max(worst, max_abs(prop.apply(psi) - u @ psi),
                        max_abs(prop.apply_adjoint(psi) - u.conj().T @ psi))
            if i % 10 == 0:
                a = random_hermitian(n * n, rng)
                worst = max(worst, max_abs(prop.conjugate(a) - u.conj().T @ a @ u))
    return worst, 1e-10


@invariant("zero_coupling_factorization")
def check_zero_coupling(rng):
    """Kc = 0：U2D = U1⊗U2，直积初态的 OTOC-RE 纯度保持为 1"""
    n = 8
    prop = build_propagator(coupled_spec("HH", n, kc=0.0))
    worst = max_abs(prop.dense() - np.kron(prop.u1, prop.u2))
    psi0 = product_state(coherent_state(n, (0.3, 0.6)), coherent_state(n, (0.2, 0.7)))
    for t in range(11):
        worst = max(worst, abs(otoc_re_sum(psi0, prop, t) - 1.0))
    return worst, 1e-9


@invariant("heisenberg_spectrum")
def check_heisenberg_spectrum(rng):
    n = 8
    prop = build_propagator(coupled_spec("HH", n))
    a = random_hermitian(n * n, rng)
    a_t = heisenberg_evolve(a, prop, 5)
    return max_abs(np.linalg.eigvalsh(a_t) - np.linalg.eigvalsh(a)), 1e-9


@invariant("coherent_translational_covariance")
def check_coherent_translation(rng):
    """n = 32：coherent_state((q0 + 1/n, p0)) 与 V·coherent_state((q0, p0)) 只差整体相位"""
    n = 32
    v = shift_operator(n)
    worst = 0.0
    for center in ((0.3, 0.6), (0.71, 0.15)):
        moved = coherent_state(n, (center[0] + 1.0 / n, center[1]))
        worst = max(worst, 1.0 - fidelity(moved, v @ coherent_state(n, center)))
    return worst, 1e-8


@invariant("coherent_minimal_uncertainty")
def check_coherent_uncertainty(rng):
    """n = 64，中心避开 sin 极值：位置与动量边缘分布方差之比在 [0.9, 1.1]"""
    n = 64
    worst = 0.0
    for center in ((0.3, 0.6), (0.1, 0.4), (0.6, 0.9)):
        var_q, var_p = marginal_variances(coherent_state(n, center), center)
        worst = max(worst, abs(var_q / var_p - 1.0))
    return worst, 0.1


@invariant("split_identity_random_pairs")
def check_split_random(rng):
    n = 8
    prop = build_propagator(coupled_spec("HH", n)).dense()
    worst = 0.0
    for i in range(50):
        a, b = random_hermitian(n * n, rng), random_hermitian(n * n, rng)
        t = i % 11
        a_t = heisenberg_evolve(a, prop, t)
        comm = a_t @ b - b @ a_t
        c = np.trace(comm @ comm.conj().T).real / (n * n)
        corr = correlators_2_4(a, b, prop, t, NORMALIZED_TRACE)
        worst = max(worst, abs(c - split_identity(corr.c2, corr.c4.real, corr.norm)))
    return worst, 1e-8


@invariant("split_identity_x2d_p2d")
def check_split_xp(rng):
    n = 8
    prop, psi0, _ = _hh_state(n, 0)
    worst = 0.0
    for b in (P2D, INITIAL_DENSITY):
        cfg = OtocConfig(X2D, b)
        for t in range(11):
            worst = max(worst, otoc_full(cfg, psi0, prop, t).split_residual)
    return worst, 1e-8


@invariant("otoc_vector_matches_dense")
def check_vector_dense(rng):
    n = 4
    prop, psi0, _ = _hh_state(n, 0)
    cfg = OtocConfig(X2D, P2D)
    worst = 0.0
    for t in (0, 1, 3, 6):
        fast = otoc_full(cfg, psi0, prop, t, path="vector")
        slow = otoc_full(cfg, psi0, prop, t, path="dense")
        worst = max(worst, abs(fast.c - slow.c), abs(fast.c2 - slow.c2))
    return worst, 1e-9


@invariant("otoc_re_theorem")
def check_otoc_re(rng):
    n = 8
    worst = 0.0
    for dynamics in ("EE", "HE", "HH"):
        prop, psi0, _ = _hh_state(n, 0, dynamics)
        for t in (0, 1, 2, 4, 8):
            rho1 = partial_trace_pure(evolve_state(psi0, prop, t), (n, n), keep=1)
            pur = purity(rho1)
            for method in ("vector", "dense"):
                total = otoc_re_sum(psi0, prop, t, method=method)
                worst = max(worst, abs(total - pur), abs(total - math.exp(-renyi2(rho1))))
    return worst, 1e-8


@invariant("entropy_identities")
def check_entropy_identities(rng):
    n = 8
    worst = 0.0
    for t in (0, 3, 7):
        _, _, psi = _hh_state(n, t)
        rho = np.outer(psi, psi.conj())
        rho1 = partial_trace(rho, (n, n), keep=1)
        rho2 = partial_trace(rho, (n, n), keep=2)
        worst = max(worst, abs(math.exp(-renyi2(rho1)) - purity(rho1)),
                    abs(von_neumann(rho1) - von_neumann(rho2)),
                    max(0.0, renyi2(rho1) - von_neumann(rho1)))
    return worst, 1e-9


@invariant("schmidt_parseval")
def check_parseval(rng):
    worst = 0.0
    for _ in range(5):
        rho = random_density_matrix(9, rng)
        spec = operator_schmidt(rho, (3, 3))
        worst = max(worst, abs(np.sum(spec.sigmas ** 2) - purity(rho)))
    return worst, 1e-10


@invariant("wse_pure_relation")
def check_wse_pure(rng):
    n = 8
    worst = 0.0
    for t in (1, 4, 9):
        _, _, psi = _hh_state(n, t)
        s_vn = von_neumann(partial_trace_pure(psi, (n, n), keep=1))
        full = wse(operator_schmidt(np.outer(psi, psi.conj()), (n, n)))
        worst = max(worst, abs(full - 2 * s_vn), abs(wse_pure_fast(psi, (n, n)) - full))
    return worst, 1e-9


@invariant("wse_pure_relation_large", level=FULL)
def check_wse_pure_large(rng):
    worst = 0.0
    _, _, psi = _hh_state(16, 6)
    s_vn = von_neumann(partial_trace_pure(psi, (16, 16), keep=1))
    worst = max(worst, abs(wse(operator_schmidt(np.outer(psi, psi.conj()), (16, 16))) - 2 * s_vn))
    _, _, psi = _hh_state(64, 10)
    s_vn = von_neumann(partial_trace_pure(psi, (64, 64), keep=1))
    worst = max(worst, abs(wse_pure_fast(psi, (64, 64)) - 2 * s_vn))
    return worst, 1e-9


@invariant("wigner_marginals")
def check_wigner_marginals(rng):
    n = 8
    psi = random_pure_state(n, rng)
    grid = wigner_grid_1d(psi, n)
    f = dft_matrix(n)
    worst = max(max_abs(grid.position_marginal() - np.abs(psi) ** 2),
                max_abs(grid.momentum_marginal() - np.abs(f.conj().T @ psi) ** 2),
                abs(grid.values.sum() - 1.0))
    return worst, 1e-8


@invariant("wigner_overlap")
def check_wigner_overlap(rng):
    n = 8
    worst = 0.0
    for _ in range(20):
        psi, phi = random_pure_state(n, rng), random_pure_state(n, rng)
        lhs = np.sum(wigner_grid_1d(psi, n).values * wigner_grid_1d(phi, n).values)
        worst = max(worst, abs(lhs - abs(np.vdot(psi, phi)) ** 2 / (2 * n)))
    return worst, 1e-8


@invariant("wigner_schmidt_crosscheck")
def check_wigner_crosscheck(rng):
    worst = wigner_schmidt_crosscheck(random_pure_state(16, rng), (4, 4)).max_deviation
    _, _, psi = _hh_state(8, 3)
    worst = max(worst, wigner_schmidt_crosscheck(psi, (8, 8)).max_deviation)
    return worst, 1e-6


@invariant("lyapunov_hyperbolic")
def check_lyapunov_fast(rng):
    est = lyapunov_estimate(MapSpec(HYPERBOLIC_MATRIX, 0.0), 1000)[0]
    return abs(est - math.log(2 + math.sqrt(3))), 1e-4


@invariant("lyapunov_hyperbolic_long", level=FULL)
def check_lyapunov_full(rng):
    est = lyapunov_estimate(MapSpec(HYPERBOLIC_MATRIX, 0.0), 10_000)[0]
    return abs(est - math.log(2 + math.sqrt(3))), 1e-4


@invariant("classical_area_preservation")
def check_area(rng):
    spec = coupled_spec("HH", 8)
    points = rng.random((100, 4))
    return max(abs(np.linalg.det(tangent_map_2d(p, spec)) - 1.0) for p in points), 1e-6


@invariant("classical_mod1_closure")
def check_closure(rng):
    """演化后的所有坐标都落在 [0, 1)"""
    points = evolve_ensemble(rng.random((2000, 4)), coupled_spec("HH", 8), 50)
    outside = np.count_nonzero((points < 0.0) | (points >= 1.0))
    return float(outside), 0.0


@invariant("trajectory_classification")
def check_classification(rng):
    """map_kind 与 trace² − 4 的符号一致；双曲映射 Lyapunov 指数为正，椭圆映射为零"""
    mismatches = 0
    for m in (((2, 1), (3, 2)), ((0, 1), (-1, 0)), ((1, 1), (-1, 0)), ((3, 1), (2, 1)),
              ((1, 2), (-1, -1)), ((5, 2), (2, 1))):
        spec = MapSpec(m, 0.0)
        mismatches += (map_kind(spec) == HYPERBOLIC) != (spec.trace ** 2 - 4 > 0)
    hyper = lyapunov_estimate(hyperbolic_spec(0.0), 1000)[0]
    ellip = lyapunov_estimate(elliptic_spec(0.0), 1000)[0]
    mismatches += not hyper > 1.0
    return float(mismatches) + abs(ellip), 1e-3


@invariant("cse_permutation_invariance")
def check_cse_permutation(rng):
    """对 (q1,p1) 格子与 (q2,p2) 格子分别置换，CSE 不变"""
    spec = coupled_spec("HH", 8)
    points = evolve_ensemble(gaussian_ensemble((0.3, 0.6, 0.2, 0.7), 8, 5000, rng), spec, 3)
    dist = coarse_distribution(points, 4)
    base = cse(dist)
    worst = 0.0
    side = dist.weights.shape[0]
    for _ in range(5):
        rows, cols = rng.permutation(side), rng.permutation(side)
        worst = max(worst, abs(cse(CoarseDistribution(dist.g, dist.weights[rows][:, cols])) - base))
    return worst, 1e-10


@invariant("ehrenfest_correspondence", level=FULL)
def check_ehrenfest(rng):
    """HH、n = 64：前 3 步 <sin 2πq1> 的量子值与经典系综平均相差不超过 0.1"""
    spec = coupled_spec("HH", 64)
    worst = max(ehrenfest_deviation(spec, (0.3, 0.6), (0.2, 0.7), t, 20000, rng)
                for t in (1, 2, 3))
    return worst, 0.1


@invariant("rmt_purity_haar", level=FULL)
def check_rmt(rng):
    n = 8
    samples = [purity(partial_trace_pure(random_pure_state(n * n, rng), (n, n), keep=1))
               for _ in range(400)]
    mean = float(np.mean(samples))
    err = float(np.std(samples) / math.sqrt(len(samples)))
    return abs(mean - rmt_saturation(n).purity_sat), 5 * err, f"Haar 平均 {mean:.6f}"


@invariant("global_phase_invariance")
def check_phase(rng):
    n = 4
    prop, psi0, _ = _hh_state(n, 0)
    cfg = OtocConfig(X2D, P2D)
    a = otoc_full(cfg, psi0, prop, 4).c
    b = otoc_full(cfg, psi0, prop.with_phase(0.7), 4).c
    return abs(a - b), 1e-10


@invariant("global_phase_invariance_entropies")
def check_phase_entropies(rng):
    """U 与 e^{iφ}U（φ = 0.7）给出相同的子系统熵"""
    n = 8
    prop, psi0, _ = _hh_state(n, 0)
    shifted = prop.with_phase(0.7)
    worst = 0.0
    for t in (1, 4, 9):
        rho_a = partial_trace_pure(evolve_state(psi0, prop, t), (n, n), keep=1)
        rho_b = partial_trace_pure(evolve_state(psi0, shifted, t), (n, n), keep=1)
        worst = max(worst, abs(von_neumann(rho_a) - von_neumann(rho_b)),
                    abs(linear_entropy(rho_a) - linear_entropy(rho_b)),
                    abs(renyi2(rho_a) - renyi2(rho_b)))
    return worst, 1e-10


def verify(level=FAST):
    """运行不变量套件；full 级别包含 fast 级别的全部检验"""
    if level not in LEVELS:
        raise ValueError(f"未知检验级别 {level!r}, 可选 {LEVELS}")
    results = []
    for name, (inv_level, func) in INVARIANTS.items():
        if inv_level == FULL and level == FAST:
            continue
        rng = np.random.default_rng(SEED)
        try:
            outcome = func(rng)
            residual, tol = float(outcome[0]), float(outcome[1])
            detail = outcome[2] if len(outcome) > 2 else ""
            passed = residual <= tol
        except Exception as e:
            logger.exception(f"[检验异常] {name}")
            residual, tol, detail, passed = float("nan"), float("nan"), f"{type(e).__name__}: {e}", False
        results.append(InvariantResult(name, inv_level, passed, residual, tol, detail))
        logger.info(f"[{'通过' if passed else '失败'}] {name}: {residual:.3e} (容差 {tol:.1e})")
    return VerifyReport(level=level, results=results)
