"""
单场景时间序列实验

结构化传播子只构造一次，直积相干态逐步演化，每个 t ∈ [0, t_max] 输出一行记录。
写出前逐行检查 OTOC 拆分恒等式与熵的交叉恒等式。
"""
import os
import math
import logging
from dataclasses import dataclass, field, fields, astuple, replace

import numpy as np
from scipy import linalg

from config.constants import (CONFIG_ECHO_FILE, METADATA_FILE, TIMESERIES_FILE, SCHMIDT_FILE,
                              CLASSICAL_FILE, DEFAULT_SETTINGS, DFT_CONVENTION,
                              WIGNER_CONVENTION, CSE_CONVENTION, ENTROPY_UNITS, LIBRARY_VERSION)
from torus.catmap import coupled_spec, build_propagator, map_kind
from torus.classical import cse_series
from torus.entropy import entropy_sample, von_neumann, rmt_saturation
from torus.errors import NumericalHealthError, ZeroSeriesError
from torus.hilbert import partial_trace_pure
from torus.otoc import (OtocConfig, otoc_time_series, rescale_factor, X2D, P2D, INITIAL_DENSITY,
                        STATE_EXPECTATION)
from torus.states import coherent_state, product_state
from torus.wigner import wse_pure_fast, wigner_grid_1d
from utils.file_utils import ensure_dir, write_csv, write_json, write_matrix

logger = logging.getLogger(__name__)

NAN = float("nan")

# outputs 不含 entropies 时置为 NaN 的列（仍在内部计算，用于逐行检查与缩放）
ENTROPY_COLUMNS = ("s_linear", "s_vn", "s_renyi2", "wse")

# 逐行交叉恒等式的容差
RENYI_PURITY_TOL = 1e-12
MARGINAL_SYMMETRY_TOL = 1e-9
WSE_RELATION_TOL = 1e-9


@dataclass(frozen=True)
class TimeSeriesRecord:
    """时间序列的一行，列名即字段名"""
    t: int
    s_linear: float
    s_vn: float
    s_renyi2: float
    otoc_xp: float
    otoc_xrho: float
    c2: float
    c4_real: float
    c4_imag: float
    otoc_xp_rescaled: float
    otoc_xrho_rescaled: float
    wse: float

    @classmethod
    def header(cls):
        return [f.name for f in fields(cls)]


@dataclass
class ScenarioResult:
    config: object
    records: list
    metadata: dict
    schmidt_rows: list = field(default_factory=list)
    wigner_grids: dict = field(default_factory=dict)
    classical: list = field(default_factory=list)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records], dtype=float)


def check_record(record, s_vn_2):
    """逐行健康检查：exp(−S2) = Tr ρ1²、S2 ≤ S_VN、S(ρ1) = S(ρ2)、WSE = 2·S_VN"""
    t = record.t
    purity = 1.0 - record.s_linear
    if not abs(math.exp(-record.s_renyi2) - purity) <= RENYI_PURITY_TOL:
        raise NumericalHealthError(f"t={t}: exp(−S2) 与纯度不一致")
    if not record.s_renyi2 <= record.s_vn + RENYI_PURITY_TOL:
        raise NumericalHealthError(f"t={t}: S2 = {record.s_renyi2} > S_VN = {record.s_vn}")
    if not abs(record.s_vn - s_vn_2) <= MARGINAL_SYMMETRY_TOL:
        raise NumericalHealthError(f"t={t}: S(ρ1) − S(ρ2) = {record.s_vn - s_vn_2:.3e}")
    if not abs(record.wse - 2.0 * record.s_vn) <= WSE_RELATION_TOL:
        raise NumericalHealthError(f"t={t}: WSE − 2·S_VN = {record.wse - 2 * record.s_vn:.3e}")
    return record


def _safe_rescale(series, reference, what):
    series = np.asarray(series, dtype=float)
    if np.all(np.isnan(series)):
        return NAN
    try:
        return rescale_factor(series, reference)
    except ZeroSeriesError:
        logger.warning(f"[缩放跳过] {what} 序列恒为零")
        return NAN


def run_scenario(cfg, settings=None):
    """运行单个场景，返回记录与元数据（不写文件）"""
    settings = settings or DEFAULT_SETTINGS
    n = cfg.n
    dims = (n, n)
    spec = coupled_spec(cfg.dynamics, n, cfg.k, cfg.kc)
    prop = build_propagator(spec, verify=settings.get("verify_operators", False),
                            max_n=settings.get("max_hilbert_dim", DEFAULT_SETTINGS["max_hilbert_dim"]))
    psi0 = product_state(coherent_state(n, cfg.center1), coherent_state(n, cfg.center2))
    logger.info(f"[场景] {cfg.dynamics} n={n} K={cfg.k} Kc={cfg.kc} "
                f"center1={cfg.center1.as_tuple()} t_max={cfg.t_max}")

    want_otoc = "otocs" in cfg.outputs or "correlators" in cfg.outputs
    xp = otoc_time_series(OtocConfig(X2D, P2D, STATE_EXPECTATION), psi0, prop, cfg.t_max) \
        if want_otoc and cfg.wants_p2d else None
    xrho = otoc_time_series(OtocConfig(X2D, INITIAL_DENSITY, STATE_EXPECTATION), psi0, prop,
                            cfg.t_max) if want_otoc and cfg.wants_rho0 else None
    # c2/c4 列优先取 (X2D, P2D)，只算 ρ0 时取 (X2D, ρ0)
    corr = xp if xp is not None else xrho

    rows = []
    schmidt_rows = []
    wigner_grids = {}
    psi = psi0
    for t in range(cfg.t_max + 1):
        if t > 0:
            psi = prop.apply(psi)
        rho1 = partial_trace_pure(psi, dims, keep=1)
        ent = entropy_sample(t, rho1)
        s_vn_2 = von_neumann(partial_trace_pure(psi, dims, keep=2))
        show_otoc = "otocs" in cfg.outputs
        show_corr = "correlators" in cfg.outputs and corr is not None
        rows.append(dict(
            t=t,
            s_linear=ent.s_linear,
            s_vn=ent.s_vn,
            s_renyi2=ent.s_renyi2,
            otoc_xp=xp[t].c if show_otoc and xp is not None else NAN,
            otoc_xrho=xrho[t].c if show_otoc and xrho is not None else NAN,
            c2=corr[t].c2 if show_corr else NAN,
            c4_real=corr[t].c4_real if show_corr else NAN,
            c4_imag=corr[t].c4_imag if show_corr else NAN,
            wse=wse_pure_fast(psi, dims),
            s_vn_2=s_vn_2,
        ))
        if "schmidt_spectrum" in cfg.outputs:
            schmidt_rows.append([t, *linalg.svdvals(psi.reshape(n, n))])
        if "wigner_dump" in cfg.outputs and t in (0, cfg.t_max):
            wigner_grids[t] = wigner_grid_1d(rho1, n)

    s_linear = np.array([r["s_linear"] for r in rows])
    alpha_xp = _safe_rescale([r["otoc_xp"] for r in rows], s_linear, "otoc_xp")
    alpha_xrho = _safe_rescale([r["otoc_xrho"] for r in rows], s_linear, "otoc_xrho")
    records = []
    for r in rows:
        s_vn_2 = r.pop("s_vn_2")
        record = TimeSeriesRecord(
            otoc_xp_rescaled=alpha_xp * r["otoc_xp"],
            otoc_xrho_rescaled=alpha_xrho * r["otoc_xrho"],
            **r,
        )
        record = check_record(record, s_vn_2)
        if "entropies" not in cfg.outputs:
            record = replace(record, **dict.fromkeys(ENTROPY_COLUMNS, NAN))
        records.append(record)

    classical = []
    if "classical" in cfg.outputs:
        center = (*cfg.center1.as_tuple(), *cfg.center2.as_tuple())
        classical = cse_series(spec, center, cfg.t_max, cfg.classical_grid, cfg.classical_size,
                               np.random.default_rng(cfg.seed))

    sat = rmt_saturation(n)
    metadata = {
        "library_version": LIBRARY_VERSION,
        "dft_convention": DFT_CONVENTION,
        "wigner_convention": WIGNER_CONVENTION,
        "cse_convention": CSE_CONVENTION,
        "entropy_units": ENTROPY_UNITS,
        "map_kinds": [map_kind(spec.spec1), map_kind(spec.spec2)],
        "average": STATE_EXPECTATION,
        "correlator_pair": "X2D,P2D" if xp is not None else ("X2D,rho0" if xrho is not None else None),
        "fit_window": list(settings.get("fit_window", DEFAULT_SETTINGS["fit_window"])),
        "rescaling": {
            "method": "least-squares scalar against s_linear, clipped at 0",
            "alpha_otoc_xp": alpha_xp,
            "alpha_otoc_xrho": alpha_xrho,
        },
        "rmt_saturation": {
            "purity": sat.purity_sat,
            "s_linear": sat.s_l_sat,
            "s_vn": sat.s_vn_sat,
            "provenance": sat.provenance,
        },
        "schmidt_spectrum": "state Schmidt coefficients lambda_i; operator-Schmidt values are lambda_i*lambda_j",
    }
    return ScenarioResult(config=cfg, records=records, metadata=metadata,
                          schmidt_rows=schmidt_rows, wigner_grids=wigner_grids,
                          classical=classical)


def write_scenario(result, out_dir):
    """写出配置回显、元数据、时间序列与可选输出"""
    ensure_dir(out_dir)
    cfg = result.config
    write_json(os.path.join(out_dir, CONFIG_ECHO_FILE), cfg.to_dict())
    write_json(os.path.join(out_dir, METADATA_FILE), result.metadata)
    write_csv(os.path.join(out_dir, TIMESERIES_FILE), TimeSeriesRecord.header(),
              (astuple(r) for r in result.records))
    if result.schmidt_rows:
        header = ["t"] + [f"lambda_{i}" for i in range(cfg.n)]
        write_csv(os.path.join(out_dir, SCHMIDT_FILE), header, result.schmidt_rows)
    for t, grid in sorted(result.wigner_grids.items()):
        write_matrix(os.path.join(out_dir, f"wigner_rho1_t{t}.txt"), grid.values,
                     {**grid.metadata(), "t": t, "subsystem": 1})
    if result.classical:
        write_csv(os.path.join(out_dir, CLASSICAL_FILE), ["t", "cse"],
                  ([s.t, s.cse] for s in result.classical))
    logger.info(f"[输出] {out_dir}")
    return out_dir
