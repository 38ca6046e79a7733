"""
四个标准场景面板与 fig5 的 S_VN/S_L 对比数据，以及早期增长率拟合汇总。

拟合和相关系数只写入汇总，不作判定。
"""
import os
import math
import logging

import numpy as np
from joblib import Parallel, delayed
from scipy import stats

from config.constants import DEFAULT_N, DEFAULT_T_MAX, DEFAULT_SETTINGS, SUMMARY_FILE
from torus.entropy import rmt_saturation
from utils.file_utils import ensure_dir, write_csv, write_json
from .runner import run_scenario, write_scenario
from .scenario import ScenarioConfig

logger = logging.getLogger(__name__)

# 面板名 -> (动力学, 相干态中心)
FIGURE_SCENARIOS = {
    "fig1_ee_center": ("EE", (0.5, 0.5)),
    "fig2_ee_pi4": ("EE", (math.pi / 4, math.pi / 4)),
    "fig3_he_center": ("HE", (0.5, 0.5)),
    "fig4_hh_center": ("HH", (0.5, 0.5)),
}

FIT_COLUMNS = ("otoc_xp", "otoc_xrho", "s_linear")
# 低于此值视为舍入噪声，不参与对数拟合
FIT_FLOOR = 1e-12


def figure_configs(n=DEFAULT_N, t_max=DEFAULT_T_MAX):
    return {
        name: ScenarioConfig.from_mapping({
            "dynamics": dynamics, "n": n, "t_max": t_max,
            "center1": center, "center2": center, "otoc_b": "both",
        })
        for name, (dynamics, center) in FIGURE_SCENARIOS.items()
    }


def log_linear_fit(t, values, window):
    """ln(values) 对 t 在窗口 [t0, t1] 内的最小二乘直线；不超过 FIT_FLOOR 的值跳过"""
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    t0, t1 = window
    mask = (t >= t0) & (t <= t1) & (values > FIT_FLOOR) & np.isfinite(values)
    if np.count_nonzero(mask) < 3:
        return {"slope": None, "intercept": None, "r_squared": None, "points": int(mask.sum())}
    fit = stats.linregress(t[mask], np.log(values[mask]))
    return {
        "slope": float(fit.slope),
        "intercept": float(fit.intercept),
        "r_squared": float(fit.rvalue ** 2),
        "points": int(mask.sum()),
    }


def rescale_entropy(dynamics, s_vn, s_linear, n):
    """
    fig5 的 S_VN 缩放：混沌情形（HH/HE）按 RMT 饱和值之比缩放，
    EE 情形无饱和，按最大值对齐。
    """
    s_vn = np.asarray(s_vn, dtype=float)
    if dynamics in ("HH", "HE"):
        sat = rmt_saturation(n)
        return s_vn * (sat.s_l_sat / sat.s_vn_sat), "rmt_saturation_ratio"
    peak = float(np.max(s_vn))
    if peak == 0.0:
        return s_vn, "identity"
    return s_vn * (float(np.max(s_linear)) / peak), "max_normalization"


def _pearson(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    mask = np.isfinite(a) & np.isfinite(b)
    if np.count_nonzero(mask) < 3 or np.ptp(a[mask]) == 0 or np.ptp(b[mask]) == 0:
        return None
    return float(stats.pearsonr(a[mask], b[mask])[0])


def summarize(result, window):
    """单个场景的增长率拟合与现象学指标"""
    cfg = result.config
    t = result.column("t")
    s_linear = result.column("s_linear")
    late = t >= 10
    sat = rmt_saturation(cfg.n)
    return {
        "dynamics": cfg.dynamics,
        "center": list(cfg.center1.as_tuple()),
        "fits": {col: log_linear_fit(t, result.column(col), window) for col in FIT_COLUMNS},
        "fit_window": list(window),
        "pearson_otoc_xrho_rescaled_vs_s_linear": _pearson(result.column("otoc_xrho_rescaled"),
                                                           s_linear),
        "pearson_otoc_xp_rescaled_vs_s_linear": _pearson(result.column("otoc_xp_rescaled"),
                                                         s_linear),
        "s_linear_max": float(np.max(s_linear)),
        "s_linear_final": float(s_linear[-1]),
        "s_linear_mean_t_ge_10": float(np.mean(s_linear[late])) if late.any() else None,
        "s_linear_monotone": bool(np.all(np.diff(s_linear) >= 0)),
        "s_l_sat": sat.s_l_sat,
        "s_linear_final_over_sat": float(s_linear[-1] / sat.s_l_sat),
    }


def write_fig5(out_dir, name, result):
    cfg = result.config
    s_linear = result.column("s_linear")
    s_vn_scaled, method = rescale_entropy(cfg.dynamics, result.column("s_vn"), s_linear, cfg.n)
    rows = zip(result.column("t").astype(int), s_linear, s_vn_scaled)
    write_csv(os.path.join(out_dir, f"fig5_{name}.csv"), ["t", "s_linear", "s_vn_rescaled"], rows)
    return method


def run_figure_suite(out_dir, n=DEFAULT_N, t_max=DEFAULT_T_MAX,
                     fit_window=tuple(DEFAULT_SETTINGS["fit_window"]), n_jobs=1, settings=None):
    """运行四个标准场景，写出各面板数据、fig5 数据与汇总"""
    ensure_dir(out_dir)
    settings = {**(settings or DEFAULT_SETTINGS), "fit_window": list(fit_window)}
    configs = figure_configs(n, t_max)
    results = Parallel(n_jobs=n_jobs)(
        delayed(run_scenario)(cfg, settings) for cfg in configs.values())
    results = dict(zip(configs, results))

    summary = {"fit_window": list(fit_window), "scenarios": {}, "fig5_rescaling": {}}
    for name, result in results.items():
        write_scenario(result, os.path.join(out_dir, name))
        summary["fig5_rescaling"][name] = write_fig5(out_dir, name, result)
        summary["scenarios"][name] = summarize(result, fit_window)
        logger.info(f"[{name}] S_L max = {summary['scenarios'][name]['s_linear_max']:.4f}")
    write_json(os.path.join(out_dir, SUMMARY_FILE), summary)
    return results, summary
