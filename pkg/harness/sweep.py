"""参数扫描：每组覆盖项一个子目录，单组失败不影响其余"""
import os
import logging

from joblib import Parallel, delayed

from config.constants import SWEEP_REPORT_FILE, DEFAULT_SETTINGS
from utils.file_utils import ensure_dir, write_json
from .runner import run_scenario, write_scenario
from .scenario import ScenarioConfig

logger = logging.getLogger(__name__)


def _run_one(index, overrides, base, out_dir, settings):
    target = os.path.join(out_dir, f"config_{index:03d}")
    try:
        max_n = (settings or DEFAULT_SETTINGS).get("max_hilbert_dim",
                                                   DEFAULT_SETTINGS["max_hilbert_dim"])
        cfg = ScenarioConfig.from_mapping({**base, **overrides}, max_n=max_n)
        write_scenario(run_scenario(cfg, settings), target)
        return {"index": index, "overrides": overrides, "status": "ok", "dir": target}
    except Exception as e:
        # 单组失败（配置、数值或 I/O）只记入报告，其余组继续
        logger.exception(f"[扫描失败] #{index} {overrides}: {e}")
        return {"index": index, "overrides": overrides, "status": "failed",
                "error": f"{type(e).__name__}: {e}"}


def sweep(grid, out_dir, base=None, n_jobs=1, settings=None):
    """依次（或并行）运行 grid 中的每组覆盖项，写出扫描报告"""
    ensure_dir(out_dir)
    base = dict(base or {})
    entries = Parallel(n_jobs=n_jobs)(
        delayed(_run_one)(i, dict(overrides), base, out_dir, settings)
        for i, overrides in enumerate(grid))
    report = {
        "count": len(entries),
        "failed": sum(1 for e in entries if e["status"] != "ok"),
        "entries": entries,
    }
    write_json(os.path.join(out_dir, SWEEP_REPORT_FILE), report)
    return report
