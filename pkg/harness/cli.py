"""
命令行入口

子命令：run（单场景）、figures（四个标准场景）、verify（不变量套件）、sweep（参数扫描）。
退出码：0 成功，1 用法/配置错误，2 数值健康检查失败或超出预算，3 检验失败。
"""
import os
import sys
import json
import argparse
import logging

import numba

from config.constants import (EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_VERIFY, DEFAULT_N,
                              DEFAULT_T_MAX, VERIFY_REPORT_FILE, SETTINGS_FILE)
from config.settings import load_config, load_settings
from torus.errors import ConfigError, NumericalHealthError, BudgetExceededError, TorusError
from utils.file_utils import ensure_dir, write_json
from utils.log_utils import setup_logging
from utils.system_utils import describe_host, default_thread_count
from .figures import run_figure_suite
from .runner import run_scenario, write_scenario
from .scenario import ScenarioConfig
from .sweep import sweep
from .verify import verify, LEVELS, FAST

logger = logging.getLogger(__name__)

# 命令行参数名 -> 配置项
FLAG_KEYS = {
    "dynamics": "dynamics",
    "n": "n",
    "k": "k",
    "kc": "kc",
    "center1": "center1",
    "center2": "center2",
    "tmax": "t_max",
    "otoc_b": "otoc_b",
}


class _Parser(argparse.ArgumentParser):
    """用法错误统一返回退出码 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: 错误: {message}\n")


def _add_scenario_flags(p):
    p.add_argument("--config", help="扁平 JSON 场景配置文件")
    p.add_argument("--dynamics", type=str.upper, choices=["EE", "HE", "HH"])
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=float)
    p.add_argument("--kc", type=float)
    p.add_argument("--center1", metavar="q,p")
    p.add_argument("--center2", metavar="q,p")
    p.add_argument("--tmax", type=int)
    p.add_argument("--otoc-b", dest="otoc_b", choices=["p2d", "rho0", "both"])


def build_parser():
    parser = _Parser(prog="torus", description="耦合微扰猫映射：OTOC、纠缠熵与可分离熵")
    parser.add_argument("--settings", default=SETTINGS_FILE, help="运行设置 JSON")
    parser.add_argument("--threads", type=int, help="并行进程/线程数")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_run = sub.add_parser("run", help="运行单个场景")
    _add_scenario_flags(p_run)
    p_run.add_argument("--out", required=True)

    p_fig = sub.add_parser("figures", help="运行四个标准场景")
    p_fig.add_argument("--out", required=True)
    p_fig.add_argument("--n", type=int, default=DEFAULT_N)
    p_fig.add_argument("--tmax", type=int, default=DEFAULT_T_MAX)

    p_verify = sub.add_parser("verify", help="运行不变量检验")
    p_verify.add_argument("--level", choices=LEVELS, default=FAST)
    p_verify.add_argument("--out", help="报告输出目录")

    p_sweep = sub.add_parser("sweep", help="参数扫描")
    _add_scenario_flags(p_sweep)
    p_sweep.add_argument("--grid", required=True, help="覆盖项列表（JSON 数组）")
    p_sweep.add_argument("--out", required=True)

    # 子命令之后也接受 --threads
    for p in (p_run, p_fig, p_verify, p_sweep):
        p.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    return parser


def resolve_mapping(args):
    """配置文件为底，命令行参数覆盖"""
    mapping = load_config(args.config) if args.config else {}
    for flag, key in FLAG_KEYS.items():
        value = getattr(args, flag, None)
        if value is not None:
            mapping[key] = value
    return mapping


def _load_grid(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            grid = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"扫描网格无法读取: {path}: {e}") from e
    if not isinstance(grid, list) or not all(isinstance(g, dict) for g in grid):
        raise ConfigError("扫描网格必须是对象数组")
    return grid


def _cmd_run(args, settings):
    cfg = ScenarioConfig.from_mapping(resolve_mapping(args), max_n=settings["max_hilbert_dim"])
    write_scenario(run_scenario(cfg, settings), args.out)
    return EXIT_OK


def _cmd_figures(args, settings):
    run_figure_suite(args.out, n=args.n, t_max=args.tmax, fit_window=tuple(settings["fit_window"]),
                     n_jobs=settings["threads"], settings=settings)
    return EXIT_OK


def _cmd_verify(args, settings):
    report = verify(args.level)
    if args.out:
        ensure_dir(args.out)
        write_json(os.path.join(args.out, VERIFY_REPORT_FILE), report.to_dict())
    else:
        json.dump(report.to_dict(), sys.stdout, indent=2, sort_keys=True, default=str)
        sys.stdout.write("\n")
    return EXIT_OK if report.passed else EXIT_VERIFY


def _cmd_sweep(args, settings):
    report = sweep(_load_grid(args.grid), args.out, base=resolve_mapping(args),
                   n_jobs=settings["threads"], settings=settings)
    return EXIT_OK if report["failed"] == 0 else EXIT_NUMERICAL


COMMANDS = {
    "run": _cmd_run,
    "figures": _cmd_figures,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    settings = load_settings(args.settings)
    if args.threads is not None:
        if args.threads < 1:
            print("[参数错误] --threads 必须 ≥ 1", file=sys.stderr)
            return EXIT_USAGE
        settings["threads"] = args.threads
    # threads 设为 null 时按物理核心数
    settings["threads"] = settings.get("threads") or default_thread_count()
    setup_logging(settings["log_level"])
    numba.set_num_threads(min(settings["threads"], numba.config.NUMBA_NUM_THREADS))
    describe_host()
    try:
        return COMMANDS[args.command](args, settings)
    except ConfigError as e:
        logger.error(f"[配置错误] {e}")
        return EXIT_USAGE
    except (NumericalHealthError, BudgetExceededError) as e:
        logger.error(f"[数值检查失败] {e}")
        return EXIT_NUMERICAL
    except TorusError as e:
        logger.error(f"[参数错误] {e}")
        return EXIT_USAGE
