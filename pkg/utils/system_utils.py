"""系统相关工具"""
import logging
import platform

import psutil

from torus.errors import BudgetExceededError

logger = logging.getLogger(__name__)

# 稠密构造最多占用可用内存的比例
MEMORY_FRACTION = 0.5


def default_thread_count():
    """默认并行数：物理核心数，取不到时退回逻辑核心数"""
    count = psutil.cpu_count(logical=False) or psutil.cpu_count(logical=True)
    return max(1, count or 1)


def check_memory_budget(nbytes, what):
    """检查一次稠密构造是否超出可用内存预算"""
    available = psutil.virtual_memory().available
    if nbytes > MEMORY_FRACTION * available:
        raise BudgetExceededError(
            f"{what} 需要 {nbytes / 2**20:.1f} MiB，超出可用内存预算 "
            f"({MEMORY_FRACTION * available / 2**20:.1f} MiB)")
    return nbytes


def complex_matrix_bytes(rows, cols):
    """complex128 矩阵的字节数"""
    return int(rows) * int(cols) * 16


def describe_host():
    """主机信息，只写日志；输出文件保持与主机无关"""
    mem = psutil.virtual_memory()
    info = {
        "python": platform.python_version(),
        "platform": platform.platform(),
        "physical_cpus": psutil.cpu_count(logical=False),
        "logical_cpus": psutil.cpu_count(logical=True),
        "memory_total_mib": round(mem.total / 2**20),
    }
    logger.debug(f"[主机] {info}")
    return info
