"""日志工具"""
import logging

LOG_FORMAT = "[%(module)-12s] %(message)s"


def setup_logging(level="INFO"):
    """配置根日志（只在入口调用一次）"""
    if isinstance(level, str):
        level = getattr(logging, level.upper(), logging.INFO)
    logging.basicConfig(format=LOG_FORMAT, level=level, force=True)
    # numba 编译日志过于冗长
    logging.getLogger("numba").setLevel(logging.WARNING)
    return logging.getLogger()
