"""
torus-otoc - 耦合微扰猫映射的 OTOC 与纠缠实验
主入口文件
"""
import os
import sys

# BLAS 固定单线程，保证归约顺序与输出逐字节可复现（必须在导入 numpy 之前设置）
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

from harness.cli import main  # noqa: E402


if __name__ == "__main__":
    sys.exit(main())
