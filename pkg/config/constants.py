"""常量定义"""

# 配置文件名
SETTINGS_FILE = "settings.json"
CONFIG_ECHO_FILE = "config.json"
METADATA_FILE = "metadata.json"
TIMESERIES_FILE = "timeseries.csv"
SCHMIDT_FILE = "schmidt_spectrum.csv"
CLASSICAL_FILE = "classical_cse.csv"
SUMMARY_FILE = "summary.json"
VERIFY_REPORT_FILE = "verify_report.json"
SWEEP_REPORT_FILE = "sweep_report.json"

# 默认运行设置
DEFAULT_SETTINGS = {
    "verify_operators": False,
    "max_hilbert_dim": 128,
    "wigner_max_n": 8,
    "threads": 1,
    "log_level": "INFO",
    # 早期窗口止于饱和之前：n = 64 的 HH 场景在 t ≈ 2 已饱和
    "fit_window": [0, 2],
}

# 标准场景参数
DEFAULT_K = 0.25
DEFAULT_KC = 0.5
DEFAULT_N = 2 ** 6
DEFAULT_T_MAX = 50
DEFAULT_CENTER = (0.5, 0.5)

HYPERBOLIC_MATRIX = ((2, 1), (3, 2))
ELLIPTIC_MATRIX = ((0, 1), (-1, 0))

# 数值容差
PROPERTY_TOL = 1e-10
NORM_TOL = 1e-12
PROPAGATOR_TOL = 1e-8
SPLIT_IDENTITY_TOL = 1e-8
EIGEN_CLIP_TOL = 1e-10
SCHMIDT_DROP_TOL = 1e-14
WIGNER_IMAG_TOL = 1e-9

# 相干态周期化窗口
COHERENT_IMAGE_WINDOW = 3
COHERENT_MIN_N = 8

# 切线映射再正交化间隔
LYAPUNOV_REORTH_EVERY = 10
LYAPUNOV_TRANSIENT = 100

# 输出约定
FLOAT_FORMAT = ".17g"
LIBRARY_VERSION = "0.1.0"
DFT_CONVENTION = "<q_j|p_k> = exp(+2*pi*i*j*k/n)/sqrt(n)"
WIGNER_CONVENTION = "doubled-lattice-midpoint/v1"
CSE_CONVENTION = "svd-entropy-of-subsystem-partitioned-histogram/v1"
ENTROPY_UNITS = "nats"

# 退出码
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3
