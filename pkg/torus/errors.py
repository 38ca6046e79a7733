"""异常定义"""


class TorusError(Exception):
    """所有环面量子化相关错误的基类"""


class InvalidDimensionError(TorusError, ValueError):
    """希尔伯特空间维数非法（n < 2 或超出上限）"""


class DimensionMismatchError(TorusError, ValueError):
    """算符/态的维数彼此不一致"""


class InvalidSpecError(TorusError, ValueError):
    """映射规格非法（非幺模矩阵、抛物型等）"""


class UnsupportedMapError(InvalidSpecError):
    """传播子公式不适用（M12 = 0）"""


class NonNormalizedStateError(TorusError, ValueError):
    """态矢量未归一化"""


class NonPureStateError(TorusError, ValueError):
    """要求纯态但输入的密度矩阵不是纯态"""


class IncompleteBasisError(TorusError, ValueError):
    """算符基不完备"""


class ZeroSeriesError(TorusError, ValueError):
    """待缩放的序列恒为零"""


class ConfigError(TorusError, ValueError):
    """配置错误"""


class NumericalHealthError(TorusError, ArithmeticError):
    """数值健康检查失败"""


class BudgetExceededError(TorusError, RuntimeError):
    """稠密构造超出内存或维数预算"""
