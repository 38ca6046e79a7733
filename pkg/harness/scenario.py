"""场景配置"""
import math
from dataclasses import dataclass, field, fields, asdict

from config.constants import (DEFAULT_K, DEFAULT_KC, DEFAULT_N, DEFAULT_T_MAX, DEFAULT_CENTER,
                              DEFAULT_SETTINGS)
from torus.catmap import DYNAMICS
from torus.errors import ConfigError, TorusError
from torus.hilbert import check_dim
from torus.states import PhasePoint

# OTOC 的 B 算符选择，键为接受的写法
OTOC_B_ALIASES = {
    "p2d": "p2d",
    "rho0": "rho0",
    "initial_density": "rho0",
    "both": "both",
}

OUTPUT_CHOICES = frozenset({
    "entropies", "otocs", "correlators", "wigner_dump", "schmidt_spectrum", "classical",
})
DEFAULT_OUTPUTS = frozenset({"entropies", "otocs", "correlators"})


@dataclass(frozen=True)
class ScenarioConfig:
    """一次时间序列实验的完整配置，未给出的字段取标准参数"""
    dynamics: str = "HH"
    n: int = DEFAULT_N
    k: float = DEFAULT_K
    kc: float = DEFAULT_KC
    center1: PhasePoint = field(default_factory=lambda: PhasePoint(*DEFAULT_CENTER))
    center2: PhasePoint = field(default_factory=lambda: PhasePoint(*DEFAULT_CENTER))
    t_max: int = DEFAULT_T_MAX
    otoc_b: str = "both"
    outputs: frozenset = DEFAULT_OUTPUTS
    # 经典系综（outputs 含 classical 时使用）
    classical_grid: int = 8
    classical_size: int = 20000
    seed: int = 0

    @classmethod
    def from_mapping(cls, mapping, max_n=DEFAULT_SETTINGS["max_hilbert_dim"]):
        """从扁平键值对象构造并校验；未知键报错"""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise ConfigError(f"未知配置项: {', '.join(unknown)}")
        try:
            cfg = cls(**{key: _PARSERS[key](value) for key, value in mapping.items()})
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(f"配置项取值非法: {e}") from e
        cfg.validate(max_n)
        return cfg

    def validate(self, max_n=DEFAULT_SETTINGS["max_hilbert_dim"]):
        if self.dynamics not in DYNAMICS:
            raise ConfigError(f"dynamics 必须是 {sorted(DYNAMICS)} 之一, 得到 {self.dynamics!r}")
        try:
            check_dim(self.n)
        except TorusError as e:
            raise ConfigError(str(e)) from e
        if self.n > max_n:
            raise ConfigError(f"n = {self.n} 超出上限 {max_n}")
        for name in ("k", "kc"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} 必须是有限实数")
        if self.t_max < 0:
            raise ConfigError(f"t_max 必须 ≥ 0, 得到 {self.t_max}")
        if self.otoc_b not in ("p2d", "rho0", "both"):
            raise ConfigError(f"otoc_b 非法: {self.otoc_b!r}")
        bad = sorted(set(self.outputs) - OUTPUT_CHOICES)
        if bad:
            raise ConfigError(f"未知输出类型: {', '.join(bad)}")
        if self.classical_grid < 2 or self.classical_size < 1:
            raise ConfigError("classical_grid 必须 ≥ 2 且 classical_size ≥ 1")
        return self

    @property
    def wants_p2d(self):
        return self.otoc_b in ("p2d", "both")

    @property
    def wants_rho0(self):
        return self.otoc_b in ("rho0", "both")

    def to_dict(self):
        """完全解析后的配置（含默认值），可直接写成 JSON"""
        data = asdict(self)
        data["center1"] = list(self.center1.as_tuple())
        data["center2"] = list(self.center2.as_tuple())
        data["outputs"] = sorted(self.outputs)
        return data

    def label(self):
        return f"{self.dynamics}_n{self.n}_c{self.center1.q:.4f}-{self.center1.p:.4f}"


def _parse_int(value):
    if isinstance(value, bool) or float(value) != int(float(value)):
        raise ValueError(f"需要整数, 得到 {value!r}")
    return int(float(value))


def _parse_outputs(value):
    if isinstance(value, str):
        value = [s.strip() for s in value.split(",") if s.strip()]
    return frozenset(str(v).lower() for v in value)


def _parse_otoc_b(value):
    key = str(value).lower()
    if key not in OTOC_B_ALIASES:
        raise ConfigError(f"otoc_b 必须是 {sorted(OTOC_B_ALIASES)} 之一, 得到 {value!r}")
    return OTOC_B_ALIASES[key]


_PARSERS = {
    "dynamics": lambda v: str(v).upper(),
    "n": _parse_int,
    "k": float,
    "kc": float,
    "center1": PhasePoint.parse,
    "center2": PhasePoint.parse,
    "t_max": _parse_int,
    "otoc_b": _parse_otoc_b,
    "outputs": _parse_outputs,
    "classical_grid": _parse_int,
    "classical_size": _parse_int,
    "seed": _parse_int,
}
