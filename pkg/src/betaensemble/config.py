"""Run configuration: one JSON document, with command-line overrides."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from .errors import ConfigError
from .spectral import Potential

_FORMATS = ("csv", "json")


@dataclass
class RunConfig:
    t1: float = 0.0
    t2: float = 1.0
    t3: float = 0.0
    t4: float = 4.0
    t0: float = 1.0
    beta: float = 1.0
    n_eigen: int = 50
    max_twice_g: int = 1
    grid: int = 512
    sweeps: int = 100_000
    burn_in: int = 2_000
    chains: int = 1
    seed: int = 0
    bins: int = 60
    theta_bins: int = 20
    step_scale: float = 0.5
    output_dir: str = "out"
    format: str = "csv"
    # each entry is one argument tuple (z1, z2, ...) as complex literals
    points: list = field(default_factory=lambda: [["2"]])

    def __post_init__(self):
        for f in fields(self):
            setattr(self, f.name, _coerce(f.name, f.type, getattr(self, f.name)))
        if not self.t0 > 0:
            raise ConfigError("t0", "must be > 0")
        if not self.beta > 0:
            raise ConfigError("beta", "must be > 0")
        if self.n_eigen < 2:
            raise ConfigError("n_eigen", "must be >= 2")
        if not 0 <= self.max_twice_g <= 4:
            raise ConfigError("max_twice_g", "must be in 0..4")
        if self.grid < 16:
            raise ConfigError("grid", "must be >= 16")
        if self.format not in _FORMATS:
            raise ConfigError("format", f"must be one of {_FORMATS}")
        for name in ("sweeps", "chains", "bins", "theta_bins"):
            if getattr(self, name) < 1:
                raise ConfigError(name, "must be >= 1")
        if not 0 <= self.burn_in < self.sweeps:
            raise ConfigError("burn_in", "need 0 <= burn_in < sweeps")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be a non-negative 64-bit integer")
        if not self.step_scale > 0:
            raise ConfigError("step_scale", "must be > 0")

    def potential(self):
        try:
            return Potential(t1=self.t1, t2=self.t2, t3=self.t3, t4=self.t4, t0=self.t0)
        except ValueError as exc:
            raise ConfigError("potential", str(exc)) from None

    def point_tuples(self):
        out = []
        for entry in self.points:
            try:
                out.append(tuple(complex(str(p).replace(" ", "")) for p in entry))
            except ValueError:
                raise ConfigError("points", f"not a complex literal in {entry!r}") from None
        return out

    def to_dict(self):
        return asdict(self)


def _coerce(name, typ, value):
    typ = typ if isinstance(typ, str) else typ.__name__
    if typ == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(name, f"expected a number, got {value!r}")
        return float(value)
    if typ == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                return int(value)
            raise ConfigError(name, f"expected an integer, got {value!r}")
        return value
    if typ == "str":
        if not isinstance(value, str):
            raise ConfigError(name, f"expected a string, got {value!r}")
        return value
    if typ == "list":
        if not isinstance(value, list) or not all(isinstance(e, list) and e for e in value):
            raise ConfigError(name, "expected a list of non-empty point lists")
        return value
    raise ConfigError(name, f"unsupported field type {typ}")


def field_names():
    return [f.name for f in fields(RunConfig)]


def load_config(path=None, overrides=None):
    """Build a :class:`RunConfig` from an optional JSON file plus overrides."""
    data = {}
    if path is not None:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON: {exc.msg} at line {exc.lineno}") from None
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be an object")
    known = set(field_names())
    for key in data:
        if key not in known:
            raise ConfigError(key, "unknown configuration key")
    data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return RunConfig(**data)
