"""INI experiment configuration: sections [model], [sim], [quad], [experiment].

Every field has a default matching the baseline experiment, and
``to_ini`` writes all of them explicitly so a parse/serialise round trip is
lossless.
"""

import configparser
import hashlib
import io
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .analytics import ModelParams
from .engine import Scheme, SimConfig
from .errors import ConfigError, HarvestError
from .levy import LevyParams
from .quadrature import QuadratureConfig
from .sampler import SmallJumpMode

FORMATS = ("csv", "json", "svg")


@dataclass(frozen=True)
class ExperimentSettings:
    n_paths: int = 100
    output_dir: str = "results"
    formats: tuple = FORMATS
    threads: int = 0
    table1_h: str = "0.22, 0.75, 1.12, 1.65"
    h_max: float = 1.9
    n_points: int = 191
    yield_scatter: bool = True
    tau2_grid: str = "lin:0:1:41"
    sigma_grid: str = "lin:0:2:81"
    beta_grid: str = "lin:0.05:1.95:40"
    lambda_grid: str = "lin:0.1:3.9:40"
    stability_x0: str = "0.5, 1, 5, 10"
    stability_paths: int = 200
    coupling_pairs: int = 50
    coupling_horizon: float = 500.0
    coupling_scheme: str = "LogExact"
    validate_increments: int = 1_000_000


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelParams = field(default_factory=ModelParams)
    sim: SimConfig = field(default_factory=SimConfig)
    quad: QuadratureConfig = field(default_factory=QuadratureConfig)
    experiment: ExperimentSettings = field(default_factory=ExperimentSettings)

    def __post_init__(self):
        for name in ("beta_grid", "lambda_grid"):
            values = parse_grid(getattr(self.experiment, name))
            if name == "beta_grid" and (values.min() <= 0 or values.max() >= 2):
                raise ConfigError("beta grid must lie inside (0, 2)")
            if name == "lambda_grid" and values.min() <= 0:
                raise ConfigError("lambda grid must be positive")
        if self.experiment.n_paths < 1:
            raise ConfigError("n_paths must be >= 1")
        bad = set(self.experiment.formats) - set(FORMATS)
        if bad:
            raise ConfigError(f"unknown output formats: {sorted(bad)}")


def parse_grid(spec):
    """``lin:start:stop:n``, ``geom:start:stop:n`` or a comma-separated list."""
    spec = spec.strip()
    try:
        if spec.startswith(("lin:", "geom:")):
            kind, start, stop, n = spec.split(":")
            start, stop, n = float(start), float(stop), int(n)
            if n < 1:
                raise ValueError("grid needs at least one point")
            if kind == "lin":
                return np.linspace(start, stop, n)
            if start <= 0 or stop <= 0:
                raise ValueError("geometric grid needs positive bounds")
            return np.geomspace(start, stop, n)
        return np.array([float(v) for v in spec.split(",") if v.strip()])
    except ValueError as exc:
        raise ConfigError(f"bad grid spec {spec!r}: {exc}") from None


def parse_list(spec):
    return [float(v) for v in parse_grid(spec)]


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ",".join(value)
    if value is None:
        return "auto"
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def _section_dicts(cfg):
    model = {
        "a": cfg.model.a, "b": cfg.model.b, "h": cfg.model.h,
        "tau2": cfg.model.tau2, "sigma": cfg.model.sigma,
        "beta": cfg.model.levy.beta, "lambda": cfg.model.levy.lam,
    }
    return {
        "model": model,
        "sim": {f.name: getattr(cfg.sim, f.name) for f in fields(SimConfig)},
        "quad": {f.name: getattr(cfg.quad, f.name) for f in fields(QuadratureConfig)},
        "experiment": {f.name: getattr(cfg.experiment, f.name) for f in fields(ExperimentSettings)},
    }


def to_ini(cfg):
    parser = configparser.ConfigParser()
    for section, values in _section_dicts(cfg).items():
        parser[section] = {k: _fmt(v) for k, v in values.items()}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


def to_dict(cfg):
    """JSON-friendly echo of every field."""
    out = {}
    for section, values in _section_dicts(cfg).items():
        out[section] = {k: (v.value if hasattr(v, "value") else list(v) if isinstance(v, tuple) else v)
                        for k, v in values.items()}
    return out


# execution settings that cannot change any result
_UNHASHED = {"threads": 0, "output_dir": "results"}


def config_hash(cfg):
    """Short digest of every result-relevant field."""
    neutral = replace(cfg, experiment=replace(cfg.experiment, **_UNHASHED))
    return hashlib.sha256(to_ini(neutral).encode()).hexdigest()[:16]


def _convert(kind, raw, name):
    raw = raw.strip()
    try:
        if kind is bool:
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind == "optional_float":
            return None if raw.lower() in ("auto", "none", "") else float(raw)
        if kind is tuple:
            return tuple(v.strip() for v in raw.split(",") if v.strip())
        return raw
    except ValueError:
        raise ConfigError(f"cannot parse {name} = {raw!r}") from None


def _field_kind(f):
    if f.name == "series_cutoff":
        return "optional_float"
    if f.type in (bool, "bool"):
        return bool
    if f.type in (int, "int"):
        return int
    if f.type in (float, "float"):
        return float
    if f.type in (tuple, "tuple"):
        return tuple
    return str


def _read_section(parser, section, cls, defaults, aliases=None):
    aliases = aliases or {}
    known = {f.name: f for f in fields(cls)}
    values = {}
    if parser.has_section(section):
        for key, raw in parser[section].items():
            name = aliases.get(key, key)
            if name not in known:
                raise ConfigError(f"unknown key [{section}] {key}")
            values[name] = _convert(_field_kind(known[name]), raw, f"[{section}] {key}")
    return replace(defaults, **values) if values else defaults


def from_ini(text, base=None):
    """Parse INI text; keys absent from the file keep the values of ``base``."""
    base = base or ExperimentConfig()
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    unknown = set(parser.sections()) - {"model", "sim", "quad", "experiment"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    try:
        model = base.model
        if parser.has_section("model"):
            vals = {}
            for key, raw in parser["model"].items():
                if key not in ("a", "b", "h", "tau2", "sigma", "beta", "lambda"):
                    raise ConfigError(f"unknown key [model] {key}")
                vals["lam" if key == "lambda" else key] = _convert(float, raw, f"[model] {key}")
            model = model.with_(**vals)
        sim = _read_section(parser, "sim", SimConfig, base.sim)
        quad = _read_section(parser, "quad", QuadratureConfig, base.quad)
        exp = _read_section(parser, "experiment", ExperimentSettings, base.experiment)
        return ExperimentConfig(model=model, sim=sim, quad=quad, experiment=exp)
    except ConfigError:
        raise
    except (HarvestError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return from_ini(text)


__all__ = [
    "ExperimentConfig", "ExperimentSettings", "LevyParams", "Scheme", "SmallJumpMode",
    "config_hash", "from_ini", "load_config", "parse_grid", "parse_list", "to_dict", "to_ini",
]
