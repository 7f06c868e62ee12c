"""Run configuration: JSON schema with defaults and strict validation."""
from __future__ import annotations

import dataclasses
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .forms import MaterialParams
from .initial import CATALOG


class ConfigError(ValueError):
    """Base class; ``key`` and ``line`` locate the problem when known."""

    kind = "config"

    def __init__(self, msg, key=None, line=None, path=None):
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"[{self.kind}] " + (", ".join(where) + ": " if where else "")
        super().__init__(prefix + msg)
        self.key, self.line, self.path = key, line, path


class MissingConfigError(ConfigError):
    kind = "missing-file"


class ConfigSyntaxError(ConfigError):
    kind = "syntax"


class UnknownKeyError(ConfigError):
    kind = "unknown-key"


class ConstraintError(ConfigError):
    kind = "constraint"


@dataclass(frozen=True)
class MeshConfig:
    n_plane: int = 4
    nz_b: int = 4
    nz_f: int = 4
    ns_p: int = 2
    h_p: float = 0.2


@dataclass(frozen=True)
class RunConfig:
    dt: float = 0.01
    steps: int = 100
    nonlinear: bool = False
    picard_tol: float = 1e-10
    picard_max: int = 50


@dataclass(frozen=True)
class ICConfig:
    name: str = "random"
    seed: int = 0
    amplitude: float = 1.0
    modes: dict = field(default_factory=dict)


@dataclass(frozen=True)
class OutputConfig:
    dir: str = "out"
    stride: int = 0  # VTK snapshot every ``stride`` steps; 0 disables snapshots
    formats: tuple = ("csv",)


@dataclass(frozen=True)
class Config:
    mesh: MeshConfig = field(default_factory=MeshConfig)
    params: MaterialParams = field(default_factory=MaterialParams)
    run: RunConfig = field(default_factory=RunConfig)
    ic: ICConfig = field(default_factory=ICConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            out[f.name] = dataclasses.asdict(getattr(self, f.name))
        out["output"]["formats"] = list(self.output.formats)
        return out

    def replace(self, section: str, **kw) -> "Config":
        return dataclasses.replace(self, **{section: dataclasses.replace(getattr(self, section), **kw)})


SECTIONS = {"mesh": MeshConfig, "params": MaterialParams, "run": RunConfig, "ic": ICConfig, "output": OutputConfig}
FORMATS = ("csv", "vtk", "json")
MODE_KEYS = ("k", "amplitude")


def _line_of(text: str | None, key: str) -> int | None:
    if not text:
        return None
    m = re.search(r'"' + re.escape(key) + r'"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _coerce(section, name, typ, value, text, path):
    line = _line_of(text, name)
    if typ in (int, "int"):
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                return int(value)
            raise ConstraintError(f"expected an integer, got {value!r}", f"{section}.{name}", line, path)
        return value
    if typ in (float, "float"):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConstraintError(f"expected a number, got {value!r}", f"{section}.{name}", line, path)
        return float(value)
    if typ in (bool, "bool"):
        if not isinstance(value, bool):
            raise ConstraintError(f"expected true/false, got {value!r}", f"{section}.{name}", line, path)
        return value
    if typ in (str, "str"):
        if not isinstance(value, str):
            raise ConstraintError(f"expected a string, got {value!r}", f"{section}.{name}", line, path)
        return value
    return value


def _validate(cfg: Config, text, path):
    def fail(key, msg):
        raise ConstraintError(msg, key, _line_of(text, key.split(".")[-1]), path)

    for f in dataclasses.fields(MaterialParams):
        v = getattr(cfg.params, f.name)
        if not v > 0:
            extra = " (storage coefficients: c_b, c_p > 0 is required)" if f.name in ("c_b", "c_p") else ""
            fail(f"params.{f.name}", f"physical parameters must be > 0, got {v}{extra}")
    for name in ("n_plane", "nz_b", "nz_f", "ns_p"):
        if getattr(cfg.mesh, name) < 1:
            fail(f"mesh.{name}", "mesh sizes must be >= 1")
    if not cfg.mesh.h_p > 0:
        fail("mesh.h_p", "plate thickness must be > 0")
    if not cfg.run.dt > 0:
        fail("run.dt", f"dt must be > 0, got {cfg.run.dt}")
    if cfg.run.steps < 1:
        fail("run.steps", f"steps must be >= 1, got {cfg.run.steps}")
    if not cfg.run.picard_tol > 0:
        fail("run.picard_tol", "Picard tolerance must be > 0")
    if cfg.run.picard_max < 1:
        fail("run.picard_max", "picard_max must be >= 1")
    if cfg.ic.name not in CATALOG:
        fail("ic.name", f"unknown initial condition {cfg.ic.name!r}; choose from {list(CATALOG)}")
    if cfg.output.stride < 0:
        fail("output.stride", "stride must be >= 0")
    for fmt in cfg.output.formats:
        if fmt not in FORMATS:
            fail("output.formats", f"unknown format {fmt!r}; choose from {list(FORMATS)}")


def config_from_dict(data: dict, text: str | None = None, path=None) -> Config:
    if not isinstance(data, dict):
        raise ConfigSyntaxError("top level must be a JSON object", path=path, line=1)
    parts = {}
    for sec, value in data.items():
        if sec not in SECTIONS:
            raise UnknownKeyError(f"unknown section; expected one of {list(SECTIONS)}", sec, _line_of(text, sec), path)
        if not isinstance(value, dict):
            raise ConfigSyntaxError("section must be an object", sec, _line_of(text, sec), path)
        cls = SECTIONS[sec]
        types = {f.name: f.type for f in dataclasses.fields(cls)}
        kw = {}
        for k, v in value.items():
            if k not in types:
                raise UnknownKeyError(f"unknown key in section '{sec}'; expected one of {list(types)}",
                                      f"{sec}.{k}", _line_of(text, k), path)
            t = types[k]
            if sec == "params":
                t = float
            if k == "formats":
                if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
                    raise ConstraintError("formats must be a list of strings", f"{sec}.{k}", _line_of(text, k), path)
                kw[k] = tuple(v)
            elif k == "modes":
                kw[k] = _check_modes(v, text, path)
            else:
                kw[k] = _coerce(sec, k, t, v, text, path)
        if sec == "params":
            # validate below with a positional diagnostic rather than in __post_init__
            try:
                parts[sec] = MaterialParams(**{**dataclasses.asdict(MaterialParams()), **kw})
            except ValueError:
                bad = next(n for n, x in kw.items() if not (math.isfinite(x) and x > 0))
                extra = " (storage coefficients: c_b, c_p > 0 is required)" if bad in ("c_b", "c_p") else ""
                raise ConstraintError(f"physical parameters must be finite and > 0, got {kw[bad]}{extra}",
                                      f"params.{bad}", _line_of(text, bad), path) from None
        else:
            parts[sec] = cls(**kw)
    cfg = Config(**parts)
    _validate(cfg, text, path)
    return cfg


def _check_modes(v, text, path):
    if not isinstance(v, dict):
        raise ConstraintError("modes must be an object of field -> {k, amplitude}", "ic.modes", _line_of(text, "modes"), path)
    out = {}
    for fld, spec in v.items():
        if not isinstance(spec, dict):
            raise ConstraintError("mode spec must be an object", f"ic.modes.{fld}", _line_of(text, fld), path)
        for key in spec:
            if key not in MODE_KEYS:
                raise UnknownKeyError(f"unknown mode key; expected one of {list(MODE_KEYS)}",
                                      f"ic.modes.{fld}.{key}", _line_of(text, key), path)
        out[fld] = {"k": int(spec.get("k", 1)), "amplitude": float(spec.get("amplitude", 1.0))}
    return out


def parse_config(path) -> Config:
    """Read and validate a JSON config file."""
    path = Path(path)
    if not path.is_file():
        raise MissingConfigError("config file does not exist", path=path)
    text = path.read_text()
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigSyntaxError(f"malformed JSON: {exc.msg} (column {exc.colno})", line=exc.lineno, path=path) from None
    return config_from_dict(data, text, path)


def dump_config(cfg: Config) -> str:
    return json.dumps(cfg.to_dict(), indent=2, sort_keys=False) + "\n"


def write_config(cfg: Config, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_config(cfg))


__all__ = ["Config", "ConfigError", "ConfigSyntaxError", "ConstraintError", "ICConfig", "MeshConfig",
           "MissingConfigError", "OutputConfig", "RunConfig", "UnknownKeyError", "config_from_dict",
           "dump_config", "parse_config", "write_config"]
