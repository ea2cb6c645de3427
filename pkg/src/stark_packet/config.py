"""Scenario configuration: flat ``section.key=value`` text or equivalent JSON."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace

CSV_COLUMNS = ("t", "re_psi", "im_psi", "population", "shift", "rate", "valid",
               "I0", "Ia", "Ib", "diff_dynamic", "diff_static")


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = []
        if key:
            where.append(key)
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{': '.join([', '.join(where), message]) if where else message}")
        self.key = key
        self.line = line


@dataclass(frozen=True)
class ParamsBlock:
    gamma_1d: float = 1.0
    omega0: float = 1e6
    rho_1d: float = 1.0 / (2.0 * math.pi)
    c: float = 1.0


@dataclass(frozen=True)
class PacketBlock:
    kind: str = "exponential"
    delta: float = 0.0
    linewidth: float = 1.0
    file: str = ""


@dataclass(frozen=True)
class GridBlock:
    dt: float = 1e-3
    t_max: float = 10.0


@dataclass(frozen=True)
class InitialBlock:
    psi0_re: float = 0.0
    psi0_im: float = 0.0
    c0_re: float = 0.0
    c0_im: float = 0.0

    @property
    def psi0(self) -> complex:
        return complex(self.psi0_re, self.psi0_im)

    @property
    def c0(self) -> complex:
        return complex(self.c0_re, self.c0_im)


@dataclass(frozen=True)
class OutputBlock:
    directory: str = "."
    series: str = "all"
    absolute: bool = False
    detector_offset: float = 0.0


@dataclass(frozen=True)
class ScenarioConfig:
    params: ParamsBlock = field(default_factory=ParamsBlock)
    packet: PacketBlock = field(default_factory=PacketBlock)
    grid: GridBlock = field(default_factory=GridBlock)
    initial: InitialBlock = field(default_factory=InitialBlock)
    output: OutputBlock = field(default_factory=OutputBlock)

    def with_values(self, **dotted) -> "ScenarioConfig":
        """Copy with ``section__key=value`` overrides, e.g. ``packet__delta=3``."""
        return _apply(self, {k.replace("__", "."): v for k, v in dotted.items()}, {})


_BLOCKS = {"params": ParamsBlock, "packet": PacketBlock, "grid": GridBlock,
           "initial": InitialBlock, "output": OutputBlock}
_TYPES = {f"{s}.{f.name}": type(getattr(cls(), f.name))
          for s, cls in _BLOCKS.items() for f in fields(cls)}


def _coerce(key: str, raw, line: int | None):
    want = _TYPES[key]
    if want is bool:
        if isinstance(raw, bool):
            return raw
        text = str(raw).strip().lower()
        if text in ("true", "1", "yes"):
            return True
        if text in ("false", "0", "no"):
            return False
        raise ConfigError(f"expected a boolean, got {raw!r}", key, line)
    if want is float:
        if isinstance(raw, bool):
            raise ConfigError(f"expected a number, got {raw!r}", key, line)
        try:
            value = float(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"expected a number, got {raw!r}", key, line) from None
        if not math.isfinite(value):
            raise ConfigError(f"must be finite, got {raw!r}", key, line)
        return value
    if not isinstance(raw, (str, int, float)) or isinstance(raw, bool):
        raise ConfigError(f"expected a string, got {raw!r}", key, line)
    return str(raw).strip()


def _apply(base: ScenarioConfig, values: dict, lines: dict) -> ScenarioConfig:
    blocks = {name: getattr(base, name) for name in _BLOCKS}
    for key, raw in values.items():
        line = lines.get(key)
        if key not in _TYPES:
            raise ConfigError("unknown key", key, line)
        section, name = key.split(".", 1)
        blocks[section] = replace(blocks[section], **{name: _coerce(key, raw, line)})
    cfg = ScenarioConfig(**blocks)
    _validate(cfg, lines)
    return cfg


def _validate(cfg: ScenarioConfig, lines: dict) -> None:
    def fail(key, msg):
        raise ConfigError(msg, key, lines.get(key))

    p = cfg.params
    for name in ("gamma_1d", "rho_1d", "c"):
        if getattr(p, name) <= 0:
            fail(f"params.{name}", "must be > 0")
    if p.omega0 < 0:
        fail("params.omega0", "must be >= 0")
    if cfg.packet.kind not in ("exponential", "tabulated"):
        fail("packet.kind", "must be 'exponential' or 'tabulated'")
    if cfg.packet.kind == "exponential" and cfg.packet.linewidth <= 0:
        fail("packet.linewidth", "must be > 0")
    if cfg.packet.kind == "tabulated" and not cfg.packet.file:
        fail("packet.file", "required for tabulated packets")
    if cfg.grid.dt <= 0:
        fail("grid.dt", "must be > 0")
    if cfg.grid.t_max < 2 * cfg.grid.dt:
        fail("grid.t_max", "must cover at least two steps")
    tls = abs(cfg.initial.psi0) ** 2 + abs(cfg.initial.c0) ** 2
    if tls > 1 + 1e-12:
        fail("initial.psi0_re", "|psi0|^2 + |c0|^2 exceeds 1")
    if cfg.output.series != "all":
        for col in cfg.output.series.split(","):
            if col.strip() not in CSV_COLUMNS:
                fail("output.series", f"unknown column {col.strip()!r}")


def _flatten_json(obj, key_prefix: str = "") -> dict:
    flat = {}
    for k, v in obj.items():
        key = f"{key_prefix}{k}"
        if isinstance(v, dict):
            if key_prefix:
                raise ConfigError("nesting deeper than section.key", key)
            flat.update(_flatten_json(v, key + "."))
        else:
            flat[key] = v
    return flat


def parse_config(text: str) -> ScenarioConfig:
    """Parse ``section.key=value`` lines (``#`` comments) or a JSON object."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
        return _apply(ScenarioConfig(), _flatten_json(data), {})

    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(" #", 1)[0].strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {line!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key in values:
            raise ConfigError("duplicate key", key, lineno)
        values[key] = value
        lines[key] = lineno
    return _apply(ScenarioConfig(), values, lines)


def emit_config(cfg: ScenarioConfig) -> str:
    out = []
    for section in _BLOCKS:
        block = getattr(cfg, section)
        for f in fields(block):
            value = getattr(block, f.name)
            if isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, float):
                text = repr(value)
            else:
                text = str(value)
            out.append(f"{section}.{f.name}={text}")
    return "\n".join(out) + "\n"


def config_to_dict(cfg: ScenarioConfig) -> dict:
    return {s: {f.name: getattr(getattr(cfg, s), f.name) for f in fields(getattr(cfg, s))}
            for s in _BLOCKS}
