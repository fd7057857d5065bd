"""Plain-text configuration files.

INI-style sections with one ``key = value`` per line and ``#`` comments.
Keys carry the names of the :class:`SimulationConfig` fields::

    [topology]
    kind = grid          # or uniform_random (n, width_m, height_m)
    rows = 10
    cols = 10
    spacing_m = 10

    [simulation]
    k = 3
    scheduler = cgs
    death_schedule = 12:5:after_std, 40:2:start_of_period   # node:period:phase
"""
from __future__ import annotations

import configparser
import dataclasses
from pathlib import Path

from ..engine import FaultEvent, FaultPhase, SimulationConfig
from ..errors import ConfigurationError
from ..topology import ExplicitTopology, GridTopology, UniformRandomTopology

_TOPOLOGIES = {"grid": GridTopology, "uniform_random": UniformRandomTopology,
               "explicit": ExplicitTopology}


def parse_positions(text: str) -> tuple:
    """``x y, x y, ...`` -> ((x, y), ...)"""
    out = []
    for item in text.split(","):
        if item.strip():
            x, y = item.split()
            out.append((float(x), float(y)))
    return tuple(out)


def format_positions(positions) -> str:
    return ", ".join(f"{x!r} {y!r}" for x, y in positions)


def _fields():
    return {f.name: f for f in dataclasses.fields(SimulationConfig) if f.name != "topology"}


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_death_schedule(text: str) -> tuple:
    events = []
    for item in text.replace(";", ",").split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) not in (2, 3):
            raise ConfigurationError(f"bad death_schedule entry {item!r}, want node:period[:phase]")
        phase = FaultPhase(parts[2]) if len(parts) == 3 else FaultPhase.START_OF_PERIOD
        events.append(FaultEvent(int(parts[0]), int(parts[1]), phase))
    return tuple(events)


def format_death_schedule(events) -> str:
    return ", ".join(f"{e.node}:{e.period}:{e.phase.value}" for e in events)


def coerce(name: str, text: str):
    """Convert the string form of one SimulationConfig field."""
    fields = _fields()
    if name not in fields:
        raise ConfigurationError(f"unknown configuration key {name!r}")
    default = fields[name].default
    try:
        if name == "death_schedule":
            return parse_death_schedule(text)
        if isinstance(default, bool):
            return _parse_bool(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        return text.strip()
    except ValueError as exc:
        raise ConfigurationError(f"{name}: {exc}") from None


def parse_topology(section) -> object:
    kind = section.get("kind", "grid").strip()
    cls = _TOPOLOGIES.get(kind)
    if cls is None:
        raise ConfigurationError(f"unknown topology kind {kind!r}")
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name in section:
            try:
                if f.name == "positions":
                    kwargs[f.name] = parse_positions(section[f.name])
                else:
                    kwargs[f.name] = type(f.default)(section[f.name])
            except ValueError as exc:
                raise ConfigurationError(f"topology {f.name}: {exc}") from None
    unknown = set(section) - {f.name for f in dataclasses.fields(cls)} - {"kind"}
    if unknown:
        raise ConfigurationError(f"unknown topology keys {sorted(unknown)}")
    return cls(**kwargs)


def config_from_parser(parser: configparser.ConfigParser, base: SimulationConfig | None = None) -> SimulationConfig:
    cfg = base or SimulationConfig()
    changes = {}
    if parser.has_section("topology"):
        changes["topology"] = parse_topology(parser["topology"])
    if parser.has_section("simulation"):
        for key, value in parser["simulation"].items():
            changes[key] = coerce(key, value)
    return dataclasses.replace(cfg, **changes)


def new_parser() -> configparser.ConfigParser:
    return configparser.ConfigParser(inline_comment_prefixes=("#",), comment_prefixes=("#",),
                                     interpolation=None)


def loads_config(text: str, base: SimulationConfig | None = None) -> SimulationConfig:
    parser = new_parser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(str(exc)) from None
    return config_from_parser(parser, base)


def load_config(path, base: SimulationConfig | None = None) -> SimulationConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    return loads_config(text, base)


def dumps_config(cfg: SimulationConfig) -> str:
    topo = cfg.topology
    lines = ["[topology]", f"kind = {topo.kind}"]
    for f in dataclasses.fields(topo):
        value = getattr(topo, f.name)
        lines.append(f"{f.name} = {format_positions(value) if f.name == 'positions' else value}")
    lines += ["", "[simulation]"]
    for name in _fields():
        value = getattr(cfg, name)
        if name == "death_schedule":
            value = format_death_schedule(value)
        lines.append(f"{name} = {value}")
    return "\n".join(lines) + "\n"


def apply_overrides(cfg: SimulationConfig, overrides: dict) -> SimulationConfig:
    """Apply ``{field: string value}`` overrides (CLI flags)."""
    return dataclasses.replace(cfg, **{k: coerce(k, str(v)) for k, v in overrides.items()})
