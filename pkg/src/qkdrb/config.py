"""Toolkit configuration: one JSON file with a section per module.

Durations may be given as plain numbers (seconds) or strings with a unit
suffix: ``"300s"``, ``"5min"``, ``"3h"``. The sim section's ``warmup``,
``measure`` and ``block_bits`` also accept ``"auto"``.
"""
from __future__ import annotations

import dataclasses
import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import InputError
from .ring import CHORD_MODES, RingScenario
from .skr_model import DecoyParams, GenerationModel, SaturationClamp, load_table_csv
from .switched import SwitchedConfig

ENV_VAR = "QKDRB_CONFIG"

_UNITS = {"s": 1.0, "sec": 1.0, "min": 60.0, "h": 3600.0}
_DURATION = re.compile(r"^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*(s|sec|min|h)\s*$")


def parse_duration(value) -> float:
    """Seconds from a number or a suffixed string."""
    if isinstance(value, bool):
        raise InputError(f"not a duration: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    m = _DURATION.match(str(value))
    if not m:
        raise InputError(f"not a duration (use s, min or h suffix): {value!r}")
    return float(m.group(1)) * _UNITS[m.group(2)]


@dataclass(frozen=True)
class ModelSection:
    kind: str = "parametric"
    params: dict = field(default_factory=dict)
    table_csv: str | None = None
    tx_power_dbm: float = 0.0
    R_A_dbm: float = -6.0

    def clamp(self) -> SaturationClamp:
        return SaturationClamp(self.tx_power_dbm, self.R_A_dbm)

    def build(self, base_dir: Path | None = None) -> GenerationModel:
        if self.kind == "parametric":
            return GenerationModel("parametric", params=DecoyParams(**self.params), clamp=self.clamp())
        if self.kind == "table":
            if not self.table_csv:
                raise InputError("table model needs model.table_csv")
            path = Path(self.table_csv)
            if not path.is_absolute() and base_dir is not None:
                path = base_dir / path
            return load_table_csv(path, self.clamp())
        raise InputError(f"model.kind must be 'parametric' or 'table', got {self.kind!r}")


@dataclass(frozen=True)
class ScenarioSection:
    a_c: float = 0.24
    chord_mode: str = "circle"

    def scenario(self, N: int, Le: float) -> RingScenario:
        return RingScenario(N, Le, self.a_c, self.chord_mode)


@dataclass(frozen=True)
class SwitchedSection:
    O_db: float = 2.0
    P_db: float = 2.0
    R_seconds: float = 300.0
    T_seconds: float = 10800.0

    def config(self) -> SwitchedConfig:
        return SwitchedConfig(self.O_db, self.P_db, self.R_seconds, self.T_seconds)


@dataclass(frozen=True)
class SimSection:
    nodes: int = 5
    le_km: float = 10.0
    load_factor: float = 0.99
    consumption_bps: float | None = None
    block_bits: int | str = "auto"
    warmup: float | str = "auto"
    measure: float | str = "auto"
    seed: int = 0


@dataclass(frozen=True)
class ToolConfig:
    model: ModelSection = field(default_factory=ModelSection)
    scenario: ScenarioSection = field(default_factory=ScenarioSection)
    switched: SwitchedSection = field(default_factory=SwitchedSection)
    sim: SimSection = field(default_factory=SimSection)
    base_dir: Path | None = None

    def generation_model(self) -> GenerationModel:
        return self.model.build(self.base_dir)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("base_dir")
        return d

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def validate(self) -> "ToolConfig":
        self.generation_model()
        self.scenario.scenario(3, 1.0)
        self.switched.config()
        s = self.sim
        if s.block_bits != "auto" and (isinstance(s.block_bits, bool) or not isinstance(s.block_bits, int) or s.block_bits <= 0):
            raise InputError("sim.block_bits must be a positive integer or 'auto'")
        if not s.load_factor >= 0:
            raise InputError("sim.load_factor must be >= 0")
        if s.consumption_bps is not None and not s.consumption_bps >= 0:
            raise InputError("sim.consumption_bps must be >= 0")
        for name in ("warmup", "measure"):
            v = getattr(s, name)
            if v != "auto" and not parse_duration(v) >= 0:
                raise InputError(f"sim.{name} must be >= 0")
        return self


_SECTIONS = {
    "model": ModelSection,
    "scenario": ScenarioSection,
    "switched": SwitchedSection,
    "sim": SimSection,
}
_DURATION_FIELDS = {("switched", "R_seconds"), ("switched", "T_seconds")}


def config_from_dict(data: dict, base_dir: Path | None = None) -> ToolConfig:
    if not isinstance(data, dict):
        raise InputError("config must be a JSON object")
    unknown = set(data) - set(_SECTIONS)
    if unknown:
        raise InputError(f"unknown config sections: {sorted(unknown)}")
    sections = {}
    for name, cls in _SECTIONS.items():
        raw = data.get(name, {})
        if not isinstance(raw, dict):
            raise InputError(f"config section {name!r} must be an object")
        known = {f.name for f in dataclasses.fields(cls)}
        bad = set(raw) - known
        if bad:
            raise InputError(f"unknown keys in {name!r}: {sorted(bad)}")
        values = dict(raw)
        for key in list(values):
            if (name, key) in _DURATION_FIELDS:
                values[key] = parse_duration(values[key])
        if name == "scenario" and values.get("chord_mode", "circle") not in CHORD_MODES:
            raise InputError(f"scenario.chord_mode must be one of {CHORD_MODES}")
        sections[name] = cls(**values)
    return ToolConfig(**sections, base_dir=base_dir).validate()


def load_config(path: str | os.PathLike | None = None) -> ToolConfig:
    """Load ``path``, else ``$QKDRB_CONFIG``, else the reference defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return ToolConfig().validate()
    p = Path(path)
    try:
        data = json.loads(p.read_text())
    except OSError as exc:
        raise InputError(f"cannot read config {p}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}: invalid JSON: {exc}") from None
    return config_from_dict(data, base_dir=p.parent)
