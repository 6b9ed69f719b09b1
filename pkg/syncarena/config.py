"""
Scenario and preset config files.

Line-oriented text with [section] headers, `key = value` entries and `#`
comments. Keys mirror the field names of the parameter dataclasses; value types
come from the field annotations. Event lines in [events] read

    t=<seconds> [label=<name>] set <key>=<value>[, <key>=<value>...]

Floats are written with repr, so dump/parse round trips are bit-exact.
"""

import logging
import re
import typing
from dataclasses import dataclass, field, fields, replace
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from .control import Variant
from .errors import ConfigError, SyncArenaError
from .integrate import StepConfig, TimedEvent
from .models import SwingState
from .params import PerUnitBase
from .plant import SECTION_TYPES, PlantParams, resolve_key
from .scenario import Preset, ScenarioSpec, fault_scenario, follow_kp, get_preset, variant_params

logger = logging.getLogger("syncarena.config")

KNOWN_SECTIONS = ("scenario", "preset", "base", "grid", "current", "gfl", "gfm",
                  "fault", "events", "solver")
PRESET_SECTIONS = ("preset", "base", "grid", "current", "gfl", "gfm", "fault")

_SCENARIO_KEYS = {
    "name": str,
    "variant": str,
    "preset": str,
    "init": str,
    "verdict_from": float,
    "pem": Optional[float],
    "pll_frozen": bool,
}
_PRESET_KEYS = {"name": str, "default_variant": str}
_PRESET_FAULT_KEYS = {
    "v_g": float,
    "i_d": float,
    "i_q": float,
    "i_rated": float,
    "trip_x_g": Optional[float],
    "trip_r_g": Optional[float],
}
_TIMELINE_KEYS = {"depth": Optional[float], "t_fault": float, "t_clear": float, "kind": str}
_FLAG_TYPES = {"pem": Optional[float], "pll_frozen": bool}

_EVENT_RE = re.compile(r"^t\s*=\s*(?P<t>\S+)\s+(?:label\s*=\s*(?P<label>\S+)\s+)?set\s+(?P<changes>.+)$")


@dataclass
class ConfigEntry:
    line: int
    key: str
    value: str


@dataclass
class ConfigDocument:
    """Raw sections of a parsed file, with line numbers kept for diagnostics."""

    path: str
    entries: Dict[str, List[ConfigEntry]] = field(default_factory=dict)
    headers: Dict[str, int] = field(default_factory=dict)
    events: List[ConfigEntry] = field(default_factory=list)

    def error(self, message: str, section: Optional[str] = None, line: Optional[int] = None) -> ConfigError:
        if line is None and section is not None:
            line = self.headers.get(section)
        return ConfigError(message, self.path, line)

    def has(self, section: str) -> bool:
        return section in self.headers


def _strip_comment(line: str) -> str:
    stripped = line.strip()
    if stripped.startswith("#"):
        return ""
    match = re.search(r"\s#", stripped)
    return stripped[:match.start()].rstrip() if match else stripped


def parse_document(text: str, path: str = "<string>",
                   allowed: Tuple[str, ...] = KNOWN_SECTIONS) -> ConfigDocument:
    """
    Split config text into sections.

    Raises:
        ConfigError: For unknown sections, entries outside a section, lines
            without '=' and duplicate keys
    """
    doc = ConfigDocument(path=path)
    section = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in allowed:
                raise ConfigError(f"unknown section [{section}] (expected one of: {', '.join(allowed)})",
                                  path, number)
            doc.headers.setdefault(section, number)
            doc.entries.setdefault(section, [])
            continue
        if section is None:
            raise ConfigError("entry outside of any [section]", path, number)
        if section == "events":
            doc.events.append(ConfigEntry(number, "", line))
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", path, number)
        key, value = (s.strip() for s in line.split("=", 1))
        if any(e.key == key for e in doc.entries[section]):
            raise ConfigError(f"duplicate key {key!r} in [{section}]", path, number)
        doc.entries[section].append(ConfigEntry(number, key, value))
    return doc


def _unwrap_optional(hint) -> Tuple[Any, bool]:
    if typing.get_origin(hint) is typing.Union:
        args = [a for a in typing.get_args(hint) if a is not type(None)]
        return args[0], True
    return hint, False


def convert_value(text: str, hint) -> Any:
    """
    Convert a config token to the annotated type.

    Raises:
        ValueError: When the token does not parse as that type
    """
    hint, optional = _unwrap_optional(hint)
    token = text.strip()
    if token.lower() == "none":
        if optional:
            return None
        raise ValueError("none is not allowed here")
    if hint is bool:
        lowered = token.lower()
        if lowered in ("true", "yes", "1"):
            return True
        if lowered in ("false", "no", "0"):
            return False
        raise ValueError(f"expected true or false, got {token!r}")
    if hint is int:
        return int(token)
    if hint is float:
        return float(token)
    return token


def format_value(value: Any) -> str:
    """Config token of a value; floats use repr so they parse back bit-exactly."""
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def _field_types(cls) -> Dict[str, Any]:
    hints = typing.get_type_hints(cls)
    return {f.name: hints[f.name] for f in fields(cls)}


def _section_values(doc: ConfigDocument, section: str, types: Mapping[str, Any]) -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for entry in doc.entries.get(section, []):
        if entry.key not in types:
            raise doc.error(f"unknown key {entry.key!r} in [{section}] (expected one of: "
                            f"{', '.join(types)})", line=entry.line)
        try:
            values[entry.key] = convert_value(entry.value, types[entry.key])
        except ValueError as e:
            raise doc.error(f"bad value for {section}.{entry.key}: {e}", line=entry.line)
    return values


def _build(doc: ConfigDocument, section: str, bundle, values: Mapping[str, Any]):
    if not values:
        return bundle
    try:
        return replace(bundle, **values)
    except SyncArenaError as e:
        raise doc.error(f"invalid [{section}]: {e}", section=section)


def _change_type(key: str):
    section, name = resolve_key(key)
    if section is None:
        return _FLAG_TYPES[name]
    types = _field_types(SECTION_TYPES[section])
    if name not in types:
        raise ValueError(f"{section} has no field {name!r}")
    return types[name]


def parse_event(entry: ConfigEntry, doc: ConfigDocument) -> TimedEvent:
    """Parse one [events] line."""
    match = _EVENT_RE.match(entry.value)
    if match is None:
        raise doc.error(f"expected 't=<s> set <key>=<value>', got {entry.value!r}", line=entry.line)
    changes: Dict[str, Any] = {}
    try:
        t = float(match.group("t"))
        for item in match.group("changes").split(","):
            if not item.strip():
                continue
            if "=" not in item:
                raise ValueError(f"expected key=value, got {item.strip()!r}")
            key, value = (s.strip() for s in item.split("=", 1))
            changes[key] = convert_value(value, _change_type(key))
        return TimedEvent(t, changes, label=match.group("label") or "")
    except (ValueError, SyncArenaError) as e:
        raise doc.error(f"bad event: {e}", line=entry.line)


def _parse_init(doc: ConfigDocument, text: Optional[str]) -> Optional[SwingState]:
    if text is None or text.strip().lower() == "sep":
        return None
    parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
    try:
        if len(parts) != 2:
            raise ValueError("expected 'sep' or '<delta>, <delta_dot>'")
        return SwingState(float(parts[0]), float(parts[1]))
    except ValueError as e:
        raise doc.error(f"bad init {text!r}: {e}", section="scenario")


@dataclass(frozen=True)
class ScenarioConfig:
    """A loaded scenario plus the preset and per-unit base it was built on."""

    scenario: ScenarioSpec
    preset: Preset
    base: PerUnitBase


def parse_scenario(text: str, path: str = "<string>", defaults: Optional[StepConfig] = None,
                   variant: Optional[Union[str, Variant]] = None) -> ScenarioConfig:
    """
    Build a scenario from config text.

    With `preset = <name>` in [scenario] the parameters start from that preset
    shaped for the variant; otherwise from the dataclass defaults. Section
    entries then overwrite single fields. The timeline is either explicit
    [events] lines or the [fault] shorthand (t_fault, t_clear, depth, kind).

    Args:
        text: Config text
        path: Name used in diagnostics
        defaults: Step configuration for [solver] keys the file leaves out
        variant: Controller variant replacing the one in [scenario]; the preset
            is shaped for it before the section entries apply

    Raises:
        ConfigError: With path and line of the offending entry
    """
    doc = parse_document(text, path)
    head = _section_values(doc, "scenario", _SCENARIO_KEYS)
    try:
        preset = get_preset(head["preset"]) if "preset" in head else Preset(name="custom")
        variant = Variant.parse(variant or head.get("variant", preset.default_variant))
    except SyncArenaError as e:
        raise doc.error(str(e), section="scenario")
    params = variant_params(preset, variant) if "preset" in head else PlantParams()

    sections = {s: _section_values(doc, s, _field_types(cls)) for s, cls in SECTION_TYPES.items()}
    bundles = {s: _build(doc, s, getattr(params, s), sections[s]) for s in SECTION_TYPES}
    flags = {k: head[k] for k in _FLAG_TYPES if k in head}
    params = replace(params, **bundles, **flags)
    if "k_p" in sections["gfl"] and "k_vq" not in sections["gfl"]:
        params = follow_kp(params, variant)
    base = _build(doc, "base", preset.base, _section_values(doc, "base", _field_types(PerUnitBase)))
    cfg = _build(doc, "solver", defaults or StepConfig(),
                 _section_values(doc, "solver", _field_types(StepConfig)))

    fault = _section_values(doc, "fault", {**_PRESET_FAULT_KEYS, **_TIMELINE_KEYS})
    current_fault = _build(doc, "fault", preset.current_fault,
                           {k: fault[k] for k in ("i_d", "i_q", "i_rated") if k in fault})
    preset = replace(preset, base=base, grid=params.grid, current=params.current, gfl=params.gfl,
                     gfm=params.gfm, current_fault=current_fault,
                     fault_v_g=fault.get("v_g", preset.fault_v_g),
                     trip_x_g=fault.get("trip_x_g", preset.trip_x_g),
                     trip_r_g=fault.get("trip_r_g", preset.trip_r_g))

    events = [parse_event(entry, doc) for entry in doc.events]
    timeline = {k: fault[k] for k in _TIMELINE_KEYS if k in fault}
    try:
        if timeline:
            if events:
                raise doc.error("use either [events] lines or the [fault] timeline keys, not both",
                                section="events")
            if "t_fault" not in timeline:
                raise doc.error("the [fault] timeline needs t_fault", section="fault")
            spec = fault_scenario(preset, variant, depth=timeline.get("depth"),
                                  t_fault=timeline["t_fault"],
                                  t_clear=timeline.get("t_clear", cfg.t_end), t_end=cfg.t_end,
                                  dt=cfg.dt, kind=timeline.get("kind", "dip"),
                                  record_every=cfg.record_every, params=params)
        else:
            spec = ScenarioSpec(name=f"{preset.name}:{variant.value}", variant=variant,
                                params=params, events=tuple(events), cfg=cfg)
        spec = replace(spec, name=head.get("name", spec.name),
                       init=_parse_init(doc, head.get("init")),
                       verdict_from=head.get("verdict_from", spec.verdict_from))
    except ConfigError:
        raise
    except SyncArenaError as e:
        raise doc.error(str(e), section="fault" if timeline else "events")
    logger.debug(f"Loaded scenario {spec.name} from {path} with {len(spec.events)} events")
    return ScenarioConfig(scenario=spec, preset=preset, base=base)


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config file: {e.strerror or e}", str(path))


def load_scenario(path: str, defaults: Optional[StepConfig] = None,
                  variant: Optional[Union[str, Variant]] = None) -> ScenarioConfig:
    """Read and parse a scenario config file."""
    return parse_scenario(_read(path), str(path), defaults=defaults, variant=variant)


def _dump_bundle(lines: List[str], section: str, bundle) -> None:
    lines.append(f"[{section}]")
    for f in fields(bundle):
        lines.append(f"{f.name} = {format_value(getattr(bundle, f.name))}")
    lines.append("")


def dump_scenario(spec: ScenarioSpec, base: Optional[PerUnitBase] = None) -> str:
    """Serialize a scenario with every parameter written out explicitly."""
    params = spec.params
    init = "sep" if spec.init is None else \
        f"{format_value(float(spec.init.delta))}, {format_value(float(spec.init.delta_dot))}"
    lines = [
        "# syncarena scenario",
        "[scenario]",
        f"name = {spec.name}",
        f"variant = {spec.variant.value}",
        f"init = {init}",
        f"verdict_from = {format_value(float(spec.verdict_from))}",
        f"pem = {format_value(params.pem)}",
        f"pll_frozen = {format_value(params.pll_frozen)}",
        "",
    ]
    if base is not None:
        _dump_bundle(lines, "base", base)
    for section in SECTION_TYPES:
        _dump_bundle(lines, section, getattr(params, section))
    _dump_bundle(lines, "solver", spec.cfg)
    lines.append("[events]")
    for ev in spec.events:
        label = f" label={ev.label.replace(' ', '_')}" if ev.label else ""
        changes = ", ".join(f"{k}={format_value(v)}" for k, v in ev.changes.items())
        lines.append(f"t={format_value(float(ev.t))}{label} set {changes}")
    return "\n".join(lines) + "\n"


def save_scenario(spec: ScenarioSpec, path: str, base: Optional[PerUnitBase] = None) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dump_scenario(spec, base))


def dump_preset(preset: Preset) -> str:
    """Serialize a preset; parse_preset(dump_preset(p)) == p."""
    lines = [
        "# syncarena preset",
        "[preset]",
        f"name = {preset.name}",
        f"default_variant = {preset.default_variant}",
        "",
    ]
    _dump_bundle(lines, "base", preset.base)
    for section in SECTION_TYPES:
        _dump_bundle(lines, section, getattr(preset, section))
    fault = preset.current_fault
    lines += [
        "[fault]",
        f"v_g = {format_value(float(preset.fault_v_g))}",
        f"i_d = {format_value(float(fault.i_d))}",
        f"i_q = {format_value(float(fault.i_q))}",
        f"i_rated = {format_value(float(fault.i_rated))}",
        f"trip_x_g = {format_value(preset.trip_x_g)}",
        f"trip_r_g = {format_value(preset.trip_r_g)}",
    ]
    return "\n".join(lines) + "\n"


def parse_preset(text: str, path: str = "<string>") -> Preset:
    """
    Build a preset from config text; fields left out keep the dataclass defaults.

    Raises:
        ConfigError: With path and line of the offending entry
    """
    doc = parse_document(text, path, allowed=PRESET_SECTIONS)
    head = _section_values(doc, "preset", _PRESET_KEYS)
    try:
        preset = Preset(name=head.get("name", "custom"),
                        default_variant=Variant.parse(head.get("default_variant",
                                                               Variant.PLL_ORIGINAL.value)).value)
    except SyncArenaError as e:
        raise doc.error(str(e), section="preset")
    updates: Dict[str, Any] = {
        "base": _build(doc, "base", preset.base, _section_values(doc, "base", _field_types(PerUnitBase))),
    }
    for section, cls in SECTION_TYPES.items():
        updates[section] = _build(doc, section, getattr(preset, section),
                                  _section_values(doc, section, _field_types(cls)))
    fault = _section_values(doc, "fault", _PRESET_FAULT_KEYS)
    updates["current_fault"] = _build(doc, "fault", preset.current_fault,
                                      {k: fault[k] for k in ("i_d", "i_q", "i_rated") if k in fault})
    for key in ("trip_x_g", "trip_r_g"):
        if key in fault:
            updates[key] = fault[key]
    if "v_g" in fault:
        updates["fault_v_g"] = fault["v_g"]
    return replace(preset, **updates)


def load_preset(path: str) -> Preset:
    """Read and parse a preset file."""
    return parse_preset(_read(path), str(path))


__all__ = [
    "ConfigDocument",
    "ScenarioConfig",
    "parse_document",
    "parse_event",
    "convert_value",
    "format_value",
    "parse_scenario",
    "load_scenario",
    "dump_scenario",
    "save_scenario",
    "dump_preset",
    "parse_preset",
    "load_preset",
]
