"""Soundscape model: which traffic variable drives which sonic parameter.

A Theme is a named set of voices (ambient bed, grain textures, tones, alert
stings). Each voice declares mapping curves from traffic variables onto its
sonic parameters; this module stays pure - smoothing and synthesis live in
the audio engine.
"""

from __future__ import annotations

import enum
import json
import logging
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .analysis import Direction, TrafficAggregates
from .capture.records import Protocol
from .params import PARAM_TARGETS, MixerState, VoiceParams

log = logging.getLogger(__name__)

BUILTIN_THEMES = ("forest", "city", "abstract")

VOICE_KINDS = ("bed", "grain", "tone", "alert")
BUILTIN_SOURCES = ("sine", "noise")


class ThemeError(Exception):
    """Base class for theme loading problems."""


class SchemaError(ThemeError):
    """The document is structurally wrong (missing fields, bad shapes)."""


class ValidationError(ThemeError):
    """The document parses but breaks a model invariant."""


class UnknownTheme(ThemeError):
    """Neither a builtin theme name nor a readable theme file."""


class InvalidCurve(ValueError):
    """Mapping curve constraints violated at construction time."""


class VariableId(enum.Enum):
    PKT_RATE = "pkt_rate"
    BYTE_RATE = "byte_rate"
    AVG_PKT_RATE = "avg_pkt_rate"
    RATE_RATIO = "rate_ratio"
    TCP_RATE = "tcp_rate"
    UDP_RATE = "udp_rate"
    ICMP_RATE = "icmp_rate"
    OTHER_RATE = "other_rate"
    IN_RATE = "in_rate"
    OUT_RATE = "out_rate"
    DIR_BALANCE = "dir_balance"
    MEAN_INTER_ARRIVAL = "mean_inter_arrival"
    UNIQUE_DST_PORTS = "unique_dst_ports"


def variable_value(agg: TrafficAggregates, variable: VariableId) -> float:
    """Extract one monitored variable from a window aggregate; total, never raises."""
    w = agg.window_len
    if variable is VariableId.PKT_RATE:
        return agg.pkt_rate
    if variable is VariableId.BYTE_RATE:
        return agg.byte_rate
    if variable is VariableId.AVG_PKT_RATE:
        return agg.avg_pkt_rate
    if variable is VariableId.RATE_RATIO:
        return agg.rate_ratio
    if variable is VariableId.TCP_RATE:
        return agg.by_protocol[Protocol.TCP] / w
    if variable is VariableId.UDP_RATE:
        return agg.by_protocol[Protocol.UDP] / w
    if variable is VariableId.ICMP_RATE:
        return agg.by_protocol[Protocol.ICMP] / w
    if variable is VariableId.OTHER_RATE:
        return agg.by_protocol[Protocol.OTHER] / w
    if variable is VariableId.IN_RATE:
        return agg.by_direction[Direction.INBOUND] / w
    if variable is VariableId.OUT_RATE:
        return agg.by_direction[Direction.OUTBOUND] / w
    if variable is VariableId.DIR_BALANCE:
        out_count = agg.by_direction[Direction.OUTBOUND]
        in_count = agg.by_direction[Direction.INBOUND]
        total = out_count + in_count
        return (out_count - in_count) / total if total else 0.0
    if variable is VariableId.MEAN_INTER_ARRIVAL:
        return agg.mean_inter_arrival
    if variable is VariableId.UNIQUE_DST_PORTS:
        return float(agg.unique_dst_ports)
    raise ValueError(f"unhandled variable {variable}")  # unreachable


@dataclass(frozen=True)
class MappingCurve:
    """Clamped linear or log map from a variable's domain onto a sonic range."""

    curve: str  # "linear" | "log"
    in_lo: float
    in_hi: float
    out_lo: float
    out_hi: float

    def __post_init__(self) -> None:
        if self.curve not in ("linear", "log"):
            raise InvalidCurve(f"unknown curve type {self.curve!r}")
        if not self.in_lo < self.in_hi:
            raise InvalidCurve("in_domain must satisfy lo < hi")
        if self.curve == "log" and self.in_lo <= 0:
            raise InvalidCurve("log curve needs in_lo > 0")

    def to_dict(self) -> dict:
        return {
            "type": self.curve,
            "in": [self.in_lo, self.in_hi],
            "out": [self.out_lo, self.out_hi],
        }


def apply_mapping(value: float, m: MappingCurve) -> float:
    """Clamp value into the curve's domain, then map onto its output range.

    Endpoints map exactly (in_lo -> out_lo, in_hi -> out_hi) and the result
    never leaves the output range.
    """
    v = min(max(value, m.in_lo), m.in_hi)
    if m.curve == "linear":
        frac = (v - m.in_lo) / (m.in_hi - m.in_lo)
    else:
        frac = math.log(v / m.in_lo) / math.log(m.in_hi / m.in_lo)
    out = (1.0 - frac) * m.out_lo + frac * m.out_hi
    lo, hi = (m.out_lo, m.out_hi) if m.out_lo <= m.out_hi else (m.out_hi, m.out_lo)
    return min(max(out, lo), hi)


@dataclass(frozen=True)
class DrivenParam:
    target: str  # one of PARAM_TARGETS
    variable: VariableId
    curve: MappingCurve


@dataclass(frozen=True)
class SoundSource:
    """Builtin synth (sine/noise) or a sample file; extras tune the synth."""

    builtin: str | None = None
    sample: str | None = None
    freq: float = 440.0  # sine oscillator base frequency
    noise_cutoff: float | None = None  # one-pole lowpass on noise sources
    jitter_semitones: float = 0.0  # per-grain pitch spread

    def to_dict(self) -> dict:
        doc: dict = {}
        if self.sample is not None:
            doc["sample"] = self.sample
        if self.builtin is not None:
            doc["builtin"] = self.builtin
        if self.freq != 440.0:
            doc["freq"] = self.freq
        if self.noise_cutoff is not None:
            doc["noise_cutoff"] = self.noise_cutoff
        if self.jitter_semitones:
            doc["jitter_semitones"] = self.jitter_semitones
        return doc


# synthesized stand-in when a sample file cannot be found
_FALLBACK_BUILTIN = {"bed": "noise", "grain": "noise", "tone": "sine", "alert": "sine"}


@dataclass(frozen=True)
class VoiceDefinition:
    id: str
    kind: str  # "bed" | "grain" | "tone" | "alert"
    source: SoundSource
    static: VoiceParams
    driven: tuple[DrivenParam, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in VOICE_KINDS:
            raise ValidationError(f"voice {self.id!r}: unknown kind {self.kind!r}")
        if self.kind == "alert" and self.driven:
            raise ValidationError(
                f"alert voice {self.id!r} is event-triggered and takes no driven params"
            )
        targets = [d.target for d in self.driven]
        if len(targets) != len(set(targets)):
            raise ValidationError(f"voice {self.id!r} drives a target twice")
        for d in self.driven:
            if d.target not in PARAM_TARGETS:
                raise ValidationError(
                    f"voice {self.id!r}: unknown target {d.target!r}"
                )
            if d.target == "trigger_rate_hz" and self.kind != "grain":
                raise ValidationError(
                    f"voice {self.id!r}: trigger_rate_hz only applies to grain voices"
                )


@dataclass(frozen=True)
class Theme:
    name: str
    voices: tuple[VoiceDefinition, ...]
    mixer: MixerState

    def __post_init__(self) -> None:
        ids = [v.id for v in self.voices]
        if len(ids) != len(set(ids)):
            raise ValidationError(f"theme {self.name!r} has duplicate voice ids")
        kinds = {v.kind for v in self.voices}
        if "bed" not in kinds:
            raise ValidationError(f"theme {self.name!r} needs at least one bed voice")
        if "alert" not in kinds:
            raise ValidationError(f"theme {self.name!r} needs at least one alert voice")

    def voice(self, voice_id: str) -> VoiceDefinition:
        for v in self.voices:
            if v.id == voice_id:
                return v
        raise KeyError(voice_id)

    def voice_ids(self) -> list[str]:
        return [v.id for v in self.voices]


def update_voice_params(agg: TrafficAggregates, voice: VoiceDefinition) -> VoiceParams:
    """Compute the voice's target parameters for one window."""
    params = voice.static
    for dp in voice.driven:
        params = params.with_target(
            dp.target, apply_mapping(variable_value(agg, dp.variable), dp.curve)
        )
    return params


# ---------------------------------------------------------------------------
# Theme documents


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise SchemaError(f"{where}: missing required field {key!r}")
    return doc[key]


def _parse_curve(doc: dict, where: str) -> MappingCurve:
    if not isinstance(doc, dict):
        raise SchemaError(f"{where}: curve must be an object")
    ctype = _require(doc, "type", where)
    in_pair = _require(doc, "in", where)
    out_pair = _require(doc, "out", where)
    for name, pair in (("in", in_pair), ("out", out_pair)):
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            raise SchemaError(f"{where}: {name} must be [lo, hi]")
    try:
        return MappingCurve(
            ctype,
            float(in_pair[0]),
            float(in_pair[1]),
            float(out_pair[0]),
            float(out_pair[1]),
        )
    except InvalidCurve as exc:
        raise ValidationError(f"{where}: {exc}") from exc


def _parse_source(doc: dict, kind: str, voice_id: str, base_dir: Path | None) -> SoundSource:
    if not isinstance(doc, dict):
        raise SchemaError(f"voice {voice_id!r}: source must be an object")
    builtin = doc.get("builtin")
    sample = doc.get("sample")
    if builtin is None and sample is None:
        raise SchemaError(f"voice {voice_id!r}: source needs 'builtin' or 'sample'")
    if builtin is not None and builtin not in BUILTIN_SOURCES:
        raise ValidationError(
            f"voice {voice_id!r}: unknown builtin source {builtin!r}"
        )
    if sample is not None:
        path = Path(sample)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        if not path.is_file():
            log.warning(
                "voice %r: sample %s not found, falling back to builtin synth",
                voice_id,
                sample,
            )
            sample = None
            builtin = builtin or _FALLBACK_BUILTIN[kind]
        else:
            sample = str(path)
    return SoundSource(
        builtin=builtin,
        sample=sample,
        freq=float(doc.get("freq", 440.0)),
        noise_cutoff=(
            None if doc.get("noise_cutoff") is None else float(doc["noise_cutoff"])
        ),
        jitter_semitones=float(doc.get("jitter_semitones", 0.0)),
    )


def _parse_voice(doc: dict, base_dir: Path | None) -> VoiceDefinition:
    if not isinstance(doc, dict):
        raise SchemaError("voice entries must be objects")
    voice_id = _require(doc, "id", "voice")
    kind = _require(doc, "kind", f"voice {voice_id!r}")
    static_doc = doc.get("static", {})
    if not isinstance(static_doc, dict):
        raise SchemaError(f"voice {voice_id!r}: static must be an object")
    static = VoiceParams(
        gain_db=float(static_doc.get("gain_db", 0.0)),
        trigger_rate_hz=float(static_doc.get("trigger_rate_hz", 0.0)),
        pitch_ratio=float(static_doc.get("pitch_ratio", 1.0)),
        pan=float(static_doc.get("pan", 0.0)),
    )
    driven = []
    for i, dp_doc in enumerate(doc.get("driven", [])):
        where = f"voice {voice_id!r} driven[{i}]"
        if not isinstance(dp_doc, dict):
            raise SchemaError(f"{where}: must be an object")
        target = _require(dp_doc, "target", where)
        var_name = _require(dp_doc, "variable", where)
        try:
            variable = VariableId(var_name)
        except ValueError:
            raise ValidationError(f"{where}: unknown variable {var_name!r}") from None
        curve = _parse_curve(_require(dp_doc, "curve", where), where)
        driven.append(DrivenParam(target, variable, curve))
    if kind not in VOICE_KINDS:
        raise ValidationError(f"voice {voice_id!r}: unknown kind {kind!r}")
    source = _parse_source(
        _require(doc, "source", f"voice {voice_id!r}"), kind, voice_id, base_dir
    )
    return VoiceDefinition(
        id=voice_id, kind=kind, source=source, static=static, driven=tuple(driven)
    )


def parse_theme(doc: dict, base_dir: Path | None = None) -> Theme:
    """Validate a theme document against the model invariants."""
    if not isinstance(doc, dict):
        raise SchemaError("theme document must be a JSON object")
    name = _require(doc, "name", "theme")
    voices_doc = _require(doc, "voices", "theme")
    if not isinstance(voices_doc, list) or not voices_doc:
        raise SchemaError("theme: voices must be a non-empty array")
    voices = tuple(_parse_voice(v, base_dir) for v in voices_doc)
    mixer_doc = doc.get("mixer", {})
    if not isinstance(mixer_doc, dict):
        raise SchemaError("theme: mixer must be an object")
    mixer = MixerState.from_dict(mixer_doc)
    for v in voices:
        mixer.voice(v.id)  # every voice gets a channel strip
    return Theme(name=name, voices=voices, mixer=mixer)


def serialize_theme(theme: Theme) -> dict:
    """Inverse of parse_theme (round-trips through load_theme)."""
    return {
        "name": theme.name,
        "voices": [
            {
                "id": v.id,
                "kind": v.kind,
                "source": v.source.to_dict(),
                "static": {
                    "gain_db": v.static.gain_db,
                    "trigger_rate_hz": v.static.trigger_rate_hz,
                    "pitch_ratio": v.static.pitch_ratio,
                    "pan": v.static.pan,
                },
                "driven": [
                    {
                        "target": d.target,
                        "variable": d.variable.value,
                        "curve": d.curve.to_dict(),
                    }
                    for d in v.driven
                ],
            }
            for v in theme.voices
        ],
        "mixer": theme.mixer.to_dict(),
    }


def load_theme(source: str | Path | dict) -> Theme:
    """Load a theme from a builtin name, a JSON file path, or a parsed document."""
    if isinstance(source, dict):
        return parse_theme(source)
    if isinstance(source, str) and source in BUILTIN_THEMES:
        text = (
            resources.files("netsound.themes").joinpath(f"{source}.json").read_text()
        )
        return parse_theme(json.loads(text))
    path = Path(source)
    if not path.is_file():
        raise UnknownTheme(
            f"{source!r} is neither a builtin theme ({', '.join(BUILTIN_THEMES)}) nor a theme file"
        )
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
    return parse_theme(doc, base_dir=path.parent)
