"""Shared state records: per-voice sonic parameters and the operator mixer."""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace

# sonic parameters a traffic variable may drive
PARAM_TARGETS = ("gain_db", "trigger_rate_hz", "pitch_ratio", "pan")

DEFAULT_MASTER_GAIN_DB = -6.0  # headroom so multi-voice themes don't clip


@dataclass(frozen=True)
class VoiceParams:
    gain_db: float = 0.0
    trigger_rate_hz: float = 0.0
    pitch_ratio: float = 1.0
    pan: float = 0.0

    def with_target(self, target: str, value: float) -> "VoiceParams":
        if target not in PARAM_TARGETS:
            raise ValueError(f"unknown parameter target {target!r}")
        return replace(self, **{target: value})


@dataclass
class VoiceMix:
    gain_db: float = 0.0
    mute: bool = False
    solo: bool = False
    pan_override: float | None = None

    def to_dict(self) -> dict:
        return {
            "gain_db": self.gain_db,
            "mute": self.mute,
            "solo": self.solo,
            "pan_override": self.pan_override,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "VoiceMix":
        return cls(
            gain_db=float(doc.get("gain_db", 0.0)),
            mute=bool(doc.get("mute", False)),
            solo=bool(doc.get("solo", False)),
            pan_override=(
                None
                if doc.get("pan_override") is None
                else float(doc["pan_override"])
            ),
        )


@dataclass
class MixerState:
    """Operator-facing mix controls: per-voice trims plus a master fader."""

    voices: dict[str, VoiceMix] = field(default_factory=dict)
    master_gain_db: float = DEFAULT_MASTER_GAIN_DB

    def voice(self, voice_id: str) -> VoiceMix:
        return self.voices.setdefault(voice_id, VoiceMix())

    def any_solo(self) -> bool:
        return any(v.solo for v in self.voices.values())

    def audible(self, voice_id: str) -> bool:
        mix = self.voices.get(voice_id, VoiceMix())
        if mix.mute:
            return False
        if self.any_solo():
            return mix.solo
        return True

    def clone(self) -> "MixerState":
        return copy.deepcopy(self)

    def to_dict(self) -> dict:
        return {
            "master_gain_db": self.master_gain_db,
            "voices": {vid: v.to_dict() for vid, v in sorted(self.voices.items())},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MixerState":
        return cls(
            voices={
                vid: VoiceMix.from_dict(v)
                for vid, v in doc.get("voices", {}).items()
            },
            master_gain_db=float(doc.get("master_gain_db", DEFAULT_MASTER_GAIN_DB)),
        )
