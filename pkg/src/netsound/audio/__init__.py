"""Deterministic audio rendering: voices, mixing, WAV output."""

from .dsp import LinearRamp, RenderConfig, db_to_linear, pan_gains
from .engine import AudioDevice, SoundscapeEngine, render_offline
from .mixer import LengthMismatch, mix
from .voices import VoiceRenderer, voice_rng
from .wavefile import read_wav, write_wav

__all__ = [
    "AudioDevice",
    "LengthMismatch",
    "LinearRamp",
    "RenderConfig",
    "SoundscapeEngine",
    "VoiceRenderer",
    "db_to_linear",
    "mix",
    "pan_gains",
    "read_wav",
    "render_offline",
    "voice_rng",
    "write_wav",
]
