"""Stereo mix-down of voice buffers under operator mixer state."""

from __future__ import annotations

from typing import Mapping

import numpy as np

from ..params import MixerState, VoiceMix
from .dsp import RenderConfig, db_to_linear


class LengthMismatch(ValueError):
    """Voice buffers fed to one mix call must share a length."""


def mix(
    buffers: Mapping[str, tuple[np.ndarray, np.ndarray | float]],
    mixer: MixerState,
    cfg: RenderConfig,
) -> np.ndarray:
    """Sum voices into a stereo buffer.

    Each entry is (mono frames, pan), pan being a scalar or per-sample
    curve. Mute/solo logic and per-voice dB trims apply before the pan law;
    the master gain applies last, then a hard clamp to [-1, 1].
    """
    lengths = {len(buf) for buf, _pan in buffers.values()}
    if len(lengths) > 1:
        raise LengthMismatch(f"buffer lengths differ: {sorted(lengths)}")
    nframes = lengths.pop() if lengths else 0
    out = np.zeros((nframes, 2))
    for voice_id, (buf, pan) in buffers.items():
        if not mixer.audible(voice_id):
            continue
        vm = mixer.voices.get(voice_id, VoiceMix())
        gained = buf * db_to_linear(vm.gain_db)
        pan_values = vm.pan_override if vm.pan_override is not None else pan
        theta = (np.clip(pan_values, -1.0, 1.0) + 1.0) * (np.pi / 4.0)
        out[:, 0] += gained * np.cos(theta)
        out[:, 1] += gained * np.sin(theta)
    out *= db_to_linear(mixer.master_gain_db)
    np.clip(out, -1.0, 1.0, out=out)
    return out
