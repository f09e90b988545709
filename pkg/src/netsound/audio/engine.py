"""Render orchestration: aggregate windows in, stereo frames out.

render_offline is the deterministic batch path used for WAV output and
every bit-exactness test: voices render independently (optionally in a
thread pool; output is identical for any worker count) and are then mixed
in theme order. SoundscapeEngine is the streaming flavour for live/device
output, driven window by window.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Protocol as TypingProtocol, Sequence

import numpy as np

from ..analysis import TrafficAggregates
from ..params import MixerState
from ..soundscape import Theme, update_voice_params
from .dsp import RenderConfig
from .mixer import mix
from .voices import VoiceRenderer


def _window_start_frames(n_windows: int, window_len: float, sample_rate: int) -> list[int]:
    return [round(k * window_len * sample_rate) for k in range(n_windows)]


def _alert_trigger_frames(
    aggregates: Sequence[TrafficAggregates],
    t0: float,
    cfg: RenderConfig,
    total_frames: int,
) -> list[int]:
    """Alert timestamps quantized up to the next block boundary."""
    frames = []
    for agg in aggregates:
        for alert in agg.alerts:
            raw = (alert.ts - t0) * cfg.sample_rate
            block = cfg.block_size
            quantized = int(np.ceil(raw / block)) * block
            if 0 <= quantized < total_frames:
                frames.append(quantized)
    return sorted(frames)


def _render_voice_timeline(
    renderer: VoiceRenderer,
    targets: Sequence,
    window_frames: Sequence[int],
    trigger_frames: Sequence[int],
    total_frames: int,
    block_size: int,
) -> tuple[np.ndarray, np.ndarray]:
    out = np.empty(total_frames)
    pan = np.empty(total_frames)
    next_window = 0
    next_trigger = 0
    frame = 0
    while frame < total_frames:
        while next_window < len(window_frames) and window_frames[next_window] <= frame:
            renderer.set_target(targets[next_window])
            next_window += 1
        while next_trigger < len(trigger_frames) and trigger_frames[next_trigger] <= frame:
            renderer.trigger()
            next_trigger += 1
        n = min(block_size, total_frames - frame)
        buf, pan_curve = renderer.render(n)
        out[frame : frame + n] = buf
        pan[frame : frame + n] = pan_curve
        frame += n
    return out, pan


def render_offline(
    aggregates: Sequence[TrafficAggregates],
    theme: Theme,
    mixer: MixerState,
    cfg: RenderConfig,
    workers: int = 1,
) -> np.ndarray:
    """Render the whole aggregate timeline to stereo frames.

    The timeline covers n_windows * window_len seconds; during window k
    every voice ramps toward the params computed from aggregate k, and
    alert events trigger the alert voices at their (block-quantized)
    timestamps. Bit-identical for any workers value.
    """
    aggregates = list(aggregates)
    if not aggregates:
        return np.zeros((0, cfg.channels))
    window_len = aggregates[0].window_len
    t0 = aggregates[0].window_start
    total_frames = round(len(aggregates) * window_len * cfg.sample_rate)
    window_frames = _window_start_frames(len(aggregates), window_len, cfg.sample_rate)
    trigger_frames = _alert_trigger_frames(aggregates, t0, cfg, total_frames)

    def render_one(voice) -> tuple[np.ndarray, np.ndarray]:
        renderer = VoiceRenderer(voice, cfg)
        targets = [update_voice_params(agg, voice) for agg in aggregates]
        triggers = trigger_frames if voice.kind == "alert" else ()
        return _render_voice_timeline(
            renderer, targets, window_frames, triggers, total_frames, cfg.block_size
        )

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rendered = list(pool.map(render_one, theme.voices))
    else:
        rendered = [render_one(v) for v in theme.voices]
    stems = {v.id: buf for v, buf in zip(theme.voices, rendered)}
    return mix(stems, mixer, cfg)


class AudioDevice(TypingProtocol):
    """Optional live output sink; implementations register per platform."""

    def write(self, frames: np.ndarray) -> None: ...

    def close(self) -> None: ...


_DEVICES: dict = {}


def register_device(name: str, factory) -> None:
    _DEVICES[name] = factory


def get_device(name: str) -> AudioDevice:
    try:
        return _DEVICES[name]()
    except KeyError:
        raise KeyError(f"no audio device named {name!r} is registered") from None


class SoundscapeEngine:
    """Streaming renderer for live output: one window in, W seconds of blocks out."""

    def __init__(self, theme: Theme, cfg: RenderConfig):
        self.cfg = cfg
        self._carry = 0.0  # fractional frames owed across windows
        self.set_theme(theme)

    def set_theme(self, theme: Theme) -> None:
        self.theme = theme
        self._renderers = {v.id: VoiceRenderer(v, self.cfg) for v in theme.voices}

    def window_blocks(
        self, agg: TrafficAggregates, mixer: MixerState
    ) -> Iterable[np.ndarray]:
        """Yield the stereo blocks covering one aggregate window."""
        for voice in self.theme.voices:
            self._renderers[voice.id].set_target(update_voice_params(agg, voice))
            if voice.kind == "alert":
                for _ in agg.alerts:
                    self._renderers[voice.id].trigger()
        exact = agg.window_len * self.cfg.sample_rate + self._carry
        frames_left = int(exact)
        self._carry = exact - frames_left
        while frames_left > 0:
            n = min(self.cfg.block_size, frames_left)
            stems = {
                vid: renderer.render(n) for vid, renderer in self._renderers.items()
            }
            yield mix(stems, mixer, self.cfg)
            frames_left -= n
