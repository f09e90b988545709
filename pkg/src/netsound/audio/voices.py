"""Stateful per-voice renderers.

Each voice owns its smoothed parameters, oscillator/loop position, in-flight
one-shots, and a private seeded random stream, so advancing by N frames is a
pure function of (prior state, targets, N, seed). That is what makes whole
renders bit-reproducible and safe to parallelize per voice.
"""

from __future__ import annotations

import math
import zlib

import numpy as np

from ..params import VoiceParams
from ..soundscape import SoundSource, VoiceDefinition
from .dsp import LinearRamp, RenderConfig, crossfade_loop, db_to_linear, lowpass, resample_linear
from .wavefile import read_wav

LOOP_SECONDS = 2.0
LOOP_FADE_SECONDS = 0.05
GRAIN_SECONDS = 0.06
ALERT_PULSES = 3
ALERT_PULSE_SECONDS = 0.09
ALERT_GAP_SECONDS = 0.06
_TWO_PI = 2.0 * math.pi


def voice_rng(seed: int, voice_id: str) -> np.random.Generator:
    """Private, reproducible random stream for one voice."""
    material = [seed & 0xFFFFFFFFFFFFFFFF, zlib.crc32(voice_id.encode())]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(material)))


def _load_sample_mono(path: str, sample_rate: int) -> np.ndarray:
    frames, rate = read_wav(path)
    mono = frames.mean(axis=1)
    mono = resample_linear(mono, rate, sample_rate)
    peak = np.max(np.abs(mono)) if len(mono) else 0.0
    return mono / peak if peak > 0 else mono


class VoiceRenderer:
    """Renders one voice in blocks; see module docstring for the state contract."""

    def __init__(self, voice: VoiceDefinition, cfg: RenderConfig):
        self.voice = voice
        self.cfg = cfg
        self._rng = voice_rng(cfg.seed, voice.id)
        frames = cfg.smoothing_frames
        static = voice.static
        self._gain = LinearRamp(static.gain_db, frames)
        self._rate = LinearRamp(static.trigger_rate_hz, frames)
        self._pitch = LinearRamp(static.pitch_ratio, frames)
        self._pan = LinearRamp(static.pan, frames)

        self._sample = (
            _load_sample_mono(voice.source.sample, cfg.sample_rate)
            if voice.source.sample
            else None
        )
        self._loop = (
            self._build_loop() if voice.kind in ("bed", "tone") else None
        )
        self._loop_pos = 0.0
        self._phase = 0.0
        self._oneshots: list[list] = []  # [buffer, frames already played]
        self._poisson_acc = 0.0
        self._poisson_budget = float(self._rng.standard_exponential())
        self._pending_triggers = 0

    # -- source construction ------------------------------------------------

    def _build_loop(self) -> np.ndarray | None:
        src = self.voice.source
        sr = self.cfg.sample_rate
        fade = round(LOOP_FADE_SECONDS * sr)
        if self._sample is not None:
            return crossfade_loop(self._sample, fade)
        if src.builtin == "noise":
            noise = self._rng.standard_normal(round(LOOP_SECONDS * sr) + fade)
            if src.noise_cutoff:
                noise = lowpass(noise, src.noise_cutoff, sr)
            loop = crossfade_loop(noise, fade)
            peak = np.max(np.abs(loop))
            return loop / peak if peak > 0 else loop
        # sine beds/tones use the phase-accumulating oscillator instead
        return None

    def _make_grain(self, pitch: float) -> np.ndarray:
        src = self.voice.source
        sr = self.cfg.sample_rate
        pitch = max(pitch, 0.01)
        if src.jitter_semitones:
            pitch *= 2.0 ** (
                self._rng.uniform(-1.0, 1.0) * src.jitter_semitones / 12.0
            )
        if self._sample is not None:
            n = min(len(self._sample), round(len(self._sample) / pitch))
            pos = np.arange(n) * pitch
            buf = np.interp(pos, np.arange(len(self._sample)), self._sample)
        else:
            n = round(GRAIN_SECONDS * sr)
            if src.builtin == "sine":
                t = np.arange(n) / sr
                buf = np.sin(_TWO_PI * src.freq * pitch * t)
            else:
                buf = self._rng.standard_normal(n)
                if src.noise_cutoff:
                    buf = lowpass(buf, src.noise_cutoff * pitch, sr)
                peak = np.max(np.abs(buf))
                if peak > 0:
                    buf = buf / peak
        return buf * np.hanning(len(buf))

    def _make_alert(self) -> np.ndarray:
        src = self.voice.source
        sr = self.cfg.sample_rate
        if self._sample is not None:
            return self._sample.copy()
        pulse_n = round(ALERT_PULSE_SECONDS * sr)
        gap_n = round(ALERT_GAP_SECONDS * sr)
        out = np.zeros(ALERT_PULSES * pulse_n + (ALERT_PULSES - 1) * gap_n)
        attack = max(1, round(0.003 * sr))
        env = np.exp(-np.arange(pulse_n) / (0.03 * sr))
        env[:attack] *= np.linspace(0.0, 1.0, attack)
        for p in range(ALERT_PULSES):
            if src.builtin == "sine":
                freq = src.freq * (1.25 if p % 2 else 1.0)  # two-tone sting
                pulse = np.sin(_TWO_PI * freq * np.arange(pulse_n) / sr)
            else:
                pulse = self._rng.standard_normal(pulse_n)
                if src.noise_cutoff:
                    pulse = lowpass(pulse, src.noise_cutoff, sr)
                peak = np.max(np.abs(pulse))
                if peak > 0:
                    pulse = pulse / peak
            start = p * (pulse_n + gap_n)
            out[start : start + pulse_n] = pulse * env * (0.8**p)
        return out

    # -- controls -----------------------------------------------------------

    def set_target(self, params: VoiceParams) -> None:
        self._gain.set_target(params.gain_db)
        self._rate.set_target(params.trigger_rate_hz)
        self._pitch.set_target(params.pitch_ratio)
        self._pan.set_target(params.pan)

    def trigger(self) -> None:
        """Queue the alert one-shot; it starts at the next rendered block."""
        self._pending_triggers += 1

    # -- rendering ----------------------------------------------------------

    def render(self, nframes: int) -> tuple[np.ndarray, np.ndarray]:
        """Advance by nframes; returns (mono samples, per-sample pan)."""
        if nframes <= 0:
            raise ValueError("nframes must be positive")
        gain_db = self._gain.advance(nframes)
        pan = self._pan.advance(nframes)
        pitch = self._pitch.advance(nframes)
        rate = self._rate.advance(nframes)

        out = np.zeros(nframes)
        kind = self.voice.kind
        if kind in ("bed", "tone"):
            out = self._render_continuous(pitch)
        elif kind == "grain":
            self._drain_oneshots(out)
            self._schedule_grains(rate, pitch, out)
        else:  # alert
            self._drain_oneshots(out)
            while self._pending_triggers:
                self._pending_triggers -= 1
                self._start_oneshot(self._make_alert(), 0, out)
        return out * db_to_linear(gain_db), pan

    def _render_continuous(self, pitch: np.ndarray) -> np.ndarray:
        if self._loop is not None:
            loop = self._loop
            pos = self._loop_pos + np.cumsum(pitch)
            wrapped = pos % len(loop)
            out = np.interp(
                wrapped, np.arange(len(loop) + 1), np.append(loop, loop[0])
            )
            self._loop_pos = float(pos[-1] % len(loop))
            return out
        freq = self.voice.source.freq * pitch
        phases = self._phase + np.cumsum(_TWO_PI * freq / self.cfg.sample_rate)
        self._phase = float(phases[-1] % _TWO_PI)
        return np.sin(phases)

    def _schedule_grains(
        self, rate: np.ndarray, pitch: np.ndarray, out: np.ndarray
    ) -> None:
        # Time-rescaled Poisson process: fire whenever the integrated rate
        # crosses the next exponential budget. Handles varying and zero rates.
        cum = self._poisson_acc + np.cumsum(
            np.maximum(rate, 0.0) / self.cfg.sample_rate
        )
        while True:
            idx = int(np.searchsorted(cum, self._poisson_budget, side="left"))
            if idx >= len(out):
                break
            self._start_oneshot(self._make_grain(float(pitch[idx])), idx, out)
            self._poisson_budget += float(self._rng.standard_exponential())
        self._poisson_budget -= float(cum[-1])
        self._poisson_acc = 0.0

    def _start_oneshot(self, buf: np.ndarray, start: int, out: np.ndarray) -> None:
        take = min(len(buf), len(out) - start)
        out[start : start + take] += buf[:take]
        if take < len(buf):
            self._oneshots.append([buf, take])

    def _drain_oneshots(self, out: np.ndarray) -> None:
        live = []
        for buf, played in self._oneshots:
            take = min(len(buf) - played, len(out))
            out[:take] += buf[played : played + take]
            if played + take < len(buf):
                live.append([buf, played + take])
        self._oneshots = live
