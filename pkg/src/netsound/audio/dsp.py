"""DSP primitives: gain/pan laws, parameter smoothing, noise shaping, resampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal


@dataclass(frozen=True)
class RenderConfig:
    sample_rate: int = 48000
    block_size: int = 512
    channels: int = 2
    smoothing_time: float = 0.1  # seconds of linear ramp on voice params
    seed: int = 0

    def __post_init__(self) -> None:
        if self.block_size <= 0:
            raise ValueError("block_size must be positive")
        if self.smoothing_time < 0:
            raise ValueError("smoothing_time must be non-negative")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    @property
    def smoothing_frames(self) -> int:
        return math.ceil(self.smoothing_time * self.sample_rate)


def db_to_linear(db):
    """Decibels to linear amplitude: 10^(db/20). Works on scalars and arrays."""
    return 10.0 ** (db / 20.0)


def pan_gains(pan: float) -> tuple[float, float]:
    """Constant-power stereo pan: L^2 + R^2 == 1 for any position."""
    p = min(max(pan, -1.0), 1.0)
    theta = (p + 1.0) * math.pi / 4.0
    return math.cos(theta), math.sin(theta)


class LinearRamp:
    """Linear per-sample smoothing of one parameter toward its target.

    Each new target starts a fresh ramp from the current value over the
    configured frame count, which caps the per-frame change at
    (target - start) / ramp_frames: no zipper steps on window updates.
    """

    def __init__(self, value: float, ramp_frames: int):
        self._start = float(value)
        self._target = float(value)
        self._total = max(0, int(ramp_frames))
        self._pos = self._total  # settled

    @property
    def value(self) -> float:
        if self._pos >= self._total or self._total == 0:
            return self._target
        frac = self._pos / self._total
        return self._start + (self._target - self._start) * frac

    @property
    def target(self) -> float:
        return self._target

    def set_target(self, target: float) -> None:
        target = float(target)
        if target == self._target:
            return
        self._start = self.value
        self._target = target
        self._pos = 0

    def advance(self, nframes: int) -> np.ndarray:
        """Return the smoothed value at each of the next nframes frames."""
        if self._pos >= self._total or self._total == 0:
            self._pos = self._total
            return np.full(nframes, self._target)
        idx = np.arange(self._pos + 1, self._pos + nframes + 1, dtype=np.float64)
        frac = np.minimum(idx / self._total, 1.0)
        out = (1.0 - frac) * self._start + frac * self._target
        self._pos += nframes
        return out


def lowpass(x: np.ndarray, cutoff_hz: float, sample_rate: int) -> np.ndarray:
    """One-pole lowpass; cheap colouring for noise sources."""
    alpha = 1.0 - math.exp(-2.0 * math.pi * cutoff_hz / sample_rate)
    return signal.lfilter([alpha], [1.0, alpha - 1.0], x)


def resample_linear(x: np.ndarray, sr_from: int, sr_to: int) -> np.ndarray:
    """Linear-interpolation resampling (good enough for theme samples)."""
    if sr_from == sr_to or len(x) == 0:
        return np.asarray(x, dtype=np.float64)
    n_out = max(1, int(round(len(x) * sr_to / sr_from)))
    src_pos = np.arange(n_out) * (len(x) - 1) / max(1, n_out - 1)
    return np.interp(src_pos, np.arange(len(x)), x)


def crossfade_loop(x: np.ndarray, fade_frames: int) -> np.ndarray:
    """Trim a tail and overlap-add it onto the head so the loop seam is silent."""
    if fade_frames <= 0 or len(x) <= 2 * fade_frames:
        return x
    body = x[: len(x) - fade_frames].copy()
    tail = x[len(x) - fade_frames :]
    w = np.linspace(0.0, 1.0, fade_frames)
    body[:fade_frames] = body[:fade_frames] * w + tail * (1.0 - w)
    return body
