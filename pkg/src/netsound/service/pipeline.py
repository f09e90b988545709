"""Pipeline orchestration: source -> analysis -> soundscape -> audio.

Offline mode is synchronous and deterministic: every record is processed
as fast as possible and the WAV is rendered in one batch at the end.
Timed mode paces records against the wall clock (scaled by speed), closes
empty windows on the clock so silence stays audible, and honours
pause/resume by freezing the source clock.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

import numpy as np

from ..analysis import (
    HomeNetConfig,
    PacketFeatures,
    WindowedAggregator,
    attach_features,
)
from ..audio import RenderConfig, SoundscapeEngine, render_offline, write_wav
from ..capture import (
    MonotonicClamp,
    PacketRecord,
    PcapReader,
    generate_scenario,
    get_adapter,
)
from ..soundscape import load_theme
from .config import ServiceConfig
from .control import ServiceState
from .telemetry import TelemetryFrame, frame_from_aggregate

@dataclass
class RunSummary:
    packets: int = 0
    malformed: int = 0
    non_monotonic: int = 0
    windows: int = 0
    alerts: int = 0
    duration: float = 0.0  # capture-time span
    wav_path: str | None = None

    def line(self) -> str:
        parts = [
            f"packets={self.packets}",
            f"malformed={self.malformed}",
            f"non_monotonic={self.non_monotonic}",
            f"windows={self.windows}",
            f"alerts={self.alerts}",
            f"duration={self.duration:.3f}s",
        ]
        if self.wav_path:
            parts.append(f"wav={self.wav_path}")
        return " ".join(parts)


class TelemetryHub:
    """Fan-out of telemetry frames from the pipeline thread to observers.

    Subscribers are plain callables invoked on the pipeline thread; network
    observers hand off to their event loop inside the callable. A slow or
    dying observer must never stall the pipeline, so exceptions are
    swallowed here (observer isolation).
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._subs: dict[int, Callable[[TelemetryFrame], None]] = {}
        self._next_id = 0

    def subscribe(self, fn: Callable[[TelemetryFrame], None]) -> int:
        with self._lock:
            token = self._next_id
            self._next_id += 1
            self._subs[token] = fn
            return token

    def unsubscribe(self, token: int) -> None:
        with self._lock:
            self._subs.pop(token, None)

    def publish(self, frame: TelemetryFrame) -> None:
        with self._lock:
            subs = list(self._subs.values())
        for fn in subs:
            try:
                fn(frame)
            except Exception:
                pass


class TransportPacer:
    """Maps capture timestamps onto wall deadlines, freezing while paused."""

    def __init__(self, state: ServiceState, speed: float):
        self._state = state
        self._speed = speed
        self._anchor_wall: float | None = None
        self._anchor_ts = 0.0
        self._pause_debt = 0.0

    def deadline(self, capture_ts: float) -> float:
        if self._anchor_wall is None:
            self._anchor_wall = time.monotonic()
            self._anchor_ts = capture_ts
        return (
            self._anchor_wall
            + self._pause_debt
            + (capture_ts - self._anchor_ts) / self._speed
        )

    def wait_until(self, capture_ts: float, stop: threading.Event) -> bool:
        """Sleep toward the deadline; returns False if stopped first."""
        while not stop.is_set():
            if not self._state.resume_event.is_set():
                t0 = time.monotonic()
                self._state.resume_event.wait(timeout=0.1)
                self._pause_debt += time.monotonic() - t0
                continue
            remaining = self.deadline(capture_ts) - time.monotonic()
            if remaining <= 0:
                return True
            time.sleep(min(remaining, 0.1))
        return False


class SonificationService:
    """Owns the pipeline state and runs it offline or against the clock."""

    def __init__(self, config: ServiceConfig):
        config.validate()
        self.config = config
        theme = load_theme(config.theme)
        self.state = ServiceState(theme, config.history_len)
        self.hub = TelemetryHub()
        self.home = HomeNetConfig.from_prefixes(config.home_networks)
        self.summary = RunSummary()
        self._reader: PcapReader | None = None
        self._clamp = MonotonicClamp()

    # -- sources --------------------------------------------------------------

    def _open_records(self) -> Iterator[PacketRecord]:
        src = self.config.source
        if src.kind == "pcap":
            stream = open(src.pcap_path, "rb")
            self._reader = PcapReader(stream)

            def read_all() -> Iterator[PacketRecord]:
                try:
                    for record in self._reader:
                        yield self._clamp.apply(record)
                finally:
                    stream.close()

            return read_all()
        if src.kind == "scenario":
            return generate_scenario(src.scenario)
        adapter = get_adapter(src.adapter)
        return (self._clamp.apply(r) for r in adapter.packets())

    def _features(self) -> Iterator[PacketFeatures]:
        return attach_features(self._track(self._open_records()), self.home)

    def _track(self, records: Iterable[PacketRecord]) -> Iterator[PacketRecord]:
        first = None
        last = 0.0
        for record in records:
            if first is None:
                first = record.ts
            last = record.ts
            self.summary.packets += 1
            self.summary.duration = last - first
            yield record

    # -- emission ---------------------------------------------------------------

    def _emit(self, agg) -> TelemetryFrame:
        frame = frame_from_aggregate(
            agg,
            mixer=self.state.mixer_snapshot(),
            theme=self.state.theme.name,
            transport=self.state.transport,
            uptime=self.state.uptime(),
        )
        self.state.record_frame(frame)
        self.hub.publish(frame)
        self.summary.windows += 1
        self.summary.alerts += len(agg.alerts)
        return frame

    def _finalize(self) -> RunSummary:
        if self._reader is not None:
            self.summary.malformed = self._reader.malformed
        self.summary.non_monotonic = self._clamp.violations
        return self.summary

    # -- offline ------------------------------------------------------------------

    def run_offline(self) -> RunSummary:
        windows = WindowedAggregator(self.config.analysis)
        aggregates = []
        for feat in self._features():
            for agg in windows.push(feat):
                aggregates.append(agg)
                self._emit(agg)
        final = windows.flush()
        if final is not None:
            aggregates.append(final)
            self._emit(final)
        if self.config.outputs.wav:
            with self.state.lock:
                theme = self.state.theme
                mixer = self.state.mixer.clone()
            frames = render_offline(aggregates, theme, mixer, self.config.render)
            write_wav(frames, self.config.outputs.wav, self.config.render)
            self.summary.wav_path = self.config.outputs.wav
        return self._finalize()

    # -- timed ----------------------------------------------------------------------

    def run_timed(self, stop: threading.Event) -> RunSummary:
        cfg = self.config
        windows = WindowedAggregator(cfg.analysis)
        pacer = TransportPacer(self.state, cfg.source.speed)
        sink = _AudioSink(self.state, cfg.render, cfg.outputs.wav, cfg.outputs.device)

        features = self._features()
        pending = next(features, None)
        while pending is not None and not stop.is_set():
            next_close = windows.next_close_ts()
            if next_close is not None and next_close <= pending.record.ts:
                # window ends before the next packet: close it on the clock
                if not pacer.wait_until(next_close, stop):
                    break
                for agg in windows.close_through(next_close):
                    sink.window(agg, self._emit(agg))
                continue
            if not pacer.wait_until(pending.record.ts, stop):
                break
            for agg in windows.push(pending):
                sink.window(agg, self._emit(agg))
            pending = next(features, None)
        if not stop.is_set():
            final = windows.flush()
            if final is not None:
                sink.window(final, self._emit(final))
        self.summary.wav_path = sink.finalize()
        return self._finalize()


class _AudioSink:
    """Streams engine blocks to the device and/or collects them for the WAV."""

    def __init__(
        self,
        state: ServiceState,
        render_cfg: RenderConfig,
        wav_path: str | None,
        device_name: str | None,
    ):
        self._state = state
        self._cfg = render_cfg
        self._wav_path = wav_path
        self._blocks: list[np.ndarray] = []
        self._device = None
        if device_name:
            from ..audio.engine import get_device

            self._device = get_device(device_name)
        self._engine = (
            SoundscapeEngine(state.theme, render_cfg)
            if (wav_path or self._device)
            else None
        )
        self._epoch = state.theme_epoch

    def window(self, agg, _frame: TelemetryFrame) -> None:
        if self._engine is None:
            return
        if self._state.theme_epoch != self._epoch:
            self._engine.set_theme(self._state.theme)
            self._epoch = self._state.theme_epoch
        for block in self._engine.window_blocks(agg, self._state.mixer):
            if self._wav_path:
                self._blocks.append(block)
            if self._device is not None:
                self._device.write(block)

    def finalize(self) -> str | None:
        if self._device is not None:
            self._device.close()
        if not self._wav_path:
            return None
        frames = (
            np.concatenate(self._blocks)
            if self._blocks
            else np.zeros((0, self._cfg.channels))
        )
        write_wav(frames, self._wav_path, self._cfg)
        return self._wav_path
