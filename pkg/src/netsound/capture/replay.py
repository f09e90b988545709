"""Replay pcap streams into a record sink, timed or as fast as possible."""

from __future__ import annotations

import dataclasses
import math
import time
from dataclasses import dataclass
from typing import BinaryIO, Callable, Iterator, Protocol as TypingProtocol

from .pcap import PcapReader
from .records import PacketRecord


@dataclass
class ReplaySummary:
    packets: int = 0
    malformed: int = 0
    duration: float = 0.0
    non_monotonic: int = 0


class MonotonicClamp:
    """Clamps out-of-order timestamps to the previous one and counts them.

    Real captures contain backward steps; analysis requires non-decreasing
    time, so we flag and clamp instead of aborting the stream.
    """

    def __init__(self) -> None:
        self.violations = 0
        self._prev: float | None = None

    def apply(self, record: PacketRecord) -> PacketRecord:
        if self._prev is not None and record.ts < self._prev:
            self.violations += 1
            record = dataclasses.replace(record, ts=self._prev)
        self._prev = record.ts
        return record


def replay(
    stream: BinaryIO,
    speed_factor: float,
    sink: Callable[[PacketRecord], None],
    *,
    sleep: Callable[[float], None] = time.sleep,
) -> ReplaySummary:
    """Deliver every decodable record in file order to sink.

    speed_factor scales playback: 2.0 is twice as fast, math.inf disables
    pacing entirely (offline mode). Decode failures are tallied, not fatal.
    """
    if not speed_factor > 0:
        raise ValueError("speed_factor must be positive")
    reader = PcapReader(stream)
    clamp = MonotonicClamp()
    summary = ReplaySummary()
    timed = math.isfinite(speed_factor)
    first_ts: float | None = None
    prev_ts: float | None = None
    for record in reader:
        record = clamp.apply(record)
        if timed and prev_ts is not None:
            gap = (record.ts - prev_ts) / speed_factor
            if gap > 0:
                sleep(gap)
        sink(record)
        summary.packets += 1
        if first_ts is None:
            first_ts = record.ts
        prev_ts = record.ts
    summary.malformed = reader.malformed
    summary.non_monotonic = clamp.violations
    if first_ts is not None and prev_ts is not None:
        summary.duration = prev_ts - first_ts
    return summary


class LiveAdapter(TypingProtocol):
    """Pluggable live-capture source producing PacketRecords.

    OS-specific implementations register themselves by name; none ships in
    the core package, which keeps the pipeline portable and testable.
    """

    def packets(self) -> Iterator[PacketRecord]: ...


_ADAPTERS: dict[str, Callable[[], LiveAdapter]] = {}


def register_adapter(name: str, factory: Callable[[], LiveAdapter]) -> None:
    _ADAPTERS[name] = factory


def get_adapter(name: str) -> LiveAdapter:
    try:
        return _ADAPTERS[name]()
    except KeyError:
        raise KeyError(
            f"no live adapter named {name!r} is registered"
        ) from None
