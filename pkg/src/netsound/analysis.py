"""Traffic analysis: per-packet features and windowed aggregate statistics.

Per packet we derive gateway-relative direction and the elapsed time since
the previous packet in the stream. Packets are then bucketed into tumbling
windows anchored at the first packet's timestamp; each window yields rates,
breakdowns, a running-average packet rate, and salience alerts. Empty
windows are emitted too: silence is information in a soundscape.
"""

from __future__ import annotations

import enum
import ipaddress
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

from .capture.records import PacketRecord, Protocol

RATE_RATIO_EPSILON = 1e-9


class Direction(enum.Enum):
    INBOUND = "in"
    OUTBOUND = "out"
    INTERNAL = "internal"
    EXTERNAL = "external"


@lru_cache(maxsize=4096)
def _parse_addr(text: str) -> ipaddress.IPv4Address | ipaddress.IPv6Address:
    return ipaddress.ip_address(text)


@dataclass(frozen=True)
class HomeNetConfig:
    """The CIDR prefixes that count as "inside the gateway"."""

    home_networks: tuple[ipaddress.IPv4Network | ipaddress.IPv6Network, ...]

    def __post_init__(self) -> None:
        if not self.home_networks:
            raise ValueError("at least one home network is required")

    @classmethod
    def from_prefixes(cls, prefixes: Iterable[str]) -> "HomeNetConfig":
        return cls(tuple(ipaddress.ip_network(p, strict=False) for p in prefixes))

    def contains(self, addr: str) -> bool:
        ip = _parse_addr(addr)
        return any(ip.version == net.version and ip in net for net in self.home_networks)


def classify_direction(record: PacketRecord, cfg: HomeNetConfig) -> Direction:
    """Total function of (src in home, dst in home)."""
    src_home = cfg.contains(record.src_addr)
    dst_home = cfg.contains(record.dst_addr)
    if src_home and dst_home:
        return Direction.INTERNAL
    if src_home:
        return Direction.OUTBOUND
    if dst_home:
        return Direction.INBOUND
    return Direction.EXTERNAL


@dataclass(frozen=True)
class PacketFeatures:
    record: PacketRecord
    direction: Direction
    inter_arrival: float | None  # None for the first packet of the stream


def attach_features(
    records: Iterable[PacketRecord], cfg: HomeNetConfig
) -> Iterator[PacketFeatures]:
    """Add direction and whole-stream (not per-flow) inter-arrival time."""
    prev_ts: float | None = None
    for record in records:
        gap = None if prev_ts is None else record.ts - prev_ts
        yield PacketFeatures(record, classify_direction(record, cfg), gap)
        prev_ts = record.ts


@dataclass(frozen=True)
class AnalysisConfig:
    window_len: float = 1.0
    avg_mode: str = "exponential"  # "cumulative" | "exponential"
    ewma_tau: float = 60.0
    spike_factor: float = 3.0
    spike_min_rate: float = 10.0
    scan_port_threshold: int = 100
    warmup_windows: int = 5

    def __post_init__(self) -> None:
        if self.window_len <= 0:
            raise ValueError("window_len must be positive")
        if self.avg_mode not in ("cumulative", "exponential"):
            raise ValueError(f"unknown avg_mode {self.avg_mode!r}")
        if self.ewma_tau <= 0:
            raise ValueError("ewma_tau must be positive")
        if self.spike_factor <= 1:
            raise ValueError("spike_factor must exceed 1")
        if self.warmup_windows < 0:
            raise ValueError("warmup_windows must be non-negative")


@dataclass(frozen=True)
class AlertEvent:
    ts: float  # window close time
    kind: str  # "rate_spike" | "port_scan"
    magnitude: float  # >= 1 at emission
    variable: str


@dataclass
class TrafficAggregates:
    window_index: int
    window_start: float
    window_len: float
    packet_count: int
    byte_count: int
    pkt_rate: float
    byte_rate: float
    avg_pkt_rate: float
    rate_ratio: float
    by_protocol: dict[Protocol, int]
    by_direction: dict[Direction, int]
    mean_inter_arrival: float
    unique_dst_ports: int
    alerts: list[AlertEvent] = field(default_factory=list)


class RunningAverage:
    """Running average of window packet rates.

    cumulative: arithmetic mean of every window rate seen so far.
    exponential: EWMA with alpha = 1 - exp(-W/tau), seeded with the first
    window's rate; bounded memory and tracks regime changes.
    """

    def __init__(self, cfg: AnalysisConfig):
        self._mode = cfg.avg_mode
        self._alpha = 1.0 - math.exp(-cfg.window_len / cfg.ewma_tau)
        self._sum = 0.0
        self._count = 0
        self._avg: float | None = None

    @property
    def alpha(self) -> float:
        return self._alpha

    def update(self, rate: float) -> float:
        if self._mode == "cumulative":
            self._sum += rate
            self._count += 1
            return self._sum / self._count
        if self._avg is None:
            self._avg = rate
        else:
            self._avg = self._alpha * rate + (1.0 - self._alpha) * self._avg
        return self._avg


def detect_alerts(agg: TrafficAggregates, cfg: AnalysisConfig) -> list[AlertEvent]:
    """Threshold checks that make exceptional windows immediately noticeable.

    Nothing fires during warm-up while the running average initializes.
    """
    if agg.window_index < cfg.warmup_windows:
        return []
    ts = agg.window_start + agg.window_len
    alerts: list[AlertEvent] = []
    if (
        agg.pkt_rate > cfg.spike_factor * agg.avg_pkt_rate
        and agg.pkt_rate > cfg.spike_min_rate
    ):
        alerts.append(AlertEvent(ts, "rate_spike", agg.rate_ratio, "pkt_rate"))
    if agg.unique_dst_ports > cfg.scan_port_threshold:
        alerts.append(
            AlertEvent(
                ts,
                "port_scan",
                agg.unique_dst_ports / cfg.scan_port_threshold,
                "unique_dst_ports",
            )
        )
    return alerts


class _WindowAccumulator:
    __slots__ = ("packets", "bytes", "by_protocol", "by_direction", "ia_sum", "ia_count", "dst_ports")

    def __init__(self) -> None:
        self.packets = 0
        self.bytes = 0
        self.by_protocol = {p: 0 for p in Protocol}
        self.by_direction = {d: 0 for d in Direction}
        self.ia_sum = 0.0
        self.ia_count = 0
        self.dst_ports: set[int] = set()

    def add(self, feat: PacketFeatures) -> None:
        rec = feat.record
        self.packets += 1
        self.bytes += rec.wire_len
        self.by_protocol[rec.protocol] += 1
        self.by_direction[feat.direction] += 1
        if feat.inter_arrival is not None:
            self.ia_sum += feat.inter_arrival
            self.ia_count += 1
        if rec.protocol in (Protocol.TCP, Protocol.UDP):
            self.dst_ports.add(rec.dst_port)


class WindowedAggregator:
    """Push-style tumbling-window accumulator.

    Windows are [t0 + k*W, t0 + (k+1)*W) with t0 the first packet's
    timestamp; gaps produce zero-count windows rather than being skipped.
    push() closes windows as packets arrive; close_through() lets a live
    pipeline close empty windows on the clock so silence stays audible.
    """

    def __init__(self, cfg: AnalysisConfig):
        self.cfg = cfg
        self._tracker = RunningAverage(cfg)
        self._t0: float | None = None
        self._index = 0
        self._acc = _WindowAccumulator()

    @property
    def anchor(self) -> float | None:
        return self._t0

    def next_close_ts(self) -> float | None:
        """Capture time at which the current window ends."""
        if self._t0 is None:
            return None
        return self._t0 + (self._index + 1) * self.cfg.window_len

    def push(self, feat: PacketFeatures) -> list[TrafficAggregates]:
        """Add one packet; returns any windows it closed."""
        if self._t0 is None:
            self._t0 = feat.record.ts
        idx = int(math.floor((feat.record.ts - self._t0) / self.cfg.window_len))
        closed = []
        while idx > self._index:
            closed.append(self._finish())
        self._acc.add(feat)
        return closed

    def close_through(self, ts: float) -> list[TrafficAggregates]:
        """Close every window whose end is at or before capture time ts."""
        closed = []
        if self._t0 is None:
            return closed
        while self._t0 + (self._index + 1) * self.cfg.window_len <= ts:
            closed.append(self._finish())
        return closed

    def flush(self) -> TrafficAggregates | None:
        """Close the in-progress window at end of stream."""
        if self._t0 is None:
            return None
        return self._finish()

    def _finish(self) -> TrafficAggregates:
        agg = _finish(self._acc, self._index, self._t0, self.cfg, self._tracker)
        self._acc = _WindowAccumulator()
        self._index += 1
        return agg


def aggregate(
    features: Iterable[PacketFeatures], cfg: AnalysisConfig
) -> Iterator[TrafficAggregates]:
    """Tumbling-window statistics, one TrafficAggregates per window in order."""
    windows = WindowedAggregator(cfg)
    for feat in features:
        yield from windows.push(feat)
    final = windows.flush()
    if final is not None:
        yield final


def _finish(
    acc: _WindowAccumulator,
    index: int,
    t0: float,
    cfg: AnalysisConfig,
    tracker: RunningAverage,
) -> TrafficAggregates:
    pkt_rate = acc.packets / cfg.window_len
    avg = tracker.update(pkt_rate)
    agg = TrafficAggregates(
        window_index=index,
        window_start=t0 + index * cfg.window_len,
        window_len=cfg.window_len,
        packet_count=acc.packets,
        byte_count=acc.bytes,
        pkt_rate=pkt_rate,
        byte_rate=acc.bytes / cfg.window_len,
        avg_pkt_rate=avg,
        rate_ratio=pkt_rate / max(avg, RATE_RATIO_EPSILON),
        by_protocol=acc.by_protocol,
        by_direction=acc.by_direction,
        mean_inter_arrival=acc.ia_sum / acc.ia_count if acc.ia_count else 0.0,
        unique_dst_ports=len(acc.dst_ports),
    )
    agg.alerts = detect_alerts(agg, cfg)
    return agg
