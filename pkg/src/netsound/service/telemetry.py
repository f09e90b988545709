"""Telemetry wire format: one JSON frame per closed window."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..analysis import Direction, TrafficAggregates
from ..capture.records import Protocol

_PROTO_KEYS = {Protocol.TCP: "tcp", Protocol.UDP: "udp", Protocol.ICMP: "icmp",
               Protocol.OTHER: "other"}
_DIR_KEYS = {Direction.INBOUND: "in", Direction.OUTBOUND: "out",
             Direction.INTERNAL: "internal", Direction.EXTERNAL: "external"}


@dataclass(frozen=True)
class AlertInfo:
    kind: str
    magnitude: float
    t: float


@dataclass(frozen=True)
class TelemetryFrame:
    """Everything the console plots for one window, plus live mix state."""

    window: int
    t: float  # window end, seconds since capture epoch
    window_s: float
    packets: int
    bytes: int
    pkt_rate: float
    byte_rate: float
    avg_pkt_rate: float
    rate_ratio: float
    by_proto: dict
    by_dir: dict
    unique_dst_ports: int
    mean_iat: float
    alerts: tuple[AlertInfo, ...]
    mixer: dict
    theme: str
    transport: str  # "running" | "paused"
    uptime: float


def frame_from_aggregate(
    agg: TrafficAggregates,
    mixer: dict,
    theme: str,
    transport: str,
    uptime: float,
) -> TelemetryFrame:
    return TelemetryFrame(
        window=agg.window_index,
        t=agg.window_start + agg.window_len,
        window_s=agg.window_len,
        packets=agg.packet_count,
        bytes=agg.byte_count,
        pkt_rate=agg.pkt_rate,
        byte_rate=agg.byte_rate,
        avg_pkt_rate=agg.avg_pkt_rate,
        rate_ratio=agg.rate_ratio,
        by_proto={key: agg.by_protocol[proto] for proto, key in _PROTO_KEYS.items()},
        by_dir={key: agg.by_direction[d] for d, key in _DIR_KEYS.items()},
        unique_dst_ports=agg.unique_dst_ports,
        mean_iat=agg.mean_inter_arrival,
        alerts=tuple(AlertInfo(a.kind, a.magnitude, a.ts) for a in agg.alerts),
        mixer=mixer,
        theme=theme,
        transport=transport,
        uptime=uptime,
    )


def _finite(value: float) -> float:
    return float(value) if math.isfinite(value) else 0.0


def encode_telemetry(frame: TelemetryFrame) -> dict:
    """JSON-ready telemetry object; numeric fields guaranteed finite."""
    return {
        "type": "telemetry",
        "window": frame.window,
        "t": _finite(frame.t),
        "window_s": _finite(frame.window_s),
        "packets": frame.packets,
        "bytes": frame.bytes,
        "pkt_rate": _finite(frame.pkt_rate),
        "byte_rate": _finite(frame.byte_rate),
        "avg_pkt_rate": _finite(frame.avg_pkt_rate),
        "rate_ratio": _finite(frame.rate_ratio),
        "by_proto": dict(frame.by_proto),
        "by_dir": dict(frame.by_dir),
        "unique_dst_ports": frame.unique_dst_ports,
        "mean_iat": _finite(frame.mean_iat),
        "alerts": [
            {"kind": a.kind, "magnitude": _finite(a.magnitude), "t": _finite(a.t)}
            for a in frame.alerts
        ],
        "mixer": frame.mixer,
        "theme": frame.theme,
        "transport": frame.transport,
        "uptime": _finite(frame.uptime),
    }


def decode_telemetry(doc: dict) -> TelemetryFrame:
    """Inverse of encode_telemetry."""
    if doc.get("type") != "telemetry":
        raise ValueError("not a telemetry message")
    return TelemetryFrame(
        window=int(doc["window"]),
        t=float(doc["t"]),
        window_s=float(doc["window_s"]),
        packets=int(doc["packets"]),
        bytes=int(doc["bytes"]),
        pkt_rate=float(doc["pkt_rate"]),
        byte_rate=float(doc["byte_rate"]),
        avg_pkt_rate=float(doc["avg_pkt_rate"]),
        rate_ratio=float(doc["rate_ratio"]),
        by_proto=dict(doc["by_proto"]),
        by_dir=dict(doc["by_dir"]),
        unique_dst_ports=int(doc["unique_dst_ports"]),
        mean_iat=float(doc["mean_iat"]),
        alerts=tuple(
            AlertInfo(a["kind"], float(a["magnitude"]), float(a["t"]))
            for a in doc["alerts"]
        ),
        mixer=dict(doc["mixer"]),
        theme=str(doc["theme"]),
        transport=str(doc["transport"]),
        uptime=float(doc["uptime"]),
    )
