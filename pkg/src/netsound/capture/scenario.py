"""Seeded synthetic traffic scenarios for tests, demos, and offline renders.

Every stream is a deterministic function of (spec, seed): timestamps come
from an exponential-gap process, addresses from a fixed internal /24 plus a
fixed external set, so downstream direction classification is reproducible.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Iterator

from .records import PacketRecord, Protocol

KINDS = ("steady", "burst", "port_scan", "quiet")

# Fixed address plan: tests rely on these for direction classification.
INTERNAL_NET = "10.0.77.0/24"
_INTERNAL_HOSTS = [f"10.0.77.{i}" for i in range(2, 30)]
_EXTERNAL_HOSTS = [
    "93.184.216.34",
    "8.8.8.8",
    "1.1.1.1",
    "151.101.1.140",
    "140.82.121.4",
    "104.16.132.229",
    "185.199.108.153",
    "23.185.0.2",
]
_SCAN_SOURCE = "203.0.113.66"
_SCAN_TARGET = "10.0.77.10"
_SERVER_PORTS = [80, 443, 53, 22, 25, 123, 8080]


class InvalidSpec(ValueError):
    """The scenario description violates its own constraints."""


@dataclass(frozen=True)
class ScenarioSpec:
    kind: str
    duration: float
    base_rate: float
    burst_rate: float = 0.0
    burst_window: tuple[float, float] = (0.0, 0.0)
    scan_ports: int = 0
    seed: int = 0

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown scenario kind {self.kind!r}")
        if self.duration <= 0:
            raise InvalidSpec("duration must be positive")
        if self.base_rate < 0:
            raise InvalidSpec("base_rate must be non-negative")
        if self.kind == "burst":
            if self.burst_rate <= self.base_rate:
                raise InvalidSpec("burst_rate must exceed base_rate")
            start, end = self.burst_window
            if not (0 <= start < end):
                raise InvalidSpec("burst_window must satisfy 0 <= start < end")
        if self.kind == "port_scan" and self.scan_ports <= 0:
            raise InvalidSpec("port_scan needs scan_ports > 0")

    @classmethod
    def from_dict(cls, doc: dict) -> "ScenarioSpec":
        try:
            spec = cls(
                kind=doc["kind"],
                duration=float(doc["duration"]),
                base_rate=float(doc["base_rate"]),
                burst_rate=float(doc.get("burst_rate", 0.0)),
                burst_window=tuple(doc.get("burst_window", (0.0, 0.0))),  # type: ignore[arg-type]
                scan_ports=int(doc.get("scan_ports", 0)),
                seed=int(doc.get("seed", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidSpec(f"bad scenario document: {exc}") from exc
        spec.validate()
        return spec

    @classmethod
    def from_json(cls, text: str) -> "ScenarioSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidSpec(f"scenario is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise InvalidSpec("scenario JSON must be an object")
        return cls.from_dict(doc)


@dataclass
class _PortPool:
    """Draws distinct ports without replacement, reshuffling when exhausted."""

    rng: random.Random
    size: int
    _bag: list[int] = field(default_factory=list)

    def next(self) -> int:
        if not self._bag:
            self._bag = list(range(20000, 20000 + self.size))
            self.rng.shuffle(self._bag)
        return self._bag.pop()


def _rate_at(spec: ScenarioSpec, t: float) -> float:
    if spec.kind == "quiet":
        return spec.base_rate / 10.0
    if spec.kind == "burst":
        start, end = spec.burst_window
        if start <= t < end:
            return spec.burst_rate
    return spec.base_rate


def _next_boundary(spec: ScenarioSpec, t: float) -> float:
    """Next instant where the rate changes, capped at the scenario end."""
    boundary = spec.duration
    if spec.kind == "burst":
        for edge in spec.burst_window:
            if t < edge < boundary:
                boundary = edge
    return boundary


def generate_scenario(spec: ScenarioSpec) -> Iterator[PacketRecord]:
    """Yield PacketRecords in timestamp order for the given scenario."""
    spec.validate()
    rng = random.Random(spec.seed)
    pool = _PortPool(rng, spec.scan_ports) if spec.kind == "port_scan" else None

    # Piecewise-constant Poisson process: gaps restart at rate boundaries,
    # which is exact thanks to the exponential's memorylessness.
    t = 0.0
    while t < spec.duration:
        rate = _rate_at(spec, t)
        boundary = _next_boundary(spec, t)
        if rate <= 0:
            if boundary >= spec.duration:
                return
            t = boundary
            continue
        gap = rng.expovariate(rate)
        if t + gap >= boundary:
            t = boundary
            continue
        t += gap
        if pool is not None:
            yield _scan_packet(rng, pool, t)
        else:
            yield _mixed_packet(rng, t)


def _mixed_packet(rng: random.Random, t: float) -> PacketRecord:
    outbound = rng.random() < 0.5
    internal = rng.choice(_INTERNAL_HOSTS)
    external = rng.choice(_EXTERNAL_HOSTS)
    roll = rng.random()
    if roll < 0.6:
        protocol, code = Protocol.TCP, 6
    elif roll < 0.9:
        protocol, code = Protocol.UDP, 17
    else:
        protocol, code = Protocol.ICMP, 1

    if protocol is Protocol.ICMP:
        sport = dport = 0
        size = rng.randrange(60, 120)
    else:
        server_port = rng.choice(_SERVER_PORTS)
        ephemeral = rng.randrange(1024, 65536)
        sport, dport = (ephemeral, server_port) if outbound else (server_port, ephemeral)
        size = rng.randrange(60, 1500)

    src, dst = (internal, external) if outbound else (external, internal)
    return PacketRecord(
        ts=t,
        src_addr=src,
        dst_addr=dst,
        src_port=sport,
        dst_port=dport,
        protocol=protocol,
        proto_code=code,
        wire_len=size,
        captured_len=size,
    )


def _scan_packet(rng: random.Random, pool: _PortPool, t: float) -> PacketRecord:
    return PacketRecord(
        ts=t,
        src_addr=_SCAN_SOURCE,
        dst_addr=_SCAN_TARGET,
        src_port=rng.randrange(1024, 65536),
        dst_port=pool.next(),
        protocol=Protocol.TCP,
        proto_code=6,
        wire_len=60,
        captured_len=60,
    )
