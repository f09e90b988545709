"""Core packet record types shared by the pcap decoder and the scenario generator."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class CaptureError(Exception):
    """Base class for capture-layer failures."""


class UnknownMagic(CaptureError):
    """The stream does not start with a recognized pcap magic number."""


class UnsupportedLinkType(CaptureError):
    """The pcap declares a link type the frame decoder cannot handle."""


class TruncatedRecord(CaptureError):
    """A record header or payload ends before its declared length."""


class DecodeError(CaptureError):
    """A single frame could not be decoded (counted as malformed, never fatal)."""


class Protocol(enum.Enum):
    TCP = "tcp"
    UDP = "udp"
    ICMP = "icmp"
    OTHER = "other"

    @classmethod
    def from_ip_proto(cls, code: int) -> "Protocol":
        if code == 6:
            return cls.TCP
        if code == 17:
            return cls.UDP
        if code in (1, 58):  # ICMPv4 / ICMPv6
            return cls.ICMP
        return cls.OTHER


# pcap link types the decoder understands
LINKTYPE_ETHERNET = 1
LINKTYPE_RAW_IP = 101
SUPPORTED_LINK_TYPES = (LINKTYPE_ETHERNET, LINKTYPE_RAW_IP)


@dataclass(frozen=True)
class CaptureMeta:
    """Global pcap header fields needed to decode the records that follow."""

    timestamp_resolution: str  # "micro" | "nano"
    byte_order: str  # "native" (magic bytes in canonical order) | "swapped"
    link_type: int
    snap_length: int

    @property
    def ts_frac_scale(self) -> float:
        return 1e-9 if self.timestamp_resolution == "nano" else 1e-6

    @property
    def struct_prefix(self) -> str:
        return "<" if self.byte_order == "swapped" else ">"


@dataclass(frozen=True)
class PacketRecord:
    """One decoded packet: when it happened, who talked to whom, and how big it was.

    Port fields are 0 whenever the protocol carries no ports (ICMP, unknown
    transports, and non-leading IP fragments).
    """

    ts: float  # seconds since capture epoch
    src_addr: str
    dst_addr: str
    src_port: int
    dst_port: int
    protocol: Protocol
    proto_code: int  # raw IP protocol number (6, 17, 1, ...)
    wire_len: int
    captured_len: int

    def __post_init__(self) -> None:
        if self.captured_len > self.wire_len:
            raise ValueError(
                f"captured_len {self.captured_len} exceeds wire_len {self.wire_len}"
            )
        if not (0 <= self.src_port <= 65535 and 0 <= self.dst_port <= 65535):
            raise ValueError("ports must be in 0..65535")
        if self.protocol not in (Protocol.TCP, Protocol.UDP) and (
            self.src_port or self.dst_port
        ):
            raise ValueError(f"{self.protocol.value} records must carry ports 0")
