"""Packet sources: pcap files, synthetic scenarios, and live-capture adapters."""

from .frames import FrameFields, decode_frame, encode_frame, min_frame_len
from .pcap import PcapReader, parse_pcap_header, parse_pcap_record, write_pcap
from .records import (
    CaptureMeta,
    CaptureError,
    DecodeError,
    PacketRecord,
    Protocol,
    TruncatedRecord,
    UnknownMagic,
    UnsupportedLinkType,
)
from .replay import (
    LiveAdapter,
    MonotonicClamp,
    ReplaySummary,
    get_adapter,
    register_adapter,
    replay,
)
from .scenario import INTERNAL_NET, InvalidSpec, ScenarioSpec, generate_scenario

__all__ = [
    "CaptureError",
    "CaptureMeta",
    "DecodeError",
    "FrameFields",
    "INTERNAL_NET",
    "InvalidSpec",
    "LiveAdapter",
    "MonotonicClamp",
    "PacketRecord",
    "PcapReader",
    "Protocol",
    "ReplaySummary",
    "ScenarioSpec",
    "TruncatedRecord",
    "UnknownMagic",
    "UnsupportedLinkType",
    "decode_frame",
    "encode_frame",
    "generate_scenario",
    "get_adapter",
    "min_frame_len",
    "parse_pcap_header",
    "parse_pcap_record",
    "register_adapter",
    "replay",
    "write_pcap",
]
