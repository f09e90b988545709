"""Classic pcap container: 24-byte global header, 16-byte record headers.

Both byte orders and both timestamp resolutions (micro/nano magic) are
supported, bit-exact. pcapng is out of scope.
"""

from __future__ import annotations

import struct
from typing import BinaryIO, Iterable, Iterator

from .frames import decode_frame, encode_frame
from .records import (
    SUPPORTED_LINK_TYPES,
    CaptureMeta,
    DecodeError,
    PacketRecord,
    TruncatedRecord,
    UnknownMagic,
    UnsupportedLinkType,
)

GLOBAL_HEADER_LEN = 24
RECORD_HEADER_LEN = 16

MAGIC_MICRO = 0xA1B2C3D4
MAGIC_NANO = 0xA1B23C4D

# magic as read big-endian from the stream -> (resolution, byte_order)
_MAGICS = {
    MAGIC_MICRO: ("micro", "native"),
    0xD4C3B2A1: ("micro", "swapped"),
    MAGIC_NANO: ("nano", "native"),
    0x4D3CB2A1: ("nano", "swapped"),
}


def parse_pcap_header(data: bytes) -> CaptureMeta:
    """Parse the 24-byte pcap global header."""
    if len(data) != GLOBAL_HEADER_LEN:
        raise UnknownMagic(f"expected {GLOBAL_HEADER_LEN} header bytes, got {len(data)}")
    magic = struct.unpack_from(">I", data)[0]
    if magic not in _MAGICS:
        raise UnknownMagic(f"unrecognized magic 0x{magic:08x}")
    resolution, byte_order = _MAGICS[magic]
    prefix = "<" if byte_order == "swapped" else ">"
    _major, _minor, _thiszone, _sigfigs, snaplen, link_type = struct.unpack_from(
        prefix + "HHiIII", data, 4
    )
    if link_type not in SUPPORTED_LINK_TYPES:
        raise UnsupportedLinkType(f"link type {link_type} not supported")
    if snaplen <= 0:
        raise UnknownMagic(f"invalid snap length {snaplen}")
    return CaptureMeta(resolution, byte_order, link_type, snaplen)


def parse_pcap_record(
    data: bytes, meta: CaptureMeta, offset: int = 0
) -> tuple[PacketRecord, int]:
    """Parse one record starting at offset; returns (record, bytes consumed).

    Raises TruncatedRecord when the header or payload is short, and
    propagates DecodeError from the frame decoder.
    """
    if len(data) - offset < RECORD_HEADER_LEN:
        raise TruncatedRecord("record header cut short")
    ts_sec, ts_frac, incl_len, orig_len = struct.unpack_from(
        meta.struct_prefix + "IIII", data, offset
    )
    payload_start = offset + RECORD_HEADER_LEN
    if len(data) - payload_start < incl_len:
        raise TruncatedRecord(
            f"payload cut short: need {incl_len}, have {len(data) - payload_start}"
        )
    payload = data[payload_start : payload_start + incl_len]
    fields = decode_frame(meta.link_type, payload)
    record = PacketRecord(
        ts=ts_sec + ts_frac * meta.ts_frac_scale,
        src_addr=fields.src_addr,
        dst_addr=fields.dst_addr,
        src_port=fields.src_port,
        dst_port=fields.dst_port,
        protocol=fields.protocol,
        proto_code=fields.proto_code,
        wire_len=orig_len,
        captured_len=incl_len,
    )
    return record, RECORD_HEADER_LEN + incl_len


class PcapReader:
    """Streams PacketRecords from a pcap file object.

    Undecodable frames are tallied in .malformed and skipped; a truncated
    trailing record also counts as malformed and ends the stream.
    """

    def __init__(self, stream: BinaryIO):
        header = stream.read(GLOBAL_HEADER_LEN)
        if len(header) < GLOBAL_HEADER_LEN:
            raise UnknownMagic("stream shorter than a pcap global header")
        self.meta = parse_pcap_header(header)
        self._stream = stream
        self.malformed = 0

    def __iter__(self) -> Iterator[PacketRecord]:
        prefix = self.meta.struct_prefix
        while True:
            header = self._stream.read(RECORD_HEADER_LEN)
            if not header:
                return
            if len(header) < RECORD_HEADER_LEN:
                self.malformed += 1
                return
            ts_sec, ts_frac, incl_len, orig_len = struct.unpack(prefix + "IIII", header)
            payload = self._stream.read(incl_len)
            if len(payload) < incl_len:
                self.malformed += 1
                return
            try:
                fields = decode_frame(self.meta.link_type, payload)
            except DecodeError:
                self.malformed += 1
                continue
            yield PacketRecord(
                ts=ts_sec + ts_frac * self.meta.ts_frac_scale,
                src_addr=fields.src_addr,
                dst_addr=fields.dst_addr,
                src_port=fields.src_port,
                dst_port=fields.dst_port,
                protocol=fields.protocol,
                proto_code=fields.proto_code,
                wire_len=orig_len,
                captured_len=incl_len,
            )


def write_pcap(
    records: Iterable[PacketRecord],
    stream: BinaryIO,
    *,
    resolution: str = "micro",
    byte_order: str = "native",
    snap_length: int = 65535,
) -> int:
    """Write records as an Ethernet pcap; returns the number written."""
    if resolution not in ("micro", "nano"):
        raise ValueError(f"unknown resolution {resolution!r}")
    if byte_order not in ("native", "swapped"):
        raise ValueError(f"unknown byte order {byte_order!r}")
    prefix = "<" if byte_order == "swapped" else ">"
    magic = MAGIC_NANO if resolution == "nano" else MAGIC_MICRO
    scale = 1_000_000_000 if resolution == "nano" else 1_000_000
    stream.write(struct.pack(prefix + "IHHiIII", magic, 2, 4, 0, 0, snap_length, 1))
    count = 0
    for record in records:
        frame = encode_frame(record)
        sec = int(record.ts)
        frac = round((record.ts - sec) * scale)
        if frac >= scale:  # rounding carried into the next second
            sec += 1
            frac -= scale
        stream.write(
            struct.pack(prefix + "IIII", sec, frac, record.captured_len, record.wire_len)
        )
        stream.write(frame)
        count += 1
    return count
