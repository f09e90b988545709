"""Link-layer and IP frame codec: Ethernet (with 802.1Q) and raw-IP, IPv4/IPv6, TCP/UDP/ICMP.

decode_frame extracts the addressing fields a sonification pipeline needs;
encode_frame builds a minimal well-formed frame back from a record so
generated scenarios can be written to pcap files.
"""

from __future__ import annotations

import ipaddress
import struct
from dataclasses import dataclass

from .records import (
    LINKTYPE_ETHERNET,
    LINKTYPE_RAW_IP,
    DecodeError,
    PacketRecord,
    Protocol,
)

ETHERTYPE_IPV4 = 0x0800
ETHERTYPE_IPV6 = 0x86DD
ETHERTYPE_VLAN = 0x8100

ETH_HEADER_LEN = 14
VLAN_TAG_LEN = 4
IPV4_MIN_HEADER = 20
IPV6_HEADER = 40


@dataclass(frozen=True)
class FrameFields:
    """Addressing fields decoded from one frame (everything but timing/sizes)."""

    src_addr: str
    dst_addr: str
    src_port: int
    dst_port: int
    protocol: Protocol
    proto_code: int


def decode_frame(link_type: int, payload: bytes) -> FrameFields:
    """Decode one captured frame down to transport ports.

    Raises DecodeError for anything that is not a parseable IP packet
    (non-IP ethertypes, truncated headers). Callers tally those as
    malformed rather than aborting.
    """
    if not payload:
        raise DecodeError("empty frame")

    if link_type == LINKTYPE_ETHERNET:
        offset = ETH_HEADER_LEN
        if len(payload) < offset:
            raise DecodeError("truncated Ethernet header")
        ethertype = struct.unpack_from("!H", payload, 12)[0]
        if ethertype == ETHERTYPE_VLAN:
            offset += VLAN_TAG_LEN
            if len(payload) < offset:
                raise DecodeError("truncated 802.1Q tag")
            ethertype = struct.unpack_from("!H", payload, offset - 2)[0]
        if ethertype == ETHERTYPE_IPV4:
            return _decode_ipv4(payload, offset)
        if ethertype == ETHERTYPE_IPV6:
            return _decode_ipv6(payload, offset)
        raise DecodeError(f"non-IP ethertype 0x{ethertype:04x}")

    if link_type == LINKTYPE_RAW_IP:
        version = payload[0] >> 4
        if version == 4:
            return _decode_ipv4(payload, 0)
        if version == 6:
            return _decode_ipv6(payload, 0)
        raise DecodeError(f"unknown IP version {version}")

    raise DecodeError(f"unsupported link type {link_type}")


def _decode_ipv4(payload: bytes, offset: int) -> FrameFields:
    if len(payload) < offset + IPV4_MIN_HEADER:
        raise DecodeError("truncated IPv4 header")
    first = payload[offset]
    if first >> 4 != 4:
        raise DecodeError("IPv4 version mismatch")
    ihl = (first & 0x0F) * 4
    if ihl < IPV4_MIN_HEADER or len(payload) < offset + ihl:
        raise DecodeError("truncated IPv4 options")
    proto_code = payload[offset + 9]
    src = str(ipaddress.IPv4Address(payload[offset + 12 : offset + 16]))
    dst = str(ipaddress.IPv4Address(payload[offset + 16 : offset + 20]))
    frag = struct.unpack_from("!H", payload, offset + 6)[0]
    fragment_offset = frag & 0x1FFF
    # Only the first fragment carries the transport header.
    if fragment_offset > 0:
        return _with_ports(src, dst, proto_code, payload, None)
    return _with_ports(src, dst, proto_code, payload, offset + ihl)


def _decode_ipv6(payload: bytes, offset: int) -> FrameFields:
    if len(payload) < offset + IPV6_HEADER:
        raise DecodeError("truncated IPv6 header")
    if payload[offset] >> 4 != 6:
        raise DecodeError("IPv6 version mismatch")
    proto_code = payload[offset + 6]
    src = str(ipaddress.IPv6Address(payload[offset + 8 : offset + 24]))
    dst = str(ipaddress.IPv6Address(payload[offset + 24 : offset + 40]))
    return _with_ports(src, dst, proto_code, payload, offset + IPV6_HEADER)


def _with_ports(
    src: str, dst: str, proto_code: int, payload: bytes, transport_offset: int | None
) -> FrameFields:
    protocol = Protocol.from_ip_proto(proto_code)
    src_port = dst_port = 0
    if protocol in (Protocol.TCP, Protocol.UDP) and transport_offset is not None:
        if len(payload) < transport_offset + 4:
            raise DecodeError("truncated transport header")
        src_port, dst_port = struct.unpack_from("!HH", payload, transport_offset)
    return FrameFields(src, dst, src_port, dst_port, protocol, proto_code)


# ---------------------------------------------------------------------------
# Encoding (for scenario -> pcap round trips)

_SRC_MAC = bytes.fromhex("020000000001")  # locally administered, fixed
_DST_MAC = bytes.fromhex("020000000002")


def _ipv4_checksum(header: bytes) -> int:
    total = 0
    for i in range(0, len(header), 2):
        total += (header[i] << 8) | header[i + 1]
    while total >> 16:
        total = (total & 0xFFFF) + (total >> 16)
    return ~total & 0xFFFF


def min_frame_len(record: PacketRecord) -> int:
    """Smallest captured_len encode_frame can honour for this record."""
    src = ipaddress.ip_address(record.src_addr)
    ip_len = IPV4_MIN_HEADER if src.version == 4 else IPV6_HEADER
    transport = {Protocol.TCP: 20, Protocol.UDP: 8, Protocol.ICMP: 8}.get(
        record.protocol, 0
    )
    return ETH_HEADER_LEN + ip_len + transport


def encode_frame(record: PacketRecord) -> bytes:
    """Build an Ethernet frame of exactly record.captured_len bytes.

    The inverse of decode_frame for the fields the decoder reads; the rest
    of the frame is deterministic filler.
    """
    src = ipaddress.ip_address(record.src_addr)
    dst = ipaddress.ip_address(record.dst_addr)
    if src.version != dst.version:
        raise ValueError("mixed address families in one record")
    floor = min_frame_len(record)
    if record.captured_len < floor:
        raise ValueError(
            f"captured_len {record.captured_len} below minimum {floor} for this record"
        )

    transport = _encode_transport(record)
    if src.version == 4:
        ethertype = ETHERTYPE_IPV4
        total_len = record.captured_len - ETH_HEADER_LEN
        header = struct.pack(
            "!BBHHHBBH4s4s",
            0x45,  # version 4, IHL 5
            0,
            total_len,
            0,
            0x4000,  # don't fragment
            64,
            record.proto_code,
            0,
            src.packed,
            dst.packed,
        )
        checksum = _ipv4_checksum(header)
        ip_header = header[:10] + struct.pack("!H", checksum) + header[12:]
    else:
        ethertype = ETHERTYPE_IPV6
        payload_len = record.captured_len - ETH_HEADER_LEN - IPV6_HEADER
        ip_header = struct.pack(
            "!IHBB16s16s",
            6 << 28,
            payload_len,
            record.proto_code,
            64,
            src.packed,
            dst.packed,
        )

    eth = _DST_MAC + _SRC_MAC + struct.pack("!H", ethertype)
    frame = eth + ip_header + transport
    return frame + b"\x00" * (record.captured_len - len(frame))


def _encode_transport(record: PacketRecord) -> bytes:
    if record.protocol == Protocol.TCP:
        return struct.pack(
            "!HHIIBBHHH",
            record.src_port,
            record.dst_port,
            0,
            0,
            5 << 4,  # data offset 5 words
            0x10,  # ACK
            65535,
            0,
            0,
        )
    if record.protocol == Protocol.UDP:
        return struct.pack("!HHHH", record.src_port, record.dst_port, 8, 0)
    if record.protocol == Protocol.ICMP:
        return struct.pack("!BBHI", 8, 0, 0, 0)  # echo request shell
    return b""
