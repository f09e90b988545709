"""Shared fixtures: hand-built frames, pcap byte builders, scenario streams."""

from __future__ import annotations

import socket
import struct

import pytest

from netsound.capture import PacketRecord, Protocol


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """One visible pass/fail line per acceptance criterion."""
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or "test_acceptance" not in item.nodeid:
        return
    status = "PASS" if report.passed else "FAIL"
    doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
    reporter = item.config.pluginmanager.get_plugin("terminalreporter")
    if reporter is not None:
        reporter.write_line(f"[ACCEPTANCE {status}] {doc}")

SRC_MAC = bytes.fromhex("020000000001")
DST_MAC = bytes.fromhex("020000000002")


# --- frame builders (hand-constructed from the header layouts, independent
# --- of netsound.capture.frames.encode_frame) -------------------------------


def eth_frame(payload: bytes, ethertype: int = 0x0800, vlan: bool = False) -> bytes:
    header = DST_MAC + SRC_MAC
    if vlan:
        header += struct.pack("!HH", 0x8100, 100)
    return header + struct.pack("!H", ethertype) + payload


def ipv4_packet(
    src: str = "10.0.0.2",
    dst: str = "8.8.8.8",
    proto: int = 17,
    payload: bytes = b"",
    frag_offset: int = 0,
    options: bytes = b"",
) -> bytes:
    ihl = 5 + len(options) // 4
    total = ihl * 4 + len(payload)
    header = struct.pack(
        "!BBHHHBBH",
        (4 << 4) | ihl,
        0,
        total,
        1,
        frag_offset & 0x1FFF,
        64,
        proto,
        0,
    )
    return header + socket.inet_aton(src) + socket.inet_aton(dst) + options + payload


def udp_segment(sport: int, dport: int, payload: bytes = b"") -> bytes:
    return struct.pack("!HHHH", sport, dport, 8 + len(payload), 0) + payload


def tcp_segment(sport: int, dport: int) -> bytes:
    return struct.pack("!HHIIBBHHH", sport, dport, 0, 0, 5 << 4, 0x10, 1024, 0, 0)


# --- pcap byte builders ------------------------------------------------------


def pcap_header_bytes(
    magic: int = 0xA1B2C3D4,
    order: str = ">",
    link_type: int = 1,
    snap_len: int = 65535,
) -> bytes:
    return struct.pack(order + "IHHiIII", magic, 2, 4, 0, 0, snap_len, link_type)


def pcap_record_bytes(
    frame: bytes,
    ts_sec: int,
    ts_frac: int,
    order: str = ">",
    orig_len: int | None = None,
    incl_len: int | None = None,
) -> bytes:
    incl = len(frame) if incl_len is None else incl_len
    orig = incl if orig_len is None else orig_len
    return struct.pack(order + "IIII", ts_sec, ts_frac, incl, orig) + frame


def make_record(
    ts: float = 0.0,
    src: str = "10.0.77.5",
    dst: str = "93.184.216.34",
    sport: int = 40000,
    dport: int = 443,
    protocol: Protocol = Protocol.TCP,
    size: int = 80,
) -> PacketRecord:
    code = {Protocol.TCP: 6, Protocol.UDP: 17, Protocol.ICMP: 1}.get(protocol, 99)
    if protocol not in (Protocol.TCP, Protocol.UDP):
        sport = dport = 0
    return PacketRecord(
        ts=ts,
        src_addr=src,
        dst_addr=dst,
        src_port=sport,
        dst_port=dport,
        protocol=protocol,
        proto_code=code,
        wire_len=size,
        captured_len=size,
    )


@pytest.fixture()
def home_prefixes():
    return ["10.0.77.0/24"]
