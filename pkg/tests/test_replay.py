"""Replay: delivery order, pacing, conservation, clamping."""

import io
import math

import pytest

from netsound.capture import (
    PcapReader,
    ScenarioSpec,
    generate_scenario,
    replay,
    write_pcap,
)

from conftest import eth_frame, ipv4_packet, pcap_header_bytes, pcap_record_bytes, udp_segment


def scenario_pcap(spec: ScenarioSpec) -> tuple[io.BytesIO, int]:
    records = list(generate_scenario(spec))
    buf = io.BytesIO()
    write_pcap(records, buf)
    buf.seek(0)
    return buf, len(records)


def test_offline_replay_counts():
    stream, n = scenario_pcap(ScenarioSpec("steady", 20, 50, seed=42))
    got = []
    summary = replay(stream, math.inf, got.append)
    assert summary.packets == n == len(got)
    assert summary.malformed == 0
    assert [r.ts for r in got] == sorted(r.ts for r in got)


def test_empty_body_pcap():
    summary = replay(io.BytesIO(pcap_header_bytes()), math.inf, lambda r: None)
    assert summary.packets == 0
    assert summary.duration == 0.0


def test_conservation_with_injected_arp():
    records = list(generate_scenario(ScenarioSpec("steady", 5, 40, seed=1)))
    buf = io.BytesIO()
    write_pcap(records, buf)
    # splice one ARP frame into the middle of the file, after record 3
    body = buf.getvalue()
    reader_buf = io.BytesIO(body)
    PcapReader(reader_buf)  # position past global header
    pos = reader_buf.tell()
    import struct

    for _ in range(3):
        header = body[pos : pos + 16]
        _s, _f, incl, _o = struct.unpack(">IIII", header)
        pos += 16 + incl
    arp = pcap_record_bytes(eth_frame(b"\x00" * 28, ethertype=0x0806), 1, 0)
    spliced = body[:pos] + arp + body[pos:]

    got = []
    summary = replay(io.BytesIO(spliced), math.inf, got.append)
    assert summary.packets == len(records)
    assert summary.malformed == 1
    assert summary.packets + summary.malformed == len(records) + 1


def test_timed_replay_sleeps_scaled_gaps():
    frames = [
        pcap_record_bytes(eth_frame(ipv4_packet(payload=udp_segment(1, 2))), sec, 0)
        for sec in (0, 1, 3)
    ]
    stream = io.BytesIO(pcap_header_bytes() + b"".join(frames))
    sleeps = []
    replay(stream, 2.0, lambda r: None, sleep=sleeps.append)
    assert sleeps == pytest.approx([0.5, 1.0])


def test_non_monotonic_clamped_and_flagged():
    frames = [
        pcap_record_bytes(eth_frame(ipv4_packet(payload=udp_segment(1, 2))), 5, 0),
        pcap_record_bytes(eth_frame(ipv4_packet(payload=udp_segment(1, 2))), 2, 0),
        pcap_record_bytes(eth_frame(ipv4_packet(payload=udp_segment(1, 2))), 7, 0),
    ]
    stream = io.BytesIO(pcap_header_bytes() + b"".join(frames))
    got = []
    summary = replay(stream, math.inf, got.append)
    assert summary.non_monotonic == 1
    assert [r.ts for r in got] == [5.0, 5.0, 7.0]
    assert summary.duration == 2.0


def test_speed_factor_must_be_positive():
    with pytest.raises(ValueError):
        replay(io.BytesIO(pcap_header_bytes()), 0, lambda r: None)


def test_scenario_pcap_round_trip_reproduces_records():
    spec = ScenarioSpec(kind="burst", duration=20, base_rate=40, burst_rate=200,
                        burst_window=(5, 10), seed=33)
    records = list(generate_scenario(spec))
    buf = io.BytesIO()
    write_pcap(records, buf)
    buf.seek(0)
    got = []
    replay(buf, math.inf, got.append)
    assert len(got) == len(records)
    for orig, back in zip(records, got):
        assert back.ts == pytest.approx(orig.ts, abs=1e-6)  # file resolution
        assert (back.src_addr, back.dst_addr) == (orig.src_addr, orig.dst_addr)
        assert (back.src_port, back.dst_port) == (orig.src_port, orig.dst_port)
        assert back.protocol == orig.protocol
        assert back.proto_code == orig.proto_code
        assert (back.wire_len, back.captured_len) == (orig.wire_len, orig.captured_len)
