"""Frame decoding against hand-constructed byte layouts."""

import pytest

from netsound.capture import DecodeError, Protocol, decode_frame, encode_frame
from netsound.capture.records import LINKTYPE_ETHERNET, LINKTYPE_RAW_IP

from conftest import eth_frame, ipv4_packet, make_record, tcp_segment, udp_segment


def test_ethernet_ipv4_udp():
    frame = eth_frame(
        ipv4_packet(src="10.0.0.2", dst="8.8.8.8", proto=17, payload=udp_segment(5353, 53))
    )
    fields = decode_frame(LINKTYPE_ETHERNET, frame)
    assert fields.src_addr == "10.0.0.2"
    assert fields.dst_addr == "8.8.8.8"
    assert (fields.src_port, fields.dst_port) == (5353, 53)
    assert fields.protocol is Protocol.UDP
    assert fields.proto_code == 17


def test_ethernet_ipv4_tcp():
    frame = eth_frame(
        ipv4_packet(src="192.168.1.9", dst="10.0.77.3", proto=6, payload=tcp_segment(51000, 443))
    )
    fields = decode_frame(LINKTYPE_ETHERNET, frame)
    assert (fields.src_port, fields.dst_port) == (51000, 443)
    assert fields.protocol is Protocol.TCP


def test_icmp_forces_zero_ports():
    # same shape as the UDP frame but protocol byte 1
    frame = eth_frame(ipv4_packet(proto=1, payload=b"\x08\x00\x00\x00\x00\x00\x00\x00"))
    fields = decode_frame(LINKTYPE_ETHERNET, frame)
    assert fields.protocol is Protocol.ICMP
    assert (fields.src_port, fields.dst_port) == (0, 0)


def test_unknown_transport_is_other_with_code():
    frame = eth_frame(ipv4_packet(proto=47, payload=b"\x00" * 8))  # GRE
    fields = decode_frame(LINKTYPE_ETHERNET, frame)
    assert fields.protocol is Protocol.OTHER
    assert fields.proto_code == 47
    assert (fields.src_port, fields.dst_port) == (0, 0)


def test_arp_is_decode_error():
    frame = eth_frame(b"\x00" * 28, ethertype=0x0806)
    with pytest.raises(DecodeError):
        decode_frame(LINKTYPE_ETHERNET, frame)


def test_vlan_tag_skipped():
    frame = eth_frame(
        ipv4_packet(src="10.0.0.9", dst="1.1.1.1", proto=17, payload=udp_segment(1000, 53)),
        vlan=True,
    )
    fields = decode_frame(LINKTYPE_ETHERNET, frame)
    assert fields.src_addr == "10.0.0.9"
    assert (fields.src_port, fields.dst_port) == (1000, 53)


def test_raw_ip_link_type():
    packet = ipv4_packet(src="172.16.0.1", dst="10.0.77.8", proto=6, payload=tcp_segment(1, 2))
    fields = decode_frame(LINKTYPE_RAW_IP, packet)
    assert fields.src_addr == "172.16.0.1"
    assert fields.protocol is Protocol.TCP


def test_ipv4_options_respected():
    # IHL 6: one 4-byte option between header and transport
    frame = eth_frame(
        ipv4_packet(proto=17, options=b"\x01\x01\x01\x01", payload=udp_segment(7, 8))
    )
    fields = decode_frame(LINKTYPE_ETHERNET, frame)
    assert (fields.src_port, fields.dst_port) == (7, 8)


def test_ipv4_fragment_has_zero_ports():
    frame = eth_frame(ipv4_packet(proto=6, frag_offset=185, payload=b"\x00" * 16))
    fields = decode_frame(LINKTYPE_ETHERNET, frame)
    assert fields.protocol is Protocol.TCP
    assert (fields.src_port, fields.dst_port) == (0, 0)


def test_ipv6_udp():
    import struct

    src = bytes.fromhex("20010db8000000000000000000000001")
    dst = bytes.fromhex("20010db8000000000000000000000002")
    packet = struct.pack("!IHBB", 6 << 28, 8, 17, 64) + src + dst + udp_segment(4000, 53)
    fields = decode_frame(LINKTYPE_RAW_IP, packet)
    assert fields.src_addr == "2001:db8::1"
    assert fields.dst_addr == "2001:db8::2"
    assert (fields.src_port, fields.dst_port) == (4000, 53)


def test_truncated_ipv4_header():
    frame = eth_frame(ipv4_packet(payload=udp_segment(1, 2))[:12])
    with pytest.raises(DecodeError):
        decode_frame(LINKTYPE_ETHERNET, frame)


def test_truncated_transport_ports():
    packet = ipv4_packet(proto=6, payload=b"\x01\x02")  # 2 of 4 port bytes
    with pytest.raises(DecodeError):
        decode_frame(LINKTYPE_RAW_IP, packet)


def test_empty_payload():
    with pytest.raises(DecodeError):
        decode_frame(LINKTYPE_ETHERNET, b"")


def test_unsupported_link_type():
    with pytest.raises(DecodeError):
        decode_frame(105, b"\x00" * 64)


def test_src_dst_swap_symmetry():
    base = eth_frame(
        ipv4_packet(src="10.0.0.2", dst="8.8.8.8", proto=17, payload=udp_segment(5353, 53))
    )
    swapped = eth_frame(
        ipv4_packet(src="8.8.8.8", dst="10.0.0.2", proto=17, payload=udp_segment(53, 5353))
    )
    a = decode_frame(LINKTYPE_ETHERNET, base)
    b = decode_frame(LINKTYPE_ETHERNET, swapped)
    assert (a.src_addr, a.src_port) == (b.dst_addr, b.dst_port)
    assert (a.dst_addr, a.dst_port) == (b.src_addr, b.src_port)
    assert a.protocol == b.protocol


@pytest.mark.parametrize("protocol", [Protocol.TCP, Protocol.UDP, Protocol.ICMP])
def test_encode_decode_round_trip(protocol):
    record = make_record(protocol=protocol, sport=2222, dport=443, size=96)
    fields = decode_frame(LINKTYPE_ETHERNET, encode_frame(record))
    assert fields.src_addr == record.src_addr
    assert fields.dst_addr == record.dst_addr
    assert fields.src_port == record.src_port
    assert fields.dst_port == record.dst_port
    assert fields.protocol == record.protocol


def test_encode_rejects_undersized_capture():
    record = make_record(size=30)  # below eth+ip+tcp floor
    with pytest.raises(ValueError):
        encode_frame(record)


def test_record_invariants_enforced():
    import dataclasses

    good = make_record()
    with pytest.raises(ValueError):
        dataclasses.replace(good, captured_len=good.wire_len + 1)
    with pytest.raises(ValueError):
        dataclasses.replace(good, dst_port=70000)
    with pytest.raises(ValueError):
        # non-port protocols must carry zero ports
        dataclasses.replace(good, protocol=Protocol.ICMP, proto_code=1)
