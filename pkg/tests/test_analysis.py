"""Feature extraction and windowed aggregation against brute-force oracles."""

import dataclasses
import math
import random

import pytest

from netsound.analysis import (
    AnalysisConfig,
    Direction,
    HomeNetConfig,
    RunningAverage,
    TrafficAggregates,
    aggregate,
    attach_features,
    classify_direction,
    detect_alerts,
)
from netsound.capture import Protocol, ScenarioSpec, generate_scenario

from conftest import make_record
from oracle import window_stats

HOME = HomeNetConfig.from_prefixes(["10.0.77.0/24"])


def run_pipeline(records, cfg=None, home=HOME):
    return list(aggregate(attach_features(iter(records), home), cfg or AnalysisConfig()))


# --- direction ---------------------------------------------------------------


def test_direction_truth_table():
    cases = [
        ("10.0.77.5", "93.184.216.34", Direction.OUTBOUND),
        ("93.184.216.34", "10.0.77.5", Direction.INBOUND),
        ("10.0.77.5", "10.0.77.9", Direction.INTERNAL),
        ("8.8.8.8", "1.1.1.1", Direction.EXTERNAL),
    ]
    for src, dst, expected in cases:
        rec = make_record(src=src, dst=dst)
        assert classify_direction(rec, HOME) is expected


def test_direction_swap_symmetry_random():
    rng = random.Random(2024)
    swap_map = {
        Direction.INBOUND: Direction.OUTBOUND,
        Direction.OUTBOUND: Direction.INBOUND,
        Direction.INTERNAL: Direction.INTERNAL,
        Direction.EXTERNAL: Direction.EXTERNAL,
    }
    for _ in range(1000):
        src = f"{rng.randrange(1, 224)}.{rng.randrange(256)}.{rng.randrange(256)}.{rng.randrange(1, 255)}"
        dst = f"10.0.{rng.randrange(256)}.{rng.randrange(1, 255)}"
        if rng.random() < 0.5:
            src, dst = dst, src
        rec = make_record(src=src, dst=dst, sport=1, dport=2)
        swapped = dataclasses.replace(
            rec, src_addr=rec.dst_addr, dst_addr=rec.src_addr,
            src_port=rec.dst_port, dst_port=rec.src_port,
        )
        assert classify_direction(swapped, HOME) is swap_map[classify_direction(rec, HOME)]


def test_direction_multiple_home_networks():
    home = HomeNetConfig.from_prefixes(["10.0.77.0/24", "192.168.0.0/16", "2001:db8::/32"])
    assert home.contains("192.168.3.4")
    assert home.contains("2001:db8::42")
    assert not home.contains("192.169.0.1")


def test_home_config_requires_prefixes():
    with pytest.raises(ValueError):
        HomeNetConfig.from_prefixes([])


# --- features ----------------------------------------------------------------


def test_inter_arrival_sequence():
    records = [make_record(ts=t) for t in (0.0, 0.1, 0.4)]
    feats = list(attach_features(iter(records), HOME))
    assert feats[0].inter_arrival is None
    assert feats[1].inter_arrival == pytest.approx(0.1)
    assert feats[2].inter_arrival == pytest.approx(0.3)


def test_single_packet_has_no_inter_arrival():
    feats = list(attach_features(iter([make_record(ts=5.0)]), HOME))
    assert len(feats) == 1
    assert feats[0].inter_arrival is None


def test_equal_timestamps_give_zero_gap():
    records = [make_record(ts=1.0), make_record(ts=1.0)]
    feats = list(attach_features(iter(records), HOME))
    assert feats[1].inter_arrival == 0.0


# --- windows -----------------------------------------------------------------


def test_uniform_packets_rate():
    records = [make_record(ts=i * 0.2) for i in range(10)]  # spans [0, 1.8]
    aggs = run_pipeline(records, AnalysisConfig(window_len=2.0))
    assert len(aggs) == 1
    assert aggs[0].pkt_rate == 5.0
    assert aggs[0].packet_count == 10


def test_empty_windows_emitted():
    records = [make_record(ts=0.5), make_record(ts=4.2)]
    aggs = run_pipeline(records, AnalysisConfig(window_len=1.0))
    assert [a.packet_count for a in aggs] == [1, 0, 0, 1]
    assert [a.window_index for a in aggs] == [0, 1, 2, 3]


def test_windows_anchored_at_first_packet():
    records = [make_record(ts=100.3), make_record(ts=101.0)]
    aggs = run_pipeline(records, AnalysisConfig(window_len=1.0))
    assert aggs[0].window_start == pytest.approx(100.3)
    assert [a.packet_count for a in aggs] == [2]


@pytest.mark.parametrize("window_len", [1.0, 0.5, 2.0])
def test_aggregates_match_oracle(window_len):
    spec = ScenarioSpec(kind="burst", duration=40, base_rate=40, burst_rate=200,
                        burst_window=(10, 20), seed=77)
    records = list(generate_scenario(spec))
    cfg = AnalysisConfig(window_len=window_len)
    aggs = run_pipeline(records, cfg)
    expected = window_stats(records, ["10.0.77.0/24"], window_len)
    assert len(aggs) == len(expected)
    for agg, exp in zip(aggs, expected):
        assert agg.packet_count == exp["packets"]
        assert agg.byte_count == exp["bytes"]
        assert agg.unique_dst_ports == len(exp["ports"])
        for proto in Protocol:
            assert agg.by_protocol[proto] == exp["proto"][proto.value]
        for direction in Direction:
            assert agg.by_direction[direction] == exp["dir"][direction.value]
        assert agg.pkt_rate * window_len == agg.packet_count


def test_conservation_and_breakdown_sums():
    records = list(generate_scenario(ScenarioSpec("steady", 30, 60, seed=5)))
    aggs = run_pipeline(records)
    assert sum(a.packet_count for a in aggs) == len(records)
    for a in aggs:
        assert sum(a.by_protocol.values()) == a.packet_count
        assert sum(a.by_direction.values()) == a.packet_count
        assert a.unique_dst_ports <= a.packet_count


def test_direction_swap_symmetry_on_aggregates():
    records = list(generate_scenario(ScenarioSpec("steady", 10, 80, seed=13)))
    swapped = [
        dataclasses.replace(
            r, src_addr=r.dst_addr, dst_addr=r.src_addr,
            src_port=r.dst_port, dst_port=r.src_port,
        )
        for r in records
    ]
    for a, b in zip(run_pipeline(records), run_pipeline(swapped)):
        assert a.by_direction[Direction.INBOUND] == b.by_direction[Direction.OUTBOUND]
        assert a.by_direction[Direction.OUTBOUND] == b.by_direction[Direction.INBOUND]
        assert a.by_direction[Direction.INTERNAL] == b.by_direction[Direction.INTERNAL]
        assert a.by_direction[Direction.EXTERNAL] == b.by_direction[Direction.EXTERNAL]


def test_mean_inter_arrival_brute_force():
    rng = random.Random(55)
    ts = 0.0
    records = []
    for _ in range(200):
        ts += rng.random() * 0.05
        records.append(make_record(ts=ts))
    aggs = run_pipeline(records)
    feats = list(attach_features(iter(records), HOME))
    t0 = records[0].ts
    for agg in aggs:
        gaps = [
            f.inter_arrival
            for f in feats
            if f.inter_arrival is not None
            and agg.window_index == math.floor((f.record.ts - t0) / 1.0)
        ]
        expected = sum(gaps) / len(gaps) if gaps else 0.0
        assert agg.mean_inter_arrival == pytest.approx(expected)


# --- running average ----------------------------------------------------------


def test_cumulative_average_is_arithmetic_mean():
    tracker = RunningAverage(AnalysisConfig(avg_mode="cumulative"))
    assert [tracker.update(r) for r in (10, 20, 30)] == [10, 15, 20]


def test_cumulative_matches_mean_to_tight_tolerance():
    rng = random.Random(7)
    tracker = RunningAverage(AnalysisConfig(avg_mode="cumulative"))
    rates = []
    for _ in range(500):
        rates.append(rng.random() * 1000)
        avg = tracker.update(rates[-1])
        assert avg == pytest.approx(sum(rates) / len(rates), rel=1e-12)


def test_exponential_fixed_point():
    tracker = RunningAverage(AnalysisConfig(avg_mode="exponential"))
    for _ in range(100):
        assert tracker.update(42.0) == pytest.approx(42.0, rel=1e-9)


def test_exponential_alpha_value():
    # 1 - exp(-1/60) = 0.01652854617838251... (mpmath, 30 digits)
    tracker = RunningAverage(AnalysisConfig(window_len=1.0, ewma_tau=60.0))
    assert tracker.alpha == pytest.approx(0.0165285461783825, rel=1e-12)


@pytest.mark.parametrize("mode", ["cumulative", "exponential"])
def test_average_bounded_by_extremes(mode):
    rng = random.Random(99)
    tracker = RunningAverage(AnalysisConfig(avg_mode=mode))
    seen = []
    for _ in range(300):
        seen.append(rng.random() * 500)
        avg = tracker.update(seen[-1])
        assert min(seen) - 1e-9 <= avg <= max(seen) + 1e-9


# --- alerts -------------------------------------------------------------------


def make_agg(**kw) -> TrafficAggregates:
    base = dict(
        window_index=10, window_start=10.0, window_len=1.0,
        packet_count=0, byte_count=0, pkt_rate=0.0, byte_rate=0.0,
        avg_pkt_rate=0.0, rate_ratio=0.0,
        by_protocol={p: 0 for p in Protocol},
        by_direction={d: 0 for d in Direction},
        mean_inter_arrival=0.0, unique_dst_ports=0,
    )
    base.update(kw)
    return TrafficAggregates(**base)


def test_rate_spike_magnitude():
    agg = make_agg(pkt_rate=100.0, avg_pkt_rate=20.0, rate_ratio=5.0)
    alerts = detect_alerts(agg, AnalysisConfig())
    assert len(alerts) == 1
    assert alerts[0].kind == "rate_spike"
    assert alerts[0].magnitude == pytest.approx(5.0)
    assert alerts[0].ts == pytest.approx(11.0)
    assert alerts[0].magnitude >= 1.0


def test_no_alert_below_absolute_floor():
    agg = make_agg(pkt_rate=9.0, avg_pkt_rate=1.0, rate_ratio=9.0)
    assert detect_alerts(agg, AnalysisConfig()) == []


def test_no_alerts_during_warmup():
    agg = make_agg(window_index=4, pkt_rate=1000.0, avg_pkt_rate=1.0,
                   rate_ratio=1000.0, unique_dst_ports=500)
    assert detect_alerts(agg, AnalysisConfig(warmup_windows=5)) == []
    assert detect_alerts(agg, AnalysisConfig(warmup_windows=4))  # boundary


def test_port_scan_alert_magnitude():
    agg = make_agg(unique_dst_ports=150)
    alerts = detect_alerts(agg, AnalysisConfig())
    assert [a.kind for a in alerts] == ["port_scan"]
    assert alerts[0].magnitude == pytest.approx(1.5)
    assert alerts[0].variable == "unique_dst_ports"


def test_burst_fixture_first_spike_latency():
    spec = ScenarioSpec(kind="burst", duration=45, base_rate=50, burst_rate=500,
                        burst_window=(30, 40), seed=77)
    aggs = run_pipeline(list(generate_scenario(spec)))
    spikes = [a.window_index for a in aggs if any(al.kind == "rate_spike" for al in a.alerts)]
    assert spikes
    assert spikes[0] in (30, 31)


def test_no_warmup_alerts_over_random_streams():
    for seed in range(5):
        spec = ScenarioSpec(kind="burst", duration=10, base_rate=20, burst_rate=400,
                            burst_window=(0, 10), seed=seed)
        aggs = run_pipeline(list(generate_scenario(spec)))
        for agg in aggs:
            if agg.window_index < 5:
                assert agg.alerts == []


def test_config_validation():
    with pytest.raises(ValueError):
        AnalysisConfig(window_len=0)
    with pytest.raises(ValueError):
        AnalysisConfig(avg_mode="median")
    with pytest.raises(ValueError):
        AnalysisConfig(ewma_tau=0)
    with pytest.raises(ValueError):
        AnalysisConfig(spike_factor=1.0)
