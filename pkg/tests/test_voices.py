"""Per-voice renderers: oscillators, grains, alerts, determinism."""

import numpy as np
import pytest

from netsound.audio import RenderConfig, VoiceRenderer, write_wav
from netsound.params import VoiceParams
from netsound.soundscape import SoundSource, VoiceDefinition


def make_voice(kind="tone", builtin="sine", freq=440.0, sample=None, **static):
    params = VoiceParams(**static) if static else VoiceParams()
    return VoiceDefinition(
        id=f"{kind}-test",
        kind=kind,
        source=SoundSource(builtin=builtin, sample=sample, freq=freq),
        static=params,
    )


def render_all(renderer: VoiceRenderer, frames: int, block: int = 512) -> np.ndarray:
    chunks = []
    done = 0
    while done < frames:
        n = min(block, frames - done)
        buf, _pan = renderer.render(n)
        chunks.append(buf)
        done += n
    return np.concatenate(chunks)


def count_cycles(buf: np.ndarray) -> float:
    """Zero-crossing pairs: rising crossings count full cycles."""
    signs = np.signbit(buf)
    rising = np.sum(~signs[1:] & signs[:-1])
    return float(rising)


def test_tone_renders_440_cycles_per_second():
    cfg = RenderConfig(seed=1)
    renderer = VoiceRenderer(make_voice("tone", freq=440.0), cfg)
    buf = render_all(renderer, cfg.sample_rate)
    assert count_cycles(buf) == pytest.approx(440, abs=1)


def test_tone_pitch_ratio_scales_frequency():
    cfg = RenderConfig(seed=1, smoothing_time=0.0)
    renderer = VoiceRenderer(make_voice("tone", freq=440.0), cfg)
    renderer.set_target(VoiceParams(pitch_ratio=2.0))
    buf = render_all(renderer, cfg.sample_rate)
    assert count_cycles(buf) == pytest.approx(880, abs=2)


def test_tone_phase_continuous_across_blocks():
    # phase wrapping at block edges only perturbs the last ulps
    cfg = RenderConfig(seed=1)
    whole = render_all(VoiceRenderer(make_voice("tone"), cfg), 4096, block=4096)
    blocks = render_all(VoiceRenderer(make_voice("tone"), cfg), 4096, block=64)
    assert np.allclose(whole, blocks, atol=1e-9)
    again = render_all(VoiceRenderer(make_voice("tone"), cfg), 4096, block=64)
    assert np.array_equal(blocks, again)


def test_grain_zero_rate_is_silent():
    cfg = RenderConfig(seed=2)
    renderer = VoiceRenderer(make_voice("grain", builtin="noise"), cfg)
    buf = render_all(renderer, cfg.sample_rate)
    assert np.all(buf == 0.0)


def test_grain_rate_produces_grains():
    cfg = RenderConfig(seed=2, smoothing_time=0.0)
    voice = make_voice("grain", builtin="noise", trigger_rate_hz=50.0)
    renderer = VoiceRenderer(voice, cfg)
    spawned = 0
    original = renderer._make_grain

    def counting(pitch):
        nonlocal spawned
        spawned += 1
        return original(pitch)

    renderer._make_grain = counting
    buf = render_all(renderer, cfg.sample_rate * 10)
    # Poisson with mean 500; 5 sigma is ~112
    assert 350 <= spawned <= 650
    assert np.max(np.abs(buf)) > 0


def test_grain_tail_carries_across_blocks():
    cfg = RenderConfig(seed=3, smoothing_time=0.0)
    voice = make_voice("grain", builtin="sine", freq=800.0, trigger_rate_hz=20.0)
    a = render_all(VoiceRenderer(voice, cfg), 48000, block=512)
    b = render_all(VoiceRenderer(voice, cfg), 48000, block=4800)
    assert np.array_equal(a, b)


def test_renderer_deterministic_per_seed():
    cfg = RenderConfig(seed=7)
    voice = make_voice("grain", builtin="noise", trigger_rate_hz=30.0)
    a = render_all(VoiceRenderer(voice, cfg), 24000)
    b = render_all(VoiceRenderer(voice, cfg), 24000)
    assert np.array_equal(a, b)
    c = render_all(VoiceRenderer(voice, RenderConfig(seed=8)), 24000)
    assert not np.array_equal(a, c)


def test_different_voice_ids_get_different_streams():
    cfg = RenderConfig(seed=7)
    v1 = VoiceDefinition("a", "bed", SoundSource(builtin="noise"), VoiceParams())
    v2 = VoiceDefinition("b", "bed", SoundSource(builtin="noise"), VoiceParams())
    a = render_all(VoiceRenderer(v1, cfg), 4800)
    b = render_all(VoiceRenderer(v2, cfg), 4800)
    assert not np.array_equal(a, b)


def test_alert_silent_until_triggered():
    cfg = RenderConfig(seed=4)
    renderer = VoiceRenderer(make_voice("alert", builtin="sine", freq=880.0), cfg)
    silent, _ = renderer.render(4800)
    assert np.all(silent == 0.0)
    renderer.trigger()
    sting = render_all(renderer, cfg.sample_rate)
    assert np.max(np.abs(sting)) > 0.1
    # one-shot: eventually decays back to silence
    after = render_all(renderer, 4800)
    assert np.all(after == 0.0)


def test_bed_noise_loops_without_gap():
    cfg = RenderConfig(seed=5)
    voice = make_voice("bed", builtin="noise")
    buf = render_all(VoiceRenderer(voice, cfg), cfg.sample_rate * 5)
    # active throughout, including across the 2 s loop seam
    for second in range(5):
        chunk = buf[second * cfg.sample_rate : (second + 1) * cfg.sample_rate]
        assert np.sqrt(np.mean(chunk**2)) > 0.01


def test_gain_smoothing_observed_on_output(tmp_path):
    # a bed voice looping a constant-ones sample exposes the gain curve directly
    cfg = RenderConfig(seed=6)
    ones = np.ones((4800, 2)) * 0.5
    path = tmp_path / "ones.wav"
    write_wav(ones, path, cfg)
    voice = VoiceDefinition(
        "flat", "bed", SoundSource(sample=str(path)), VoiceParams(gain_db=-40.0)
    )
    renderer = VoiceRenderer(voice, cfg)
    renderer.set_target(VoiceParams(gain_db=0.0))
    buf = render_all(renderer, cfg.smoothing_frames + 4800)
    recovered_db = 20.0 * np.log10(np.abs(buf))
    deltas = np.abs(np.diff(recovered_db))
    bound = 40.0 / (cfg.smoothing_time * cfg.sample_rate)
    assert np.all(deltas <= bound + 1e-6)
    assert recovered_db[-1] == pytest.approx(0.0, abs=1e-6)


def test_sample_voice_plays_sample(tmp_path):
    cfg = RenderConfig(seed=9)
    # 50400 frames so the loop (minus the 2400-frame crossfade trim) is an
    # exact 330 cycles: seamless and countable
    t = np.arange(50400) / 48000
    wave = 0.8 * np.sin(2 * np.pi * 330 * t)
    path = tmp_path / "tone330.wav"
    write_wav(np.column_stack([wave, wave]), path, cfg)
    voice = VoiceDefinition("smp", "bed", SoundSource(sample=str(path)), VoiceParams())
    buf = render_all(VoiceRenderer(voice, cfg), 48000)
    assert count_cycles(buf) == pytest.approx(330, abs=2)


def test_render_rejects_nonpositive_frames():
    renderer = VoiceRenderer(make_voice("tone"), RenderConfig())
    with pytest.raises(ValueError):
        renderer.render(0)
