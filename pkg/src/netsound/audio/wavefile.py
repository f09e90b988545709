"""RIFF/WAVE reader and writer.

Output is fixed at 16-bit PCM little-endian so renders are bit-exact and
comparable across runs. The reader additionally accepts float32 files and
any rate/channel count, since theme samples come from anywhere.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .dsp import RenderConfig


def write_wav(frames: np.ndarray, path: str | Path, cfg: RenderConfig) -> None:
    """Write stereo float frames in [-1, 1] as 16-bit PCM at cfg.sample_rate."""
    frames = np.asarray(frames, dtype=np.float64)
    if frames.ndim == 1:
        frames = frames[:, np.newaxis]
    if frames.shape[1] != cfg.channels:
        raise ValueError(f"expected {cfg.channels} channels, got {frames.shape[1]}")
    if not np.all(np.isfinite(frames)):
        raise ValueError("frames contain non-finite samples")
    pcm = np.round(np.clip(frames, -1.0, 1.0) * 32767.0).astype("<i2")
    data = pcm.tobytes()
    block_align = cfg.channels * 2
    header = (
        b"RIFF"
        + struct.pack("<I", 36 + len(data))
        + b"WAVE"
        + b"fmt "
        + struct.pack(
            "<IHHIIHH",
            16,
            1,  # PCM
            cfg.channels,
            cfg.sample_rate,
            cfg.sample_rate * block_align,
            block_align,
            16,
        )
        + b"data"
        + struct.pack("<I", len(data))
    )
    with open(path, "wb") as f:
        f.write(header)
        f.write(data)


def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Read PCM 16-bit or float32 WAV; returns (frames[n, ch] float64, rate)."""
    raw = Path(path).read_bytes()
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise ValueError(f"{path}: not a RIFF/WAVE file")
    pos = 12
    fmt = None
    data = None
    while pos + 8 <= len(raw):
        chunk_id = raw[pos : pos + 4]
        (chunk_len,) = struct.unpack_from("<I", raw, pos + 4)
        body = raw[pos + 8 : pos + 8 + chunk_len]
        if chunk_id == b"fmt ":
            fmt = struct.unpack_from("<HHIIHH", body, 0)
        elif chunk_id == b"data":
            data = body
        pos += 8 + chunk_len + (chunk_len & 1)  # chunks are word-aligned
    if fmt is None or data is None:
        raise ValueError(f"{path}: missing fmt or data chunk")
    audio_format, channels, rate, _byte_rate, _block_align, bits = fmt
    if audio_format == 1 and bits == 16:
        samples = np.frombuffer(data, dtype="<i2").astype(np.float64) / 32767.0
    elif audio_format == 3 and bits == 32:
        samples = np.frombuffer(data, dtype="<f4").astype(np.float64)
    else:
        raise ValueError(
            f"{path}: unsupported format code {audio_format} / {bits}-bit"
        )
    usable = (len(samples) // channels) * channels
    return samples[:usable].reshape(-1, channels), rate
