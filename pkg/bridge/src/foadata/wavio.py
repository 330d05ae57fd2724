"""Minimal RIFF/WAVE reader built on the standard library.

Reads the audio files a foasim dataset contains: IEEE float32 (returned
bit-exact as float32) and int16/int32 PCM (rescaled into float64). The
chunk walk tolerates extra chunks such as ``fact`` and padded odd sizes.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

WAVE_FORMAT_PCM = 1
WAVE_FORMAT_IEEE_FLOAT = 3

_PCM_SCALES = {16: 2.0 ** 15, 32: 2.0 ** 31}


def _walk_chunks(raw: bytes, path) -> dict[bytes, bytes]:
    if len(raw) < 12 or raw[:4] != b"RIFF" or raw[8:12] != b"WAVE":
        raise ValueError(f"not a RIFF/WAVE file: {path}")
    chunks = {}
    pos = 12
    while pos + 8 <= len(raw):
        chunk_id = raw[pos:pos + 4]
        size = struct.unpack_from("<I", raw, pos + 4)[0]
        body = raw[pos + 8:pos + 8 + size]
        if len(body) < size:
            raise ValueError(f"truncated chunk {chunk_id!r} in {path}")
        chunks.setdefault(chunk_id, body)
        pos += 8 + size + (size & 1)
    return chunks


def read_wav(path) -> tuple[int, np.ndarray]:
    """Read a WAV file into (sample_rate_hz, channels).

    The returned array has shape (num_channels, num_samples). Float32 data
    comes back as float32 with the stored bits untouched; integer PCM is
    scaled by 2**-15 / 2**-31 into float64.
    """
    raw = Path(path).read_bytes()
    chunks = _walk_chunks(raw, path)
    if b"fmt " not in chunks or b"data" not in chunks:
        raise ValueError(f"missing fmt or data chunk in {path}")
    fmt_tag, num_channels, rate, _, block_align, bits = struct.unpack_from(
        "<HHIIHH", chunks[b"fmt "], 0)
    data = chunks[b"data"]
    if num_channels < 1 or block_align != num_channels * (bits // 8):
        raise ValueError(f"inconsistent fmt chunk in {path}")
    if len(data) % block_align:
        raise ValueError(f"data chunk is not a whole number of frames in {path}")

    if fmt_tag == WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        flat = np.frombuffer(data, dtype="<f4")
    elif fmt_tag == WAVE_FORMAT_PCM and bits in _PCM_SCALES:
        ints = np.frombuffer(data, dtype=f"<i{bits // 8}")
        flat = ints.astype(np.float64) / _PCM_SCALES[bits]
    else:
        raise ValueError(
            f"unsupported WAV encoding (format {fmt_tag}, {bits} bit) in {path}")
    frames = flat.size // num_channels
    return int(rate), np.ascontiguousarray(flat.reshape(frames, num_channels).T)
