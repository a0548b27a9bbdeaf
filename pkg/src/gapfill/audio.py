"""WAV input/output and synthetic degradation with random gaps."""
from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

import numpy as np
from scipy.io import wavfile

from .errors import InvalidArgument, PlacementError, WavFormatError
from .problem import GapSpec


@dataclass
class WavFile:
    samples: np.ndarray
    sample_rate: int
    bit_depth: int = 32
    is_float: bool = True


def _probe_format(path) -> tuple[int, int]:
    """(format tag, bits per sample) from the fmt chunk."""
    with open(path, "rb") as fh:
        head = fh.read(12)
        if len(head) < 12 or head[:4] not in (b"RIFF", b"RIFX") or head[8:12] != b"WAVE":
            raise WavFormatError(f"{path}: not a RIFF/WAVE file")
        endian = "<" if head[:4] == b"RIFF" else ">"
        while True:
            chunk = fh.read(8)
            if len(chunk) < 8:
                raise WavFormatError(f"{path}: missing fmt chunk")
            cid, size = chunk[:4], struct.unpack(endian + "I", chunk[4:])[0]
            if cid == b"fmt ":
                body = fh.read(size)
                if len(body) < 16:
                    raise WavFormatError(f"{path}: truncated fmt chunk")
                tag, bits = struct.unpack(endian + "H", body[:2])[0], struct.unpack(endian + "H", body[14:16])[0]
                if tag == 0xFFFE and len(body) >= 26:
                    tag = struct.unpack(endian + "H", body[24:26])[0]
                return tag, bits
            fh.seek(size + (size & 1), 1)


def read_wav(path) -> WavFile:
    """Read PCM 8/16/24/32-bit or float WAV, normalised to [-1, 1].

    Multi-channel files are reduced to their first channel.
    """
    tag, bits = _probe_format(path)
    if tag not in (1, 3):
        raise WavFormatError(f"{path}: unsupported codec (format tag {tag})")
    try:
        rate, data = wavfile.read(path)
    except ValueError as exc:
        raise WavFormatError(f"{path}: {exc}") from exc
    if data.ndim > 1:
        warnings.warn(f"{path}: {data.shape[1]} channels, using the first one")
        data = data[:, 0]
    if data.dtype == np.uint8:
        x = (data.astype(float) - 128.0) / 128.0
    elif data.dtype == np.int16:
        x = data / 32768.0
    elif data.dtype == np.int32:
        # 24-bit PCM arrives left-aligned in int32
        x = data / 2147483648.0
    elif data.dtype.kind == "f":
        x = data.astype(float)
    else:
        raise WavFormatError(f"{path}: unsupported sample type {data.dtype}")
    return WavFile(np.asarray(x, dtype=float), int(rate), int(bits), tag == 3)


def write_wav(path, wav: WavFile, subtype: str = "float32") -> None:
    """Write mono audio. ``subtype`` is ``float32`` or ``pcm16``."""
    x = np.asarray(wav.samples, dtype=float)
    if x.ndim != 1 or not np.all(np.isfinite(x)):
        raise InvalidArgument("samples must be a finite 1-D array")
    if subtype == "float32":
        data = x.astype(np.float32)
    elif subtype == "pcm16":
        data = np.clip(np.floor(x * 32768.0 + 0.5), -32768, 32767).astype(np.int16)
    else:
        raise InvalidArgument(f"unknown subtype {subtype!r}")
    wavfile.write(path, int(wav.sample_rate), data)


def ms_to_samples(ms: float, sample_rate: int) -> int:
    """Round-half-up conversion of a duration to samples."""
    v = Decimal(repr(float(ms))) * Decimal(int(sample_rate)) / Decimal(1000)
    return int(v.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def degrade(x, gap_len_ms: float, num_gaps: int, seed, sample_rate: int,
            guard_ms: float = 200.0) -> tuple[np.ndarray, GapSpec]:
    """Zero out ``num_gaps`` gaps at random positions.

    Gaps keep at least ``guard_ms`` from each other and from both signal
    ends. Positions are drawn uniformly among admissible layouts from a
    generator seeded with ``seed``.
    """
    x = np.asarray(x, dtype=float)
    L = x.size
    if num_gaps < 0:
        raise InvalidArgument("num_gaps must be >= 0")
    if num_gaps == 0:
        return x.copy(), GapSpec((), L, sample_rate)
    n = ms_to_samples(gap_len_ms, sample_rate)
    guard = ms_to_samples(guard_ms, sample_rate)
    if n < 1:
        raise InvalidArgument("gap shorter than one sample")
    slack = L - num_gaps * n - (num_gaps + 1) * guard
    if slack < 0:
        raise PlacementError(
            f"{num_gaps} gaps of {n} samples with {guard}-sample guards do not fit in {L} samples")
    rng = np.random.default_rng(seed)
    offsets = np.sort(rng.integers(0, slack + 1, size=num_gaps))
    starts = guard + np.arange(num_gaps) * (n + guard) + offsets
    spec = GapSpec(tuple((int(s), n) for s in starts), L, sample_rate)
    y = x.copy()
    for s, length in spec.gaps:
        y[s:s + length] = 0.0
    return y, spec
