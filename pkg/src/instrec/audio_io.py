"""WAV decoding and signal preprocessing.

Samples are float64 amplitudes nominally in [-1, 1]. 16-bit PCM decodes
through division by 32768 (symmetric negative range), so a stored value
of 16384 becomes exactly 0.5. Stereo material reduces to mono by the
arithmetic mean of the channels, which keeps amplitudes in range.

All operations are pure: inputs are never mutated and identical inputs
give identical outputs, so everything here is safe to call concurrently.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSignalError,
    EmptySignalError,
    UnsupportedFormatError,
    WavDecodeError,
)

# Amplitudes at or below this count as silence when trimming (-80 dBFS).
DEFAULT_SILENCE_THRESHOLD = 1e-4

_PCM_SCALE = 32768.0


@dataclass(frozen=True)
class AudioClip:
    """Decoded multi-channel audio: ``samples`` has shape (channels, n)."""

    samples: np.ndarray
    sample_rate: int
    channels: int

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.channels not in (1, 2):
            raise ValueError(f"channels must be 1 or 2, got {self.channels}")
        if self.samples.ndim != 2 or self.samples.shape[0] != self.channels:
            raise ValueError(
                f"samples must have shape (channels, n), got {self.samples.shape}"
            )

    @property
    def n_samples(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class MonoSignal:
    """Single-channel signal: ``samples`` has shape (n,)."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.samples.ndim != 1:
            raise ValueError(f"samples must be 1-D, got shape {self.samples.shape}")

    def __len__(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate


def rms(samples: np.ndarray) -> float:
    """Root-mean-square amplitude; 0.0 for an empty array."""
    if len(samples) == 0:
        return 0.0
    return float(np.sqrt(np.mean(np.square(samples, dtype=np.float64))))


def decode_wav(data: bytes) -> AudioClip:
    """Decode a RIFF/WAVE byte string.

    Supports PCM 16-bit and IEEE float 32-bit, 1 or 2 channels. Raises
    :class:`WavDecodeError` (naming the byte offset) on malformed input
    and :class:`UnsupportedFormatError` on encodings outside that set.
    """
    if len(data) < 12:
        raise WavDecodeError(f"file too short for a RIFF header at offset 0 ({len(data)} bytes)")
    if data[0:4] != b"RIFF":
        raise WavDecodeError("missing RIFF tag at offset 0")
    if data[8:12] != b"WAVE":
        raise WavDecodeError("missing WAVE tag at offset 8")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body_start = pos + 8
        if chunk_id == b"fmt ":
            if chunk_size < 16 or body_start + 16 > len(data):
                raise WavDecodeError(f"truncated fmt chunk at offset {pos}")
            fmt = struct.unpack_from("<HHIIHH", data, body_start)
        elif chunk_id == b"data":
            if body_start + chunk_size > len(data):
                raise WavDecodeError(
                    f"data chunk at offset {pos} declares {chunk_size} bytes "
                    f"but only {len(data) - body_start} remain"
                )
            payload = data[body_start:body_start + chunk_size]
        # chunks are word-aligned
        pos = body_start + chunk_size + (chunk_size & 1)

    if fmt is None:
        raise WavDecodeError("no fmt chunk found")
    if payload is None:
        raise WavDecodeError("no data chunk found")

    audio_format, channels, sample_rate, _byte_rate, _block_align, bits = fmt
    if channels not in (1, 2):
        raise UnsupportedFormatError(f"unsupported channel count {channels}")
    if audio_format == 1 and bits == 16:
        raw = np.frombuffer(payload[: len(payload) - len(payload) % (2 * channels)], dtype="<i2")
        samples = raw.astype(np.float64) / _PCM_SCALE
    elif audio_format == 3 and bits == 32:
        raw = np.frombuffer(payload[: len(payload) - len(payload) % (4 * channels)], dtype="<f4")
        samples = raw.astype(np.float64)
    else:
        raise UnsupportedFormatError(
            f"unsupported encoding: format tag {audio_format}, {bits}-bit"
        )

    frames = samples.reshape(-1, channels).T.copy()
    return AudioClip(samples=frames, sample_rate=int(sample_rate), channels=int(channels))


def encode_wav(sig: MonoSignal | AudioClip) -> bytes:
    """Encode as 16-bit PCM WAV.

    Values round to the nearest 16-bit step and clip to [-1, 1); a signal
    produced by :func:`decode_wav` from 16-bit input re-encodes to the
    identical sample words.
    """
    if isinstance(sig, MonoSignal):
        frames = sig.samples[np.newaxis, :]
        rate = sig.sample_rate
    else:
        frames = sig.samples
        rate = sig.sample_rate
    channels = frames.shape[0]
    ints = np.clip(np.rint(frames * _PCM_SCALE), -32768, 32767).astype("<i2")
    payload = ints.T.reshape(-1).tobytes()

    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, 1, channels, rate, rate * channels * 2, channels * 2, 16
    )
    header += b"data" + struct.pack("<I", len(payload))
    return header + payload


def mixdown_mono(clip: AudioClip) -> MonoSignal:
    """Reduce to one channel: stereo averages left and right, mono passes through."""
    if clip.channels == 1:
        samples = clip.samples[0].astype(np.float64)
    else:
        samples = (clip.samples[0] + clip.samples[1]) / 2.0
    return MonoSignal(samples=samples, sample_rate=clip.sample_rate)


def trim_silence(sig: MonoSignal, threshold: float = DEFAULT_SILENCE_THRESHOLD) -> MonoSignal:
    """Remove the leading and trailing runs of samples with |x| <= threshold.

    Interior samples are untouched. An entirely silent signal raises
    :class:`EmptySignalError` because nothing remains to train on.
    """
    if threshold < 0:
        raise ValueError(f"threshold must be non-negative, got {threshold}")
    loud = np.flatnonzero(np.abs(sig.samples) > threshold)
    if len(loud) == 0:
        raise EmptySignalError("signal is entirely silent at the given threshold")
    return MonoSignal(samples=sig.samples[loud[0]:loud[-1] + 1], sample_rate=sig.sample_rate)


def normalize_rms(sig: MonoSignal) -> MonoSignal:
    """Scale so the RMS amplitude equals one."""
    r = rms(sig.samples)
    if r <= 0.0:
        raise DegenerateSignalError("cannot normalize a zero-RMS signal")
    return MonoSignal(samples=sig.samples / r, sample_rate=sig.sample_rate)
