"""Per-frame audio descriptors: a fixed 91-value vector per 40 ms frame.

Layout (index -> value):

* 0-24    ``flat_01`` .. ``flat_25``: spectral flatness (geometric mean over
          arithmetic mean of band power) in the first 25 of 32 quarter-octave
          bands with edges ``62.5 * 2**(k/4)`` Hz, k = 0..32. Band membership
          uses the conventional 5% edge widening, so every band holds at
          least one FFT bin at 44.1 kHz.
* 25      octave-scale spectrum centroid: power-weighted mean of
          ``log2(f / 1000)``; bins below 62.5 Hz fold into one pseudo-bin
          at 31.25 Hz.
* 26      octave-scale spectrum spread: power-weighted RMS deviation from
          the octave-scale centroid.
* 27      log energy: ``log10(sum of spectral power + 1e-10)``.
* 28-40   ``mfcc_01`` .. ``mfcc_13``: cepstrum of 24 triangular mel filters
          applied to the magnitude spectrum (natural log, orthonormal
          DCT-II). Values 1-12 are DCT coefficients 1..12; the 13th value
          is the 0-order coefficient, which carries the overall level.
* 41      zero-crossing rate: strict sign changes / (frame_len - 1).
* 42      roll-off: frequency (Hz) of the first bin where the cumulative
          magnitude reaches 85% of the total.
* 43      linear-scale centroid (Hz), power weighted.
* 44      linear-scale spread (Hz).
* 45-89   deltas: values 0-44 recomputed on the 30 ms sub-frame starting
          10 ms into the frame, minus the same values on the 30 ms
          sub-frame starting at the frame beginning.
* 90      flux: sum of squared differences between the two sub-frames'
          magnitude spectra.

Frames are Hamming-windowed and zero-padded to the next power of two
before the FFT. All logarithms take ``log(x + 1e-10)`` so silent frames
stay finite. Everything in this module is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.fft import dct

from .audio_io import MonoSignal, rms
from .errors import SignalTooShortError

N_FEATURES = 91
N_STATIC = 45
FEATURE_LAYOUT_VERSION = 1

LOG_EPS = 1e-10

N_FLATNESS_BANDS = 25
FLATNESS_BASE_HZ = 62.5
# Quarter-octave edges 62.5 Hz .. 16 kHz (33 edges, 32 bands).
FLATNESS_EDGES_HZ = FLATNESS_BASE_HZ * 2.0 ** (np.arange(33) / 4.0)
_EDGE_WIDENING = 0.05

OCTAVE_ANCHOR_HZ = 1000.0
OCTAVE_FLOOR_HZ = 62.5
_FOLDED_BIN_HZ = 31.25

N_MEL_FILTERS = 24
N_MFCC = 13
ROLLOFF_FRACTION = 0.85

_STATIC_NAMES = (
    tuple(f"flat_{i:02d}" for i in range(1, N_FLATNESS_BANDS + 1))
    + ("centroid_octave", "spread_octave", "energy_log")
    + tuple(f"mfcc_{i:02d}" for i in range(1, N_MFCC + 1))
    + ("zcr", "rolloff_hz", "centroid_hz", "spread_hz")
)
FEATURE_NAMES = _STATIC_NAMES + tuple(f"d_{n}" for n in _STATIC_NAMES) + ("flux",)
assert len(FEATURE_NAMES) == N_FEATURES


@dataclass(frozen=True)
class FrameSpec:
    """Analysis frame geometry. The two sub-frames of a frame are
    ``[0, subframe_ms)`` and ``[hop_ms, frame_ms)``, so ``subframe_ms +
    hop_ms`` must equal ``frame_ms``."""

    sample_rate: int
    frame_ms: int = 40
    hop_ms: int = 10
    subframe_ms: int = 30

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if self.frame_len <= 0 or self.hop_len <= 0 or self.subframe_len <= 0:
            raise ValueError("frame, hop, and sub-frame must span at least one sample")
        if self.subframe_ms + self.hop_ms != self.frame_ms:
            raise ValueError(
                f"sub-frame ({self.subframe_ms} ms) + hop ({self.hop_ms} ms) "
                f"must equal the frame ({self.frame_ms} ms)"
            )

    @property
    def frame_len(self) -> int:
        return round(self.frame_ms * self.sample_rate / 1000)

    @property
    def hop_len(self) -> int:
        return round(self.hop_ms * self.sample_rate / 1000)

    @property
    def subframe_len(self) -> int:
        return round(self.subframe_ms * self.sample_rate / 1000)

    def frame_count(self, n_samples: int) -> int:
        if n_samples < self.frame_len:
            raise SignalTooShortError(
                f"signal of {n_samples} samples is shorter than one "
                f"{self.frame_len}-sample frame"
            )
        return (n_samples - self.frame_len) // self.hop_len + 1


@dataclass(frozen=True)
class SpectrumFrame:
    """Magnitude spectrum over the non-negative FFT bins."""

    magnitudes: np.ndarray
    bin_hz: float

    def __post_init__(self):
        if self.magnitudes.ndim != 1:
            raise ValueError("magnitudes must be 1-D")

    @property
    def n_bins(self) -> int:
        return len(self.magnitudes)

    @property
    def freqs_hz(self) -> np.ndarray:
        return np.arange(self.n_bins) * self.bin_hz


def _next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


class _AnalysisPlan:
    """Window, filterbank, and band-index tables for one (rate, frame length)."""

    def __init__(self, sample_rate: int, frame_len: int):
        self.window = np.hamming(frame_len)
        self.fft_size = _next_pow2(frame_len)
        self.bin_hz = sample_rate / self.fft_size
        n_bins = self.fft_size // 2 + 1
        freqs = np.arange(n_bins) * self.bin_hz

        # Flatness bands: bin centers within the widened [0.95*lo, 1.05*hi).
        self.band_bins = []
        for k in range(N_FLATNESS_BANDS):
            lo = FLATNESS_EDGES_HZ[k] * (1.0 - _EDGE_WIDENING)
            hi = FLATNESS_EDGES_HZ[k + 1] * (1.0 + _EDGE_WIDENING)
            self.band_bins.append(np.flatnonzero((freqs >= lo) & (freqs < hi)))

        # Octave mapping: bins below the floor fold into one pseudo-bin.
        self.low_bins = np.flatnonzero(freqs < OCTAVE_FLOOR_HZ)
        self.high_bins = np.flatnonzero(freqs >= OCTAVE_FLOOR_HZ)
        self.octave_x = np.concatenate(
            [[np.log2(_FOLDED_BIN_HZ / OCTAVE_ANCHOR_HZ)],
             np.log2(freqs[self.high_bins] / OCTAVE_ANCHOR_HZ)]
        )

        self.freqs = freqs
        self.mel_filters = _mel_filterbank(N_MEL_FILTERS, n_bins, sample_rate, self.fft_size)


_PLANS: dict[tuple[int, int], _AnalysisPlan] = {}


def _plan(sample_rate: int, frame_len: int) -> _AnalysisPlan:
    key = (sample_rate, frame_len)
    plan = _PLANS.get(key)
    if plan is None:
        plan = _AnalysisPlan(sample_rate, frame_len)
        _PLANS[key] = plan
    return plan


def _hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f) / 700.0)


def _mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m) / 2595.0) - 1.0)


def _mel_filterbank(n_filters: int, n_bins: int, sample_rate: int, fft_size: int) -> np.ndarray:
    """Triangular filters spanning 0 Hz to Nyquist, unit peak, shape (n_filters, n_bins)."""
    points_hz = _mel_to_hz(np.linspace(0.0, _hz_to_mel(sample_rate / 2.0), n_filters + 2))
    freqs = np.arange(n_bins) * sample_rate / fft_size
    bank = np.zeros((n_filters, n_bins))
    for j in range(n_filters):
        lo, mid, hi = points_hz[j], points_hz[j + 1], points_hz[j + 2]
        up = (freqs - lo) / (mid - lo)
        down = (hi - freqs) / (hi - mid)
        bank[j] = np.clip(np.minimum(up, down), 0.0, None)
    return bank


def iterate_frames(sig: MonoSignal, spec: FrameSpec) -> Iterator[tuple[int, np.ndarray]]:
    """Yield (start_sample, frame) for every full frame at hop-length strides.

    The trailing partial frame, if any, is dropped. Raises
    :class:`SignalTooShortError` when the signal holds no full frame.
    """
    count = spec.frame_count(len(sig))
    for i in range(count):
        start = i * spec.hop_len
        yield start, sig.samples[start:start + spec.frame_len]


def power_spectrum(frame: np.ndarray, sample_rate: int) -> SpectrumFrame:
    """Hamming-windowed magnitude spectrum, zero-padded to the next power of two."""
    if len(frame) == 0:
        raise ValueError("frame must be non-empty")
    plan = _plan(sample_rate, len(frame))
    mags = np.abs(np.fft.rfft(frame * plan.window, n=plan.fft_size))
    return SpectrumFrame(magnitudes=mags, bin_hz=plan.bin_hz)


def mel_cepstrum(band_energies: np.ndarray) -> np.ndarray:
    """13 cepstral values from mel filter energies: DCT coefficients 1..12
    of ``log(e + eps)`` followed by the 0-order coefficient."""
    logs = np.log(np.asarray(band_energies, dtype=np.float64) + LOG_EPS)
    coeffs = dct(logs, type=2, norm="ortho")
    return np.concatenate([coeffs[1:N_MFCC], coeffs[:1]])


def _weighted_stats(power: np.ndarray, x: np.ndarray) -> tuple[float, float]:
    """Power-weighted mean and RMS deviation of x; (0, 0) for zero total power."""
    total = float(np.sum(power))
    if total <= 0.0:
        return 0.0, 0.0
    mean = float(np.dot(power, x) / total)
    spread = float(np.sqrt(np.dot(power, np.square(x - mean)) / total))
    return mean, spread


def static_features(spec_frame: SpectrumFrame, time_frame: np.ndarray) -> np.ndarray:
    """The 45 static values (indices 0-44) for one frame."""
    mags = spec_frame.magnitudes
    power = np.square(mags)
    n_bins = spec_frame.n_bins
    sample_rate = round(spec_frame.bin_hz * 2 * (n_bins - 1))
    plan = _plan(sample_rate, len(time_frame))
    if plan.fft_size // 2 + 1 != n_bins:
        raise ValueError(
            f"spectrum has {n_bins} bins but a {len(time_frame)}-sample frame "
            f"implies {plan.fft_size // 2 + 1}"
        )

    out = np.empty(N_STATIC)

    log_power = np.log(power + LOG_EPS)
    for k, bins in enumerate(plan.band_bins):
        if len(bins) == 0:
            out[k] = 1.0
            continue
        geo = np.exp(np.mean(log_power[bins]))
        arith = np.mean(power[bins]) + LOG_EPS
        out[k] = geo / arith

    folded = np.concatenate([[np.sum(power[plan.low_bins])], power[plan.high_bins]])
    out[25], out[26] = _weighted_stats(folded, plan.octave_x)

    out[27] = np.log10(np.sum(power) + LOG_EPS)

    out[28:41] = mel_cepstrum(plan.mel_filters @ mags)

    if len(time_frame) < 2:
        out[41] = 0.0
    else:
        signs = np.sign(time_frame)
        out[41] = np.count_nonzero(signs[1:] * signs[:-1] < 0) / (len(time_frame) - 1)

    cum = np.cumsum(mags)
    total = cum[-1]
    if total <= 0.0:
        out[42] = 0.0
    else:
        idx = int(np.searchsorted(cum, ROLLOFF_FRACTION * total, side="left"))
        out[42] = idx * spec_frame.bin_hz

    out[43], out[44] = _weighted_stats(power, plan.freqs)
    return out


def delta_and_flux(frame: np.ndarray, spec: FrameSpec) -> np.ndarray:
    """The 46 dynamic values (indices 45-90) for one full-length frame."""
    if len(frame) != spec.frame_len:
        raise ValueError(f"expected a {spec.frame_len}-sample frame, got {len(frame)}")
    sub = spec.subframe_len
    a = frame[:sub]
    b = frame[spec.hop_len:spec.hop_len + sub]
    spec_a = power_spectrum(a, spec.sample_rate)
    spec_b = power_spectrum(b, spec.sample_rate)
    deltas = static_features(spec_b, b) - static_features(spec_a, a)
    flux = float(np.sum(np.square(spec_b.magnitudes - spec_a.magnitudes)))
    return np.concatenate([deltas, [flux]])


def frame_feature_vector(frame: np.ndarray, spec: FrameSpec) -> np.ndarray:
    """The full 91-value vector for one frame of ``spec.frame_len`` samples."""
    spectrum = power_spectrum(frame, spec.sample_rate)
    vec = np.concatenate([static_features(spectrum, frame), delta_and_flux(frame, spec)])
    if not np.all(np.isfinite(vec)):
        bad = int(np.flatnonzero(~np.isfinite(vec))[0])
        raise ValueError(f"non-finite feature value at index {bad} ({FEATURE_NAMES[bad]})")
    return vec


@dataclass(frozen=True)
class FeatureMatrix:
    """Per-frame rows: start time (s), raw-frame RMS, and the 91 values."""

    times_s: np.ndarray
    frame_rms: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        n = len(self.times_s)
        if self.frame_rms.shape != (n,) or self.vectors.shape != (n, N_FEATURES):
            raise ValueError("inconsistent feature matrix shapes")

    @property
    def n_frames(self) -> int:
        return len(self.times_s)


def extract_feature_matrix(sig: MonoSignal, spec: FrameSpec) -> FeatureMatrix:
    """One row per frame of the signal, in frame order.

    The RMS column comes from the raw, un-windowed frame samples so
    evaluation can weight frames by loudness.
    """
    count = spec.frame_count(len(sig))
    times = np.empty(count)
    frame_rms = np.empty(count)
    vectors = np.empty((count, N_FEATURES))
    for i, (start, frame) in enumerate(iterate_frames(sig, spec)):
        times[i] = start / spec.sample_rate
        frame_rms[i] = rms(frame)
        vectors[i] = frame_feature_vector(frame, spec)
    return FeatureMatrix(times_s=times, frame_rms=frame_rms, vectors=vectors)
