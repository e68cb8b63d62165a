"""PCG signal handling: loading, resampling, envelopes, cycle segmentation.

Cardiac cycles are located with the normalized Shannon-energy envelope.
Squared amplitudes are pushed through -u*log(u), which emphasizes
mid-intensity content (heart-sound bursts) over both the noise floor and
isolated full-scale samples, then smoothed with a short moving average and
normalized to [0, 1].  Peaks of that envelope mark S1 sounds; segment
boundaries sit at the midpoints between consecutive peaks, with the signal
edges closing the first and last segments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.io.wavfile
import scipy.signal

from .errors import InvalidInput, SegmentationFailed
from .labels import LABELS, MURMUR, S3

TARGET_RATE = 4000

MIN_SEGMENT_S = 0.2
MAX_SEGMENT_S = 2.5

ENVELOPE_WINDOW_S = 0.02
PEAK_HEIGHT = 0.3
MIN_CYCLE_S = 0.5

_FIR_TAPS = 64
_CUTOFF_FRACTION = 0.45  # of the target Nyquist


@dataclass(frozen=True)
class PcgSignal:
    """A mono heart-sound recording."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise InvalidInput("samples must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(samples)):
            raise InvalidInput("samples must be finite")
        rate = int(self.sample_rate)
        if rate <= 0:
            raise InvalidInput(f"sample_rate must be positive, got {rate}")
        samples = samples.copy()
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", rate)

    @property
    def duration(self):
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class PcgSegment:
    """One cardiac cycle cut from a parent signal."""

    samples: np.ndarray
    sample_rate: int
    source_start: int
    label: str | None = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise InvalidInput("segment samples must be a non-empty 1-D sequence")
        rate = int(self.sample_rate)
        if rate <= 0:
            raise InvalidInput(f"sample_rate must be positive, got {rate}")
        duration = samples.size / rate
        if not MIN_SEGMENT_S <= duration <= MAX_SEGMENT_S:
            raise InvalidInput(
                f"segment duration {duration:.3f}s outside "
                f"[{MIN_SEGMENT_S}, {MAX_SEGMENT_S}]s")
        if self.label is not None and self.label not in LABELS:
            raise InvalidInput(f"unknown label {self.label!r}")
        samples = samples.copy()
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", rate)
        object.__setattr__(self, "source_start", int(self.source_start))

    @property
    def duration(self):
        return self.samples.size / self.sample_rate


def _lowpass(x, cutoff_frac):
    """Edge-padded FIR low-pass; ``cutoff_frac`` is relative to Nyquist."""
    taps = scipy.signal.firwin(_FIR_TAPS, cutoff_frac)
    padded = np.pad(x, _FIR_TAPS, mode="edge")
    smoothed = np.convolve(padded, taps, mode="same")
    return smoothed[_FIR_TAPS:-_FIR_TAPS]


def resample_to_length(x, out_len):
    """Linear-interpolation resample of ``x`` to ``out_len`` samples.

    Decimation is preceded by a low-pass at 0.45x the new Nyquist to keep
    aliases out; the identity case returns a plain copy.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise InvalidInput("need a non-empty 1-D sequence")
    out_len = int(out_len)
    if out_len < 1:
        raise InvalidInput(f"output length must be >= 1, got {out_len}")
    if out_len == x.size:
        return x.copy()
    if out_len < x.size and x.size > _FIR_TAPS:
        x = _lowpass(x, _CUTOFF_FRACTION * out_len / x.size)
    if x.size == 1:
        return np.full(out_len, x[0])
    positions = np.linspace(0.0, x.size - 1.0, out_len)
    return np.interp(positions, np.arange(x.size), x)


def resample(signal, target_rate):
    """Change the sample rate, preserving duration within one sample."""
    target_rate = int(target_rate)
    if target_rate <= 0:
        raise InvalidInput(f"target_rate must be positive, got {target_rate}")
    if target_rate == signal.sample_rate:
        return PcgSignal(signal.samples, signal.sample_rate)
    out_len = max(1, int(round(signal.samples.size * target_rate / signal.sample_rate)))
    return PcgSignal(resample_to_length(signal.samples, out_len), target_rate)


def envelope(signal, window_s=ENVELOPE_WINDOW_S):
    """Smoothed normalized Shannon energy, same length as the input."""
    if window_s <= 0:
        raise InvalidInput(f"window_s must be positive, got {window_s}")
    x = signal.samples
    peak = np.max(np.abs(x))
    if peak == 0.0:
        return np.zeros(x.size)
    u = (x / peak) ** 2
    # -u*log(u) is exactly zero at u == 1, which would blank out full-scale
    # samples; nudge just below 1 so they keep a positive energy
    u = np.minimum(u, 1.0 - 1e-9)
    energy = np.zeros(x.size)
    nz = u > 0.0
    energy[nz] = -u[nz] * np.log(u[nz])
    window = max(1, int(round(window_s * signal.sample_rate)))
    smoothed = np.convolve(energy, np.full(window, 1.0 / window), mode="same")
    top = smoothed.max()
    return smoothed / top if top > 0.0 else smoothed


def cycle_bounds_from_peaks(peaks, n_samples):
    """Midpoint boundaries: [0, m1), [m1, m2), ..., [mk, n_samples)."""
    peaks = np.asarray(peaks, dtype=np.int64)
    if peaks.size < 2:
        raise SegmentationFailed(f"need at least 2 peaks, got {peaks.size}")
    mids = ((peaks[:-1] + peaks[1:]) // 2).tolist()
    edges = [0] + mids + [int(n_samples)]
    return list(zip(edges[:-1], edges[1:]))


def segment_by_cycles(signal, min_cycle_s=MIN_CYCLE_S):
    """Cut the signal into one segment per detected cardiac cycle."""
    if min_cycle_s <= 0:
        raise InvalidInput(f"min_cycle_s must be positive, got {min_cycle_s}")
    env = envelope(signal)
    distance = max(1, int(round(min_cycle_s * signal.sample_rate)))
    peaks, _ = scipy.signal.find_peaks(env, height=PEAK_HEIGHT, distance=distance)
    if peaks.size < 2:
        raise SegmentationFailed(
            f"found {peaks.size} envelope peak(s); need at least 2")
    segments = []
    for start, stop in cycle_bounds_from_peaks(peaks, signal.samples.size):
        duration = (stop - start) / signal.sample_rate
        if not MIN_SEGMENT_S <= duration <= MAX_SEGMENT_S:
            continue
        segments.append(PcgSegment(signal.samples[start:stop],
                                   signal.sample_rate, start))
    return segments


# ---------------------------------------------------------------------------
# synthetic recordings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SyntheticPcg:
    signal: PcgSignal
    s1_times: np.ndarray  # seconds, one per cycle
    s2_times: np.ndarray


_CYCLE_S = 0.75
_LEAD_S = 0.25
_TAIL_S = 0.2
_S1_OFFSET_S = 0.10
_S2_OFFSET_S = 0.42
_S3_DELAY_S = 0.13


def _add_tone_burst(buf, rate, center_s, dur_s, freq, amp):
    sigma = dur_s / 4.0
    half = int(round(3 * sigma * rate))
    center = int(round(center_s * rate))
    lo = max(0, center - half)
    hi = min(buf.size, center + half + 1)
    if lo >= hi:
        return
    t = (np.arange(lo, hi) - center) / rate
    buf[lo:hi] += amp * np.exp(-0.5 * (t / sigma) ** 2) * np.sin(2 * np.pi * freq * t)


def synthesize_pcg(label, n_cycles, seed):
    """Deterministic synthetic PCG with known burst times.

    Every cycle carries an S1 and an S2 tone burst; the S3 class adds a
    low-frequency burst shortly after S2, the murmur class fills the S1-S2
    interval with band-passed noise.
    """
    if label not in LABELS:
        raise InvalidInput(f"label must be one of {LABELS}, got {label!r}")
    n_cycles = int(n_cycles)
    if n_cycles < 1:
        raise InvalidInput(f"n_cycles must be >= 1, got {n_cycles}")
    rng = np.random.default_rng(seed)
    rate = TARGET_RATE

    durations = _CYCLE_S * (1.0 + rng.uniform(-0.04, 0.04, size=n_cycles))
    total_s = _LEAD_S + float(np.sum(durations)) + _TAIL_S
    buf = np.zeros(int(round(total_s * rate)))

    s1_times = []
    s2_times = []
    start = _LEAD_S
    for k in range(n_cycles):
        s1_t = start + _S1_OFFSET_S + rng.uniform(-0.008, 0.008)
        s2_t = start + _S2_OFFSET_S + rng.uniform(-0.008, 0.008)
        s1_freq = rng.uniform(95.0, 125.0)
        s2_freq = rng.uniform(65.0, 85.0)
        s1_amp = rng.uniform(0.9, 1.0)
        _add_tone_burst(buf, rate, s1_t, 0.07, s1_freq, s1_amp)
        _add_tone_burst(buf, rate, s2_t, 0.05, s2_freq, 0.55 * s1_amp)
        if label == S3:
            s3_freq = rng.uniform(35.0, 55.0)
            _add_tone_burst(buf, rate, s2_t + _S3_DELAY_S, 0.06, s3_freq, 0.45)
        else:
            lo = int(round((s1_t + 0.05) * rate))
            hi = int(round((s2_t - 0.03) * rate))
            noise = rng.normal(0.0, 1.0, size=hi - lo)
            band = scipy.signal.firwin(
                65, [150.0, 400.0], pass_zero=False, fs=rate)
            shaped = np.convolve(noise, band, mode="same")
            shaped /= max(float(np.std(shaped)), 1e-12)  # unit RMS
            taper = np.hanning(shaped.size)
            buf[lo:hi] += 0.40 * shaped * taper
        s1_times.append(s1_t)
        s2_times.append(s2_t)
        start += durations[k]

    buf += rng.normal(0.0, 0.01, size=buf.size)
    buf *= 0.95 / np.max(np.abs(buf))
    return SyntheticPcg(PcgSignal(buf, rate),
                        np.asarray(s1_times), np.asarray(s2_times))


# ---------------------------------------------------------------------------
# WAV files
# ---------------------------------------------------------------------------

def load_wav(path):
    """Read a mono WAV (16-bit PCM or 32-bit float) into a PcgSignal."""
    rate, data = scipy.io.wavfile.read(path)
    if data.ndim != 1:
        raise InvalidInput(f"{path}: expected mono audio, got shape {data.shape}")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise InvalidInput(
            f"{path}: unsupported sample format {data.dtype}; "
            "use 16-bit PCM or 32-bit float")
    return PcgSignal(samples, rate)


def save_wav(path, signal):
    """Write a PcgSignal as mono 16-bit PCM."""
    scaled = np.round(signal.samples * 32768.0)
    pcm = np.clip(scaled, -32768, 32767).astype(np.int16)
    scipy.io.wavfile.write(path, signal.sample_rate, pcm)
