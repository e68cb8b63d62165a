"""Time-frequency imaging of heart-sound segments.

Three front-ends produce 2-D arrays from a PcgSegment: a complex-Morlet
scalogram (the main path), a Hann-window Mel spectrogram, and a direct
grayscale reshape of the waveform.  Downstream code consumes them through
the same contract: resize to 32x32 with resize_bilinear, squash into [0,1]
with normalize01.

Images are plain 2-D float arrays in row-major order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dsp import resample_to_length
from .errors import InvalidInput

F_MIN = 20.0
F_MAX = 1000.0

MEL_F_MIN = 20.0
MEL_F_MAX = 2000.0

IMAGE_SIZE = 32
RAW_LENGTH = IMAGE_SIZE * IMAGE_SIZE


@dataclass(frozen=True)
class WaveletSpec:
    """Complex Morlet configuration: psi(t) = (pi*B)^-1/2 e^{2pi i C t} e^{-t^2/B}."""

    n_scales: int = 128
    center_freq: float = 1.0
    bandwidth: float = 1.5

    def __post_init__(self):
        if self.n_scales < 2:
            raise InvalidInput(f"n_scales must be >= 2, got {self.n_scales}")
        if self.center_freq <= 0 or self.bandwidth <= 0:
            raise InvalidInput("center_freq and bandwidth must be positive")


def pseudo_frequencies(spec=WaveletSpec()):
    """Pseudo-frequency (Hz) of each scalogram row, increasing from 20 to 1000."""
    return np.geomspace(F_MIN, F_MAX, spec.n_scales)


def wavelet_scales(spec, sample_rate):
    """Scale a_i (in samples) for each row: a = C * fs / f, so larger scale
    means lower frequency."""
    return spec.center_freq * sample_rate / pseudo_frequencies(spec)


def _morlet_kernel(scale, spec):
    b = spec.bandwidth
    c = spec.center_freq
    sigma = scale * np.sqrt(b / 2.0)  # Gaussian envelope std in samples
    half = int(np.ceil(4.0 * sigma))
    t = np.arange(-half, half + 1) / scale
    psi = (np.pi * b) ** -0.5 * np.exp(2j * np.pi * c * t) * np.exp(-t ** 2 / b)
    return psi / np.sum(np.abs(psi))


def cwt_scalogram(segment, spec=WaveletSpec()):
    """|W(a_i, b)| matrix, one row per scale, one column per sample."""
    x = segment.samples
    scales = wavelet_scales(spec, segment.sample_rate)
    longest = 2 * int(np.ceil(4.0 * scales.max() * np.sqrt(spec.bandwidth / 2.0))) + 1
    if x.size < longest:
        raise InvalidInput(
            f"segment of {x.size} samples is shorter than the longest "
            f"wavelet kernel ({longest} samples)")
    out = np.empty((spec.n_scales, x.size))
    for i, scale in enumerate(scales):
        kernel = _morlet_kernel(scale, spec)
        out[i] = np.abs(np.correlate(x, kernel, mode="same"))
    return out


def _mel(freq):
    return 2595.0 * np.log10(1.0 + freq / 700.0)


def _mel_inv(m):
    return 700.0 * (10.0 ** (m / 2595.0) - 1.0)


def mel_filterbank(n_mels, n_fft, sample_rate, f_min=MEL_F_MIN, f_max=MEL_F_MAX):
    """Triangular filters on the mel scale; adjacent triangles overlap 50%."""
    edges = _mel_inv(np.linspace(_mel(f_min), _mel(f_max), n_mels + 2))
    freqs = np.fft.rfftfreq(n_fft, 1.0 / sample_rate)
    bank = np.zeros((n_mels, freqs.size))
    for m in range(n_mels):
        left, center, right = edges[m], edges[m + 1], edges[m + 2]
        up = (freqs - left) / (center - left)
        down = (right - freqs) / (right - center)
        bank[m] = np.clip(np.minimum(up, down), 0.0, None)
    return bank


def mel_band_centers(n_mels=IMAGE_SIZE, f_min=MEL_F_MIN, f_max=MEL_F_MAX):
    """Center frequency (Hz) of each mel band."""
    edges = _mel_inv(np.linspace(_mel(f_min), _mel(f_max), n_mels + 2))
    return edges[1:-1]


def mel_spectrogram(segment, n_fft=512, hop=128, n_mels=IMAGE_SIZE):
    """log1p-compressed mel-filtered magnitude STFT, (n_mels, n_frames)."""
    if n_fft < 2 or hop < 1 or n_mels < 1:
        raise InvalidInput("n_fft, hop, and n_mels must be positive")
    x = segment.samples
    if x.size < n_fft:
        raise InvalidInput(
            f"segment of {x.size} samples is shorter than n_fft={n_fft}")
    window = np.hanning(n_fft)
    starts = np.arange(0, x.size - n_fft + 1, hop)
    frames = np.stack([x[s:s + n_fft] * window for s in starts])
    magnitude = np.abs(np.fft.rfft(frames, axis=1))
    bank = mel_filterbank(n_mels, n_fft, segment.sample_rate)
    return np.log1p(bank @ magnitude.T)


def raw_grayscale(segment):
    """Waveform resampled to 1024 samples, min-max scaled, as a 32x32 image."""
    y = resample_to_length(segment.samples, RAW_LENGTH)
    lo, hi = y.min(), y.max()
    if hi > lo:
        y = (y - lo) / (hi - lo)
    else:
        y = np.full(RAW_LENGTH, 0.5)
    return y.reshape(IMAGE_SIZE, IMAGE_SIZE)


def _check_image(img):
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise InvalidInput(f"expected a non-empty 2-D image, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise InvalidInput("image values must be finite")
    return img


def resize_bilinear(img, rows, cols):
    """Corner-aligned bilinear resize; output values stay inside the input range."""
    img = _check_image(img)
    rows, cols = int(rows), int(cols)
    if rows < 1 or cols < 1:
        raise InvalidInput("target shape must be at least 1x1")

    def axis_coords(out_n, in_n):
        if out_n == 1:
            return np.zeros(1)
        return np.linspace(0.0, in_n - 1.0, out_n)

    rr = axis_coords(rows, img.shape[0])
    cc = axis_coords(cols, img.shape[1])
    r0 = np.minimum(rr.astype(np.int64), max(img.shape[0] - 2, 0))
    c0 = np.minimum(cc.astype(np.int64), max(img.shape[1] - 2, 0))
    fr = rr - r0
    fc = cc - c0
    r1 = np.minimum(r0 + 1, img.shape[0] - 1)
    c1 = np.minimum(c0 + 1, img.shape[1] - 1)

    top = img[np.ix_(r0, c0)] * (1.0 - fc) + img[np.ix_(r0, c1)] * fc
    bottom = img[np.ix_(r1, c0)] * (1.0 - fc) + img[np.ix_(r1, c1)] * fc
    return top * (1.0 - fr)[:, None] + bottom * fr[:, None]


def normalize01(img):
    """(v - min) / (max - min); a constant image maps to all 0.5."""
    img = _check_image(img)
    lo, hi = img.min(), img.max()
    if hi == lo:
        return np.full(img.shape, 0.5)
    return (img - lo) / (hi - lo)
