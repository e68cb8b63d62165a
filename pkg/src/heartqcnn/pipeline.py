"""End-to-end front end: cardiac cycle -> 32x32 image -> 8 features.

Dispatches between the three image front-ends (CWT scalogram, mel
spectrogram, raw grayscale), then applies the shared resize / normalize /
compress tail.  Everything downstream of the WAV file is deterministic, so
the same recording always produces the same feature rows.
"""

from __future__ import annotations

import numpy as np

from .compress import compress_pipeline
from .dsp import TARGET_RATE, load_wav, resample, segment_by_cycles
from .errors import InvalidInput, SegmentationFailed
from .qcnn import FEATURE_METHODS
from .timefreq import (
    IMAGE_SIZE,
    cwt_scalogram,
    mel_spectrogram,
    normalize01,
    raw_grayscale,
    resize_bilinear,
)


def _check_method(method):
    if method not in FEATURE_METHODS:
        raise InvalidInput(
            f"method must be one of {FEATURE_METHODS}, got {method!r}")


def segment_image(segment, method):
    """Normalized 32x32 time-frequency image of one cardiac cycle."""
    _check_method(method)
    if method == "wavelet":
        img = cwt_scalogram(segment)
    elif method == "mel":
        img = mel_spectrogram(segment)
    else:
        img = raw_grayscale(segment)
    return normalize01(resize_bilinear(img, IMAGE_SIZE, IMAGE_SIZE))


def segment_features(segment, method):
    """The 8-value representation of one cardiac cycle."""
    return compress_pipeline(segment_image(segment, method))


def signal_features(signal, method):
    """Feature matrix for a whole recording, one row per cardiac cycle."""
    _check_method(method)
    resampled = resample(signal, TARGET_RATE)
    segments = segment_by_cycles(resampled)
    if not segments:
        raise SegmentationFailed("no usable cardiac cycles in the recording")
    return np.stack([segment_features(seg, method) for seg in segments])


def wav_features(path, method):
    """Feature matrix for a WAV file on disk."""
    return signal_features(load_wav(path), method)
