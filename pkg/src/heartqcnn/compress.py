"""Compression of a normalized 32x32 image into 8 quantum-ready features.

The stages follow the pipeline figure: 4x4 max-pooling down to 8x8, Otsu
binarization of the pooled map, then row means, giving one value per
frequency band.  Otsu's threshold search runs over a 256-bin histogram
built on the image's own [min, max] support, which makes the binary map
invariant to affine rescaling of the values — normalizing an image first
does not change the result.

The feature CSV format produced here is one row per segment,
``f0,...,f7,label``, floats printed with full round-trip precision, with an
optional leading ``# method=<name>`` comment recording the front-end.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInput
from .labels import LABELS

N_FEATURES = 8
OTSU_BINS = 256

FEATURE_HEADER = "f0,f1,f2,f3,f4,f5,f6,f7,label"


def _check_image(img, expect_shape=None, unit_range=False):
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2 or img.size == 0:
        raise InvalidInput(f"expected a non-empty 2-D image, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise InvalidInput("image values must be finite")
    if expect_shape is not None and img.shape != expect_shape:
        raise InvalidInput(f"expected shape {expect_shape}, got {img.shape}")
    if unit_range and (img.min() < 0.0 or img.max() > 1.0):
        raise InvalidInput("image values must lie in [0, 1]")
    return img


def max_pool(img, kernel=4):
    """Non-overlapping block maxima with stride == kernel."""
    img = _check_image(img)
    kernel = int(kernel)
    if kernel < 1:
        raise InvalidInput(f"kernel must be >= 1, got {kernel}")
    rows, cols = img.shape
    if rows % kernel or cols % kernel:
        raise InvalidInput(
            f"image shape {img.shape} not divisible by kernel {kernel}")
    blocked = img.reshape(rows // kernel, kernel, cols // kernel, kernel)
    return blocked.max(axis=(1, 3))


def _otsu_split(img):
    """Otsu's split of a non-constant image over a 256-bin histogram.

    Returns (normalized image, first-maximum bin index t*).  The histogram
    is built on the image's own [min, max] support, so the split — and the
    binary map derived from it — is invariant to affine rescaling.
    """
    lo = img.min()
    hi = img.max()
    normalized = (img - lo) / (hi - lo)
    bins = np.minimum((normalized * OTSU_BINS).astype(np.int64), OTSU_BINS - 1)
    counts = np.bincount(bins.ravel(), minlength=OTSU_BINS)
    levels = np.arange(OTSU_BINS, dtype=np.int64)

    cum_n = np.cumsum(counts)
    cum_sum = np.cumsum(counts * levels)
    total_n = cum_n[-1]
    total_sum = cum_sum[-1]

    n0 = cum_n[:-1].astype(np.float64)
    n1 = (total_n - cum_n[:-1]).astype(np.float64)
    sum0 = cum_sum[:-1].astype(np.float64)
    valid = (n0 > 0) & (n1 > 0)
    mu0 = np.zeros(OTSU_BINS - 1)
    mu1 = np.zeros(OTSU_BINS - 1)
    mu0[valid] = sum0[valid] / n0[valid]
    mu1[valid] = (total_sum - sum0[valid]) / n1[valid]
    between = np.where(valid, n0 * n1 * (mu0 - mu1) ** 2, -np.inf)
    t_star = int(np.argmax(between))  # first maximum wins ties
    return normalized, t_star


def otsu_threshold(img):
    """Otsu's threshold on the input's own value scale.

    Returns None for a constant image (no between-class variance exists).
    """
    img = _check_image(img)
    lo = img.min()
    hi = img.max()
    if hi == lo:
        return None
    _, t_star = _otsu_split(img)
    return lo + (t_star + 1) * (hi - lo) / OTSU_BINS


def binarize_otsu(img):
    """Binary map: 1 where value > Otsu threshold, 0 elsewhere.

    The comparison runs in normalized coordinates, the exact values the
    histogram was built from, so affine rescaling of the input cannot flip
    borderline pixels.
    """
    img = _check_image(img, unit_range=True)
    if img.max() == img.min():
        return np.zeros(img.shape)
    normalized, t_star = _otsu_split(img)
    return (normalized > (t_star + 1) / OTSU_BINS).astype(np.float64)


def reduce_to_8(img):
    """Row means of an 8x8 map: one value per frequency band.

    Summed left to right so the result is reproducible term for term.
    """
    img = _check_image(img, expect_shape=(N_FEATURES, N_FEATURES),
                       unit_range=True)
    acc = img[:, 0].copy()
    for j in range(1, N_FEATURES):
        acc += img[:, j]
    return acc / N_FEATURES


def compress_pipeline(img):
    """32x32 normalized image -> 8 features: pool, binarize, row means."""
    img = _check_image(img, expect_shape=(32, 32), unit_range=True)
    return reduce_to_8(binarize_otsu(max_pool(img, 4)))


# ---------------------------------------------------------------------------
# feature CSV
# ---------------------------------------------------------------------------

def _check_features_matrix(features):
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[1] != N_FEATURES:
        raise InvalidInput(
            f"expected (n, {N_FEATURES}) features, got shape {features.shape}")
    if not np.all(np.isfinite(features)):
        raise InvalidInput("features must be finite")
    if features.size and (features.min() < 0.0 or features.max() > 1.0):
        raise InvalidInput("features must lie in [0, 1]")
    return features


def write_features(path, features, feature_labels, method=None):
    """Write one CSV row per segment; floats keep round-trip precision."""
    features = _check_features_matrix(features)
    feature_labels = list(feature_labels)
    if len(feature_labels) != features.shape[0]:
        raise InvalidInput(
            f"{features.shape[0]} feature rows but {len(feature_labels)} labels")
    for label in feature_labels:
        if label not in LABELS:
            raise InvalidInput(f"unknown label {label!r}")
    lines = []
    if method is not None:
        lines.append(f"# method={method}")
    lines.append(FEATURE_HEADER)
    for row, label in zip(features, feature_labels):
        lines.append(",".join(repr(float(v)) for v in row) + f",{label}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_features(path):
    """Read a feature CSV; returns (features, labels, method-or-None)."""
    with open(path, "r", encoding="utf-8") as fh:
        raw_lines = [line.rstrip("\n") for line in fh]
    lines = [ln for ln in raw_lines if ln.strip()]
    method = None
    if lines and lines[0].startswith("#"):
        comment = lines.pop(0).lstrip("#").strip()
        if comment.startswith("method="):
            method = comment.split("=", 1)[1]
    if not lines or lines[0] != FEATURE_HEADER:
        raise InvalidInput(f"{path}: missing feature header line")
    rows = []
    labels_out = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != N_FEATURES + 1:
            raise InvalidInput(f"{path}: malformed row {ln!r}")
        try:
            rows.append([float(v) for v in parts[:N_FEATURES]])
        except ValueError as exc:
            raise InvalidInput(f"{path}: non-numeric value in {ln!r}") from exc
        if parts[-1] not in LABELS:
            raise InvalidInput(f"{path}: unknown label {parts[-1]!r}")
        labels_out.append(parts[-1])
    features = np.asarray(rows, dtype=np.float64).reshape(len(rows), N_FEATURES)
    return _check_features_matrix(features), labels_out, method
