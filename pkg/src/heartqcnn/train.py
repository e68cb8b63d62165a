"""Hybrid training loop: dataset loss, optimizer driver, metrics, splits.

The objective handed to the optimizer is the full-dataset mean squared
error between the readout expectation and the +/-1 class labels (S3 = +1,
murmur = -1).  It is deterministic — forwards are chunked in fixed blocks
and the per-row residuals are reduced with an exact compensated sum — so
the derivative-free optimizer sees the same value for the same parameters
no matter how the work is scheduled.

History keeps one record per objective evaluation with the *best-seen*
loss and the train accuracy of that best point, which makes the recorded
loss non-increasing and the final record consistent with the returned
parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .cobyla import cobyla_minimize
from .errors import InvalidInput
from .labels import LABELS, MURMUR, S3
from .qcnn import N_PARAMS, forward_batch

N_FEATURES = 8

#: evaluation chunk size; results are independent of it (rows are
#: independent in the batched simulator), it only bounds peak memory
CHUNK_SIZE = 16

HISTORY_HEADER = "iter,loss,train_acc"

_SPLITS = ("train", "test")


def _label_signs(labels):
    return np.array([1.0 if lab == S3 else -1.0 for lab in labels])


@dataclass(frozen=True)
class Dataset:
    """Feature rows with labels and a split tag.

    A "train" dataset must contain both classes; a "test" dataset may be
    single-class.
    """

    features: np.ndarray
    labels: Tuple[str, ...]
    split: str = "train"

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        labels = tuple(self.labels)
        if features.ndim != 2 or features.shape[1] != N_FEATURES:
            raise InvalidInput(
                f"expected (n, {N_FEATURES}) features, got {features.shape}")
        if features.shape[0] == 0:
            raise InvalidInput("dataset must be non-empty")
        if not np.all(np.isfinite(features)):
            raise InvalidInput("features must be finite")
        if features.min() < 0.0 or features.max() > 1.0:
            raise InvalidInput("features must lie in [0, 1]")
        if len(labels) != features.shape[0]:
            raise InvalidInput(
                f"{features.shape[0]} rows but {len(labels)} labels")
        for lab in labels:
            if lab not in LABELS:
                raise InvalidInput(f"unknown label {lab!r}")
        if self.split not in _SPLITS:
            raise InvalidInput(f"split must be one of {_SPLITS}")
        if self.split == "train" and set(labels) != set(LABELS):
            raise InvalidInput("a train dataset needs both classes present")
        features.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_rows(cls, rows, split="train"):
        rows = list(rows)
        if not rows:
            raise InvalidInput("dataset must be non-empty")
        features = np.stack([np.asarray(f, dtype=np.float64) for f, _ in rows])
        return cls(features, tuple(lab for _, lab in rows), split)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def y(self):
        """Labels as +/-1 targets (S3 = +1)."""
        return _label_signs(self.labels)

    def class_count(self, label) -> int:
        return sum(1 for lab in self.labels if lab == label)


@dataclass(frozen=True)
class TrainConfig:
    max_iter: int = 200
    rhobeg: float = 0.01
    rhoend: float = 1e-6
    seed: int = 0
    init_scale: float = math.pi

    def __post_init__(self):
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidInput(f"max_iter must be >= 1, got {self.max_iter}")
        if not (0.0 < self.rhoend < self.rhobeg):
            raise InvalidInput(
                f"need 0 < rhoend < rhobeg, got {self.rhoend} / {self.rhobeg}")
        if not (np.isfinite(self.init_scale) and self.init_scale >= 0.0):
            raise InvalidInput(f"bad init_scale {self.init_scale}")
        object.__setattr__(self, "max_iter", int(self.max_iter))
        object.__setattr__(self, "seed", int(self.seed))


class HistoryRecord(NamedTuple):
    iteration: int
    loss: float
    train_acc: float


def _forward_dataset(features, params):
    n = features.shape[0]
    if n <= CHUNK_SIZE:
        return forward_batch(features, params)
    parts = [forward_batch(features[i:i + CHUNK_SIZE], params)
             for i in range(0, n, CHUNK_SIZE)]
    return np.concatenate(parts)


def _mse(outputs, y):
    residuals = (outputs - y) ** 2
    return math.fsum(residuals.tolist()) / y.size


def _accuracy(outputs, y):
    predicted = np.where(outputs >= 0.0, 1.0, -1.0)
    return np.count_nonzero(predicted == y) / y.size


def loss(dataset: Dataset, params) -> float:
    """Mean squared error of the readout against the +/-1 labels."""
    return _mse(_forward_dataset(dataset.features, params), dataset.y)


def init_params(seed, n=N_PARAMS, scale=math.pi):
    """Seeded uniform angles in [-scale, +scale]."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-scale, scale, int(n))


def train(train_set: Dataset, cfg: Optional[TrainConfig] = None):
    """Fit the 60 ansatz angles on a dataset; returns (params, history)."""
    if cfg is None:
        cfg = TrainConfig()
    if set(train_set.labels) != set(LABELS):
        raise InvalidInput("training needs both classes present")
    y = train_set.y
    history: List[HistoryRecord] = []
    best = {"loss": math.inf, "acc": math.nan}

    def objective(params):
        outputs = _forward_dataset(train_set.features, params)
        value = _mse(outputs, y)
        if value < best["loss"]:  # same strict rule as the optimizer
            best["loss"] = value
            best["acc"] = _accuracy(outputs, y)
        history.append(HistoryRecord(len(history) + 1, best["loss"],
                                     best["acc"]))
        return value

    x0 = init_params(cfg.seed, N_PARAMS, cfg.init_scale)
    result = cobyla_minimize(objective, x0, rhobeg=cfg.rhobeg,
                             rhoend=cfg.rhoend, max_iter=cfg.max_iter)
    return result.x, history


def evaluate(dataset: Dataset, params) -> dict:
    """Accuracy, loss and S3-positive confusion counts on a dataset."""
    outputs = _forward_dataset(dataset.features, params)
    y = dataset.y
    predicted_s3 = outputs >= 0.0
    actual_s3 = y > 0.0
    tp = int(np.count_nonzero(predicted_s3 & actual_s3))
    fp = int(np.count_nonzero(predicted_s3 & ~actual_s3))
    fn = int(np.count_nonzero(~predicted_s3 & actual_s3))
    tn = int(np.count_nonzero(~predicted_s3 & ~actual_s3))
    return {
        "accuracy": (tp + tn) / dataset.n_rows,
        "loss": _mse(outputs, y),
        "tp": tp,
        "fp": fp,
        "fn": fn,
        "tn": tn,
        "n_rows": dataset.n_rows,
    }


def split_dataset(rows: Sequence, test_fraction=0.3, seed=0):
    """Stratified shuffle split of (features, label) rows.

    Each class is split independently at the fraction (at least one row
    of every class lands on each side), the remainder goes to train, and
    row order within each split follows the input order.
    """
    rows = list(rows)
    if not (0.0 < test_fraction < 1.0):
        raise InvalidInput(f"test_fraction must be in (0, 1), got {test_fraction}")
    for _, lab in rows:
        if lab not in LABELS:
            raise InvalidInput(f"unknown label {lab!r}")
    rng = np.random.default_rng(seed)
    test_idx = []
    train_idx = []
    for label in LABELS:
        idx = [i for i, (_, lab) in enumerate(rows) if lab == label]
        if len(idx) < 2:
            raise InvalidInput(
                f"class {label!r} has {len(idx)} row(s); need at least 2")
        k = int(round(test_fraction * len(idx)))
        k = min(max(k, 1), len(idx) - 1)
        perm = rng.permutation(len(idx))
        test_idx.extend(idx[p] for p in perm[:k])
        train_idx.extend(idx[p] for p in perm[k:])
    train_rows = [rows[i] for i in sorted(train_idx)]
    test_rows = [rows[i] for i in sorted(test_idx)]
    return (Dataset.from_rows(train_rows, "train"),
            Dataset.from_rows(test_rows, "test"))


# ---------------------------------------------------------------------------
# history CSV
# ---------------------------------------------------------------------------

def write_history(path, history):
    lines = [HISTORY_HEADER]
    for rec in history:
        lines.append(f"{rec.iteration},{float(rec.loss)!r},"
                     f"{float(rec.train_acc)!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def read_history(path):
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines or lines[0] != HISTORY_HEADER:
        raise InvalidInput(f"{path}: missing history header")
    records = []
    last_iter = 0
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 3:
            raise InvalidInput(f"{path}: malformed row {ln!r}")
        try:
            rec = HistoryRecord(int(parts[0]), float(parts[1]), float(parts[2]))
        except ValueError as exc:
            raise InvalidInput(f"{path}: bad values in {ln!r}") from exc
        if rec.iteration <= last_iter:
            raise InvalidInput(f"{path}: iterations not strictly increasing")
        if not math.isfinite(rec.loss):
            raise InvalidInput(f"{path}: non-finite loss at iter {rec.iteration}")
        records.append(rec)
        last_iter = rec.iteration
    return records
