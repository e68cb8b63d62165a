"""Training loop: dataset handling, loss, optimizer driver, metrics, splits."""

import math

import numpy as np
import pytest
from sklearn.metrics import confusion_matrix

from heartqcnn.errors import InvalidInput
from heartqcnn.qcnn import N_PARAMS, forward
from heartqcnn.train import (
    CHUNK_SIZE,
    Dataset,
    HISTORY_HEADER,
    HistoryRecord,
    TrainConfig,
    _forward_dataset,
    _mse,
    evaluate,
    init_params,
    loss,
    read_history,
    split_dataset,
    train,
    write_history,
)


def _random_dataset(seed, n_per_class=6, split="train"):
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(n_per_class):
        rows.append((rng.random(8), "S3"))
        rows.append((rng.random(8), "MURMUR"))
    return Dataset.from_rows(rows, split)


def _separable_rows(seed=42, n_per_class=16, noise=0.1):
    """Low-band-energy class vs mirrored high-band class."""
    rng = np.random.default_rng(seed)
    base_s3 = np.array([1, 1, 1, 1, 0, 0, 0, 0], dtype=float)
    base_mur = 1.0 - base_s3
    rows = []
    for _ in range(n_per_class):
        rows.append((np.clip(base_s3 + rng.uniform(-noise, noise, 8), 0, 1),
                     "S3"))
        rows.append((np.clip(base_mur + rng.uniform(-noise, noise, 8), 0, 1),
                     "MURMUR"))
    return rows


# ---------------------------------------------------------------------------
# Dataset
# ---------------------------------------------------------------------------

def test_dataset_validation():
    good = np.full((2, 8), 0.5)
    with pytest.raises(InvalidInput):
        Dataset(np.empty((0, 8)), (), "train")  # empty
    with pytest.raises(InvalidInput):
        Dataset(np.full((2, 4), 0.5), ("S3", "MURMUR"))  # wrong width
    with pytest.raises(InvalidInput):
        Dataset(np.full((2, 8), 1.5), ("S3", "MURMUR"))  # out of range
    with pytest.raises(InvalidInput):
        Dataset(good, ("S3", "ECG"))  # unknown label
    with pytest.raises(InvalidInput):
        Dataset(good, ("S3",))  # label count mismatch
    with pytest.raises(InvalidInput):
        Dataset(good, ("S3", "MURMUR"), "validation")  # unknown split
    with pytest.raises(InvalidInput):
        Dataset(good, ("S3", "S3"), "train")  # single class for training


def test_dataset_test_split_may_be_single_class():
    ds = Dataset(np.full((3, 8), 0.5), ("S3", "S3", "S3"), "test")
    assert ds.n_rows == 3
    assert np.array_equal(ds.y, [1.0, 1.0, 1.0])
    assert ds.class_count("S3") == 3
    assert ds.class_count("MURMUR") == 0


def test_dataset_from_rows_and_signs():
    rows = [(np.full(8, 0.25), "MURMUR"), (np.full(8, 0.75), "S3")]
    ds = Dataset.from_rows(rows, "train")
    assert ds.labels == ("MURMUR", "S3")
    assert np.array_equal(ds.y, [-1.0, 1.0])
    assert ds.features[1, 0] == 0.75
    with pytest.raises(ValueError):
        ds.features[0, 0] = 0.9  # frozen buffer


# ---------------------------------------------------------------------------
# loss
# ---------------------------------------------------------------------------

def test_mse_examples():
    assert _mse(np.array([1.0, -1.0]), np.array([1.0, -1.0])) == 0.0
    assert _mse(np.array([0.0]), np.array([1.0])) == 1.0
    assert _mse(np.array([-1.0, 1.0]), np.array([1.0, -1.0])) == 4.0


def test_loss_matches_per_row_forward():
    ds = _random_dataset(seed=1, n_per_class=3)
    params = init_params(5)
    outputs = [forward(ds.features[i], params) for i in range(ds.n_rows)]
    expected = math.fsum((o - yi) ** 2 for o, yi in zip(outputs, ds.y))
    assert loss(ds, params) == expected / ds.n_rows


def test_loss_bounds():
    params = init_params(9)
    for seed in range(3):
        value = loss(_random_dataset(seed), params)
        assert 0.0 <= value <= 4.0


def test_loss_invariant_under_row_permutation():
    ds = _random_dataset(seed=2, n_per_class=10)
    params = init_params(3)
    perm = np.random.default_rng(0).permutation(ds.n_rows)
    shuffled = Dataset(ds.features[perm],
                       tuple(ds.labels[i] for i in perm), "train")
    # fsum is an exact multiset sum, so this holds bit for bit
    assert loss(shuffled, params) == loss(ds, params)


def test_forward_chunking_does_not_change_results():
    ds = _random_dataset(seed=4, n_per_class=20)  # 40 rows > CHUNK_SIZE
    assert ds.n_rows > CHUNK_SIZE
    params = init_params(7)
    chunked = _forward_dataset(ds.features, params)
    from heartqcnn.qcnn import forward_batch
    assert np.array_equal(chunked, forward_batch(ds.features, params))


# ---------------------------------------------------------------------------
# init_params / TrainConfig
# ---------------------------------------------------------------------------

def test_init_params_deterministic_and_bounded():
    a = init_params(123)
    assert a.shape == (N_PARAMS,)
    assert np.array_equal(a, init_params(123))
    assert np.any(a != init_params(124))
    assert np.all(np.abs(a) <= math.pi)


def test_init_params_zero_scale():
    assert np.array_equal(init_params(5, scale=0.0), np.zeros(N_PARAMS))


def test_train_config_defaults_and_validation():
    cfg = TrainConfig()
    assert cfg.max_iter == 200
    assert cfg.rhobeg == 0.01
    assert cfg.rhoend == 1e-6
    assert cfg.init_scale == math.pi
    with pytest.raises(InvalidInput):
        TrainConfig(max_iter=0)
    with pytest.raises(InvalidInput):
        TrainConfig(rhobeg=1e-6, rhoend=1e-6)  # needs rhoend < rhobeg
    with pytest.raises(InvalidInput):
        TrainConfig(init_scale=-1.0)


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------

def test_train_single_evaluation_budget():
    ds = _random_dataset(seed=6, n_per_class=2)
    params, history = train(ds, TrainConfig(max_iter=1, seed=0))
    assert len(history) == 1
    assert history[0].iteration == 1
    assert history[0].loss == loss(ds, params)


def test_train_history_is_best_seen():
    ds = _random_dataset(seed=8, n_per_class=4)
    params, history = train(ds, TrainConfig(max_iter=50, seed=1))
    losses = [rec.loss for rec in history]
    iters = [rec.iteration for rec in history]
    assert iters == list(range(1, len(history) + 1))
    assert all(b <= a for a, b in zip(losses, losses[1:]))  # non-increasing
    assert history[-1].loss <= history[0].loss
    # the final record describes exactly the returned parameters
    assert history[-1].loss == loss(ds, params)
    assert all(math.isfinite(v) for v in losses)


def test_train_reproducible():
    ds = _random_dataset(seed=10, n_per_class=4)
    cfg = TrainConfig(max_iter=40, seed=3)
    params_a, hist_a = train(ds, cfg)
    params_b, hist_b = train(ds, cfg)
    assert np.array_equal(params_a, params_b)
    assert hist_a == hist_b


def test_train_separable_dataset_reaches_high_accuracy():
    rows = _separable_rows(seed=42, n_per_class=16)
    ds = Dataset.from_rows(rows, "train")

    # the classes are linearly separable: nearest-centroid gets 100%
    centroid_s3 = ds.features[ds.y > 0].mean(axis=0)
    centroid_mur = ds.features[ds.y < 0].mean(axis=0)
    d_s3 = np.linalg.norm(ds.features - centroid_s3, axis=1)
    d_mur = np.linalg.norm(ds.features - centroid_mur, axis=1)
    centroid_pred = np.where(d_s3 < d_mur, 1.0, -1.0)
    assert np.array_equal(centroid_pred, ds.y)

    params, history = train(ds, TrainConfig(max_iter=200, seed=42))
    metrics = evaluate(ds, params)
    assert metrics["accuracy"] >= 0.90
    assert len(history) == 200


def test_train_rejects_single_class():
    ds = Dataset(np.full((3, 8), 0.5), ("S3", "S3", "S3"), "test")
    with pytest.raises(InvalidInput):
        train(ds, TrainConfig(max_iter=5))


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------

def test_evaluate_constant_predictor():
    row = np.full(8, 0.5)
    params = init_params(11)
    sign = 1.0 if forward(row, params) >= 0 else -1.0
    same, other = ("S3", "MURMUR") if sign > 0 else ("MURMUR", "S3")

    all_same = Dataset(np.tile(row, (4, 1)), (same,) * 4, "test")
    assert evaluate(all_same, params)["accuracy"] == 1.0

    all_other = Dataset(np.tile(row, (4, 1)), (other,) * 4, "test")
    assert evaluate(all_other, params)["accuracy"] == 0.0

    balanced = Dataset(np.tile(row, (8, 1)),
                       ("S3",) * 4 + ("MURMUR",) * 4, "test")
    assert evaluate(balanced, params)["accuracy"] == 0.5


def test_evaluate_confusion_bookkeeping():
    ds = _random_dataset(seed=13, n_per_class=7)
    params = init_params(17)
    m = evaluate(ds, params)
    assert m["tp"] + m["fn"] == ds.class_count("S3")
    assert m["fp"] + m["tn"] == ds.class_count("MURMUR")
    assert m["tp"] + m["fp"] + m["fn"] + m["tn"] == m["n_rows"] == ds.n_rows
    assert m["accuracy"] == (m["tp"] + m["tn"]) / ds.n_rows
    assert m["loss"] == loss(ds, params)


def test_evaluate_confusion_matches_sklearn():
    ds = _random_dataset(seed=19, n_per_class=9)
    params = init_params(23)
    outputs = _forward_dataset(ds.features, params)
    predicted = np.where(outputs >= 0, 1, -1)
    m = evaluate(ds, params)
    ref = confusion_matrix(ds.y, predicted, labels=[1, -1])
    assert [[m["tp"], m["fn"]], [m["fp"], m["tn"]]] == ref.tolist()


def test_evaluate_empty_dataset_impossible():
    with pytest.raises(InvalidInput):
        Dataset(np.empty((0, 8)), (), "test")


# ---------------------------------------------------------------------------
# split_dataset
# ---------------------------------------------------------------------------

def test_split_counts_and_tags():
    rng = np.random.default_rng(29)
    rows = [(rng.random(8), "S3") for _ in range(20)]
    rows += [(rng.random(8), "MURMUR") for _ in range(20)]
    train_set, test_set = split_dataset(rows, test_fraction=0.3, seed=0)
    assert test_set.class_count("S3") == 6
    assert test_set.class_count("MURMUR") == 6
    assert train_set.class_count("S3") == 14
    assert train_set.class_count("MURMUR") == 14
    assert train_set.split == "train"
    assert test_set.split == "test"


def test_split_deterministic_union_disjoint():
    rng = np.random.default_rng(31)
    rows = [(rng.random(8), "S3") for _ in range(9)]
    rows += [(rng.random(8), "MURMUR") for _ in range(7)]

    a_train, a_test = split_dataset(rows, 0.25, seed=5)
    b_train, b_test = split_dataset(rows, 0.25, seed=5)
    assert np.array_equal(a_train.features, b_train.features)
    assert np.array_equal(a_test.features, b_test.features)
    assert a_train.labels == b_train.labels

    def key_set(ds):
        return {(tuple(f), lab) for f, lab in zip(ds.features, ds.labels)}

    all_keys = {(tuple(np.asarray(f, float)), lab) for f, lab in rows}
    assert key_set(a_train) | key_set(a_test) == all_keys
    assert key_set(a_train) & key_set(a_test) == set()
    assert a_train.n_rows + a_test.n_rows == len(rows)

    c_train, _ = split_dataset(rows, 0.25, seed=6)
    assert c_train.labels != a_train.labels or \
        not np.array_equal(c_train.features, a_train.features)


def test_split_small_class_gets_a_row_each_side():
    rows = [(np.full(8, 0.1), "S3"), (np.full(8, 0.2), "S3"),
            (np.full(8, 0.3), "MURMUR"), (np.full(8, 0.4), "MURMUR")]
    train_set, test_set = split_dataset(rows, test_fraction=0.1, seed=1)
    assert train_set.class_count("S3") == 1
    assert test_set.class_count("S3") == 1


def test_split_rejects_bad_input():
    rows = [(np.full(8, 0.5), "S3"), (np.full(8, 0.5), "MURMUR"),
            (np.full(8, 0.5), "MURMUR")]
    with pytest.raises(InvalidInput):
        split_dataset(rows, 0.3, seed=0)  # S3 has a single row
    good = rows + [(np.full(8, 0.5), "S3")]
    with pytest.raises(InvalidInput):
        split_dataset(good, 0.0, seed=0)
    with pytest.raises(InvalidInput):
        split_dataset(good, 1.0, seed=0)
    with pytest.raises(InvalidInput):
        split_dataset([(np.full(8, 0.5), "NOISE")] * 4, 0.5, seed=0)


# ---------------------------------------------------------------------------
# history CSV
# ---------------------------------------------------------------------------

def test_history_roundtrip(tmp_path):
    history = [HistoryRecord(1, 1.2345678901234567, 0.5),
               HistoryRecord(2, 0.9, 0.625),
               HistoryRecord(3, 0.9, 0.625)]
    path = tmp_path / "history.csv"
    write_history(path, history)
    assert path.read_text().splitlines()[0] == HISTORY_HEADER
    assert read_history(path) == history  # exact float round-trip


def test_history_read_rejects_malformed(tmp_path):
    p = tmp_path / "h.csv"
    p.write_text("loss,iter\n")
    with pytest.raises(InvalidInput):
        read_history(p)
    p.write_text(HISTORY_HEADER + "\n1,0.5\n")
    with pytest.raises(InvalidInput):
        read_history(p)
    p.write_text(HISTORY_HEADER + "\n1,0.5,0.5\n1,0.4,0.5\n")
    with pytest.raises(InvalidInput):
        read_history(p)  # iteration not increasing
    p.write_text(HISTORY_HEADER + "\n1,inf,0.5\n")
    with pytest.raises(InvalidInput):
        read_history(p)  # non-finite loss
    p.write_text(HISTORY_HEADER + "\n1,abc,0.5\n")
    with pytest.raises(InvalidInput):
        read_history(p)
