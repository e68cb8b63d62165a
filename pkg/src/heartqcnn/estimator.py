"""Scikit-learn style wrappers: a feature transformer and a classifier.

These are thin facades over the functional pipeline so the model slots
into sklearn tooling (``Pipeline``, ``clone``, ``cross_val_score``-style
loops).  ``PcgFeatureExtractor`` maps cardiac-cycle segments to 8-value
feature rows; ``QcnnClassifier`` trains the 60-angle ansatz on such rows.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from .labels import MURMUR, S3
from .pipeline import _check_method, segment_features
from .qcnn import forward_batch, load_model, save_model
from .train import Dataset, TrainConfig, train


class PcgFeatureExtractor(TransformerMixin, BaseEstimator):
    """Transforms a sequence of PcgSegment into an (n, 8) feature matrix.

    Stateless — ``fit`` only validates the method choice.
    """

    def __init__(self, method="wavelet"):
        self.method = method

    def fit(self, X, y=None):
        _check_method(self.method)
        self.n_features_out_ = 8
        return self

    def transform(self, X):
        return np.stack([segment_features(seg, self.method) for seg in X])


class QcnnClassifier(ClassifierMixin, BaseEstimator):
    """8-qubit convolutional ansatz trained with the built-in optimizer.

    Parameters mirror TrainConfig; ``feature_method`` is metadata recorded
    in saved model files so evaluation can refuse mismatched features.
    """

    def __init__(self, max_iter=200, rhobeg=0.01, rhoend=1e-6, seed=0,
                 init_scale=math.pi, feature_method="wavelet"):
        self.max_iter = max_iter
        self.rhobeg = rhobeg
        self.rhoend = rhoend
        self.seed = seed
        self.init_scale = init_scale
        self.feature_method = feature_method

    def fit(self, X, y):
        dataset = Dataset(np.asarray(X, dtype=np.float64),
                          tuple(str(lab) for lab in y), "train")
        cfg = TrainConfig(max_iter=self.max_iter, rhobeg=self.rhobeg,
                          rhoend=self.rhoend, seed=self.seed,
                          init_scale=self.init_scale)
        self.params_, self.history_ = train(dataset, cfg)
        self.classes_ = np.unique(dataset.labels)
        self.n_iter_ = len(self.history_)
        return self

    def _check_fitted(self):
        if not hasattr(self, "params_"):
            raise NotFittedError(
                "this QcnnClassifier instance is not fitted yet")

    def decision_function(self, X):
        """Readout expectation per row; >= 0 means S3."""
        self._check_fitted()
        return forward_batch(np.asarray(X, dtype=np.float64), self.params_)

    def predict(self, X):
        scores = self.decision_function(X)
        return np.where(scores >= 0.0, S3, MURMUR)

    def save(self, path):
        self._check_fitted()
        save_model(path, self.params_, self.feature_method)

    @classmethod
    def load(cls, path):
        doc = load_model(path)
        clf = cls(feature_method=doc["feature_method"])
        clf.params_ = doc["params"]
        clf.classes_ = np.array(sorted((MURMUR, S3)))
        clf.history_ = []
        clf.n_iter_ = 0
        return clf
