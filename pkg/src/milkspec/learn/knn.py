"""k-nearest-neighbor classification with fully specified tie-breaking."""

from __future__ import annotations

import numpy as np

from milkspec.errors import DegenerateDataError
from milkspec.learn.scaling import Standardizer


class KnnClassifier:
    """Euclidean majority vote on standardized features.

    Distance ties are broken by the lower training-row index and vote ties
    by the lower class id, so predictions are reproducible everywhere.
    """

    def __init__(self, k: int = 5):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k
        self.classes_ = None
        self._scaler = None
        self._train = None
        self._labels = None

    def fit(self, X, y) -> "KnnClassifier":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        if X.shape[0] == 0:
            raise DegenerateDataError("empty training set")
        if self.k > X.shape[0]:
            raise DegenerateDataError(f"k={self.k} exceeds {X.shape[0]} training rows")
        self.classes_ = np.unique(y)
        self._scaler = Standardizer().fit(X)
        self._train = self._scaler.transform(X)
        self._labels = np.searchsorted(self.classes_, y)
        return self

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        Xs = self._scaler.transform(X)
        n_classes = self.classes_.size
        out = np.empty(Xs.shape[0], dtype=int)
        row_index = np.arange(self._train.shape[0])
        for i, point in enumerate(Xs):
            d2 = np.sum((self._train - point) ** 2, axis=1)
            # primary key distance, secondary key training-row index
            order = np.lexsort((row_index, d2))
            votes = np.bincount(self._labels[order[: self.k]], minlength=n_classes)
            out[i] = int(np.argmax(votes))  # argmax resolves vote ties downward
        return self.classes_[out]
