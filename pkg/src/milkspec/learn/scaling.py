"""Feature standardization with train-set statistics."""

from __future__ import annotations

import numpy as np


class Standardizer:
    """Center/scale by the training mean and population std.

    Zero-variance columns get scale 1 so they map to exact zeros instead of
    dividing by zero. Statistics are computed once at fit time and reused
    verbatim for every later transform.
    """

    def __init__(self):
        self.mean_ = None
        self.scale_ = None

    def fit(self, X) -> "Standardizer":
        X = np.asarray(X, dtype=np.float64)
        self.mean_ = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0.0] = 1.0
        self.scale_ = scale
        return self

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.shape[1] != self.mean_.size:
            raise ValueError(
                f"expected {self.mean_.size} features, got {X.shape[1]}"
            )
        return (X - self.mean_) / self.scale_
