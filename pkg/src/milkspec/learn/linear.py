"""Linear support vector machine trained with the Pegasos schedule."""

from __future__ import annotations

import numpy as np

from milkspec.errors import DegenerateDataError
from milkspec.learn.rng import SplitMix64
from milkspec.learn.scaling import Standardizer


def _pegasos(X, signs, lam, epochs, rng: SplitMix64):
    """Hinge-loss subgradient descent with step size 1/(lam*t).

    The bias is carried as a constant-1 feature inside the weight vector, so
    the decay schedule governs it too; an unregularized bias would be flung
    far out by the huge early steps and never recover.
    """
    n, p = X.shape
    w = np.zeros(p + 1)
    ones = np.empty(p + 1)
    t = 0
    for _ in range(epochs):
        for _ in range(n):
            t += 1
            i = rng.randint(n)
            eta = 1.0 / (lam * t)
            ones[:p] = X[i]
            ones[p] = 1.0
            margin = signs[i] * float(ones @ w)
            w *= 1.0 - eta * lam
            if margin < 1.0:
                w += eta * signs[i] * ones
    return w[:p], float(w[p])


class LinearSvmClassifier:
    """Binary or one-vs-rest multiclass linear SVM on standardized features."""

    def __init__(self, lam: float = 0.01, epochs: int = 200, seed: int = 0):
        if lam <= 0:
            raise ValueError("lam must be > 0")
        if epochs < 1:
            raise ValueError("epochs must be >= 1")
        self.lam = lam
        self.epochs = epochs
        self.seed = seed
        self.classes_ = None
        self._scaler = None
        self._weights = None  # (n_machines, p)
        self._biases = None

    def fit(self, X, y) -> "LinearSvmClassifier":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        if X.shape[0] == 0:
            raise DegenerateDataError("empty training set")
        self.classes_ = np.unique(y)
        if self.classes_.size < 2:
            raise DegenerateDataError("training set has a single class")
        self._scaler = Standardizer().fit(X)
        Xs = self._scaler.transform(X)

        seeder = SplitMix64(self.seed)
        if self.classes_.size == 2:
            signs = np.where(y == self.classes_[1], 1.0, -1.0)
            w, b = _pegasos(Xs, signs, self.lam, self.epochs, SplitMix64(seeder.spawn_seed()))
            self._weights = w[None, :]
            self._biases = np.array([b])
        else:
            machines = []
            biases = []
            for cls in self.classes_:
                signs = np.where(y == cls, 1.0, -1.0)
                w, b = _pegasos(Xs, signs, self.lam, self.epochs, SplitMix64(seeder.spawn_seed()))
                machines.append(w)
                biases.append(b)
            self._weights = np.vstack(machines)
            self._biases = np.array(biases)
        return self

    def decision_function(self, X) -> np.ndarray:
        Xs = self._scaler.transform(np.asarray(X, dtype=np.float64))
        return Xs @ self._weights.T + self._biases

    def predict(self, X) -> np.ndarray:
        scores = self.decision_function(X)
        if self.classes_.size == 2:
            return self.classes_[(scores[:, 0] > 0.0).astype(int)]
        # argmax takes the first maximum, i.e. margin ties go to the lowest class id
        return self.classes_[np.argmax(scores, axis=1)]
