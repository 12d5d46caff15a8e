"""Feed-forward perceptron: two rectifier hidden layers and a sigmoid (or
softmax) output, trained by plain full-batch gradient descent."""

from __future__ import annotations

import numpy as np

from milkspec.errors import DegenerateDataError
from milkspec.learn.rng import SplitMix64
from milkspec.learn.scaling import Standardizer

_CLIP = 1e-12  # probability floor inside the cross-entropy


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=1, keepdims=True)
    ez = np.exp(shifted)
    return ez / ez.sum(axis=1, keepdims=True)


class MlpClassifier:
    """Fully connected classifier with hidden layers (64, 32) by default.

    Binary targets use a single sigmoid output unit; more than two classes
    switch the head to softmax. The loss is cross-entropy and every epoch
    performs one full-batch gradient step.
    """

    def __init__(
        self,
        hidden: tuple[int, ...] = (64, 32),
        epochs: int = 3,
        learning_rate: float = 0.5,
        seed: int = 0,
    ):
        if epochs < 1:
            raise ValueError("epochs must be >= 1")
        if learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if not hidden or any(h < 1 for h in hidden):
            raise ValueError("hidden layer sizes must be >= 1")
        self.hidden = tuple(hidden)
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.seed = seed
        self.classes_ = None
        self.params: list[np.ndarray] = []
        self._scaler = None

    # -- parameter handling -------------------------------------------------

    def _init_params(self, n_features: int, n_outputs: int) -> None:
        rng = SplitMix64(self.seed)
        sizes = (n_features, *self.hidden, n_outputs)
        self.params = []
        for fan_in, fan_out in zip(sizes, sizes[1:]):
            scale = np.sqrt(2.0 / fan_in)
            w = np.array(
                [[rng.normal() for _ in range(fan_out)] for _ in range(fan_in)]
            ) * scale
            self.params.append(w)
            self.params.append(np.zeros(fan_out))

    def _forward(self, Xs: np.ndarray):
        """Returns (activations per layer, output probabilities)."""
        activations = [Xs]
        a = Xs
        n_layers = len(self.params) // 2
        for layer in range(n_layers):
            w, b = self.params[2 * layer], self.params[2 * layer + 1]
            z = a @ w + b
            if layer < n_layers - 1:
                a = np.maximum(z, 0.0)
                activations.append(a)
            else:
                probs = _sigmoid(z) if self._binary else _softmax(z)
        return activations, probs

    def _target_matrix(self, labels: np.ndarray) -> np.ndarray:
        if self._binary:
            return (labels == 1).astype(np.float64)[:, None]
        onehot = np.zeros((labels.size, self.classes_.size))
        onehot[np.arange(labels.size), labels] = 1.0
        return onehot

    @property
    def _binary(self) -> bool:
        return self.classes_.size == 2

    # -- training -----------------------------------------------------------

    def fit(self, X, y) -> "MlpClassifier":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        if X.shape[0] == 0:
            raise DegenerateDataError("empty training set")
        self.classes_ = np.unique(y)
        if self.classes_.size < 2:
            raise DegenerateDataError("training set has a single class")
        self._scaler = Standardizer().fit(X)
        Xs = self._scaler.transform(X)
        labels = np.searchsorted(self.classes_, y)
        self._init_params(X.shape[1], 1 if self._binary else self.classes_.size)
        for _ in range(self.epochs):
            grads = self._gradients(Xs, labels)
            for param, grad in zip(self.params, grads):
                param -= self.learning_rate * grad
        return self

    def _gradients(self, Xs: np.ndarray, labels: np.ndarray) -> list[np.ndarray]:
        activations, probs = self._forward(Xs)
        target = self._target_matrix(labels)
        n = Xs.shape[0]
        delta = (probs - target) / n  # dL/dz of the output layer
        grads: list[np.ndarray] = []
        n_layers = len(self.params) // 2
        for layer in range(n_layers - 1, -1, -1):
            a_prev = activations[layer]
            grads.insert(0, delta.sum(axis=0))  # bias
            grads.insert(0, a_prev.T @ delta)  # weights
            if layer > 0:
                w = self.params[2 * layer]
                delta = (delta @ w.T) * (activations[layer] > 0.0)
        return grads

    def loss(self, X, y) -> float:
        """Mean cross-entropy; exposed for the gradient checks."""
        Xs = self._scaler.transform(np.asarray(X, dtype=np.float64))
        labels = np.searchsorted(self.classes_, np.asarray(y))
        _, probs = self._forward(Xs)
        target = self._target_matrix(labels)
        probs = np.clip(probs, _CLIP, 1.0 - _CLIP)
        if self._binary:
            per_row = -(target * np.log(probs) + (1.0 - target) * np.log(1.0 - probs))
        else:
            per_row = -(target * np.log(probs)).sum(axis=1, keepdims=True)
        return float(per_row.sum()) / Xs.shape[0]

    def predict(self, X) -> np.ndarray:
        Xs = self._scaler.transform(np.asarray(X, dtype=np.float64))
        _, probs = self._forward(Xs)
        if self._binary:
            return self.classes_[(probs[:, 0] > 0.5).astype(int)]
        return self.classes_[np.argmax(probs, axis=1)]


def mlp_gradient(model: MlpClassifier, X, y) -> list[np.ndarray]:
    """Backpropagated cross-entropy gradients for a batch, in parameter
    order (W1, b1, W2, b2, ..., Wout, bout)."""
    if not model.params:
        raise DegenerateDataError("model has no parameters; fit or initialize it first")
    Xs = model._scaler.transform(np.asarray(X, dtype=np.float64))
    labels = np.searchsorted(model.classes_, np.asarray(y))
    return model._gradients(Xs, labels)
