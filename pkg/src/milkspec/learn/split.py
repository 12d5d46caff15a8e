"""Deterministic train/test partitioning and stratified CV folds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from milkspec.errors import DegenerateDataError
from milkspec.learn.rng import SplitMix64


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")


def split_indices(n: int, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Shuffle 0..n-1 (Fisher-Yates on the seeded stream) and cut after
    floor(train_fraction * n). Raises if either side would be empty."""
    if n < 2:
        raise DegenerateDataError("need at least 2 rows to split")
    # the epsilon keeps exact products like 0.7 * 10 from flooring one low
    n_train = int(math.floor(spec.train_fraction * n + 1e-9))
    if n_train == 0 or n_train == n:
        raise DegenerateDataError(
            f"fraction {spec.train_fraction} leaves an empty train or test set for n={n}"
        )
    order = list(range(n))
    SplitMix64(spec.seed).shuffle(order)
    return np.array(order[:n_train]), np.array(order[n_train:])


def train_test_split(X, y, spec: SplitSpec):
    """Convenience wrapper returning (X_train, y_train, X_test, y_test)."""
    X = np.asarray(X)
    y = np.asarray(y)
    train_idx, test_idx = split_indices(X.shape[0], spec)
    return X[train_idx], y[train_idx], X[test_idx], y[test_idx]


def stratified_folds(labels, n_folds: int, seed: int) -> list[np.ndarray]:
    """Fold assignment preserving class proportions.

    Within each class the indices are shuffled on the seeded stream and
    dealt round-robin to the folds; a class smaller than the fold count
    cannot appear in every fold and raises.
    """
    labels = np.asarray(labels)
    if n_folds < 2:
        raise ValueError("need at least 2 folds")
    rng = SplitMix64(seed)
    fold_of = np.empty(labels.size, dtype=int)
    for cls in np.unique(labels):
        members = np.flatnonzero(labels == cls).tolist()
        if len(members) < n_folds:
            raise DegenerateDataError(
                f"class {cls!r} has {len(members)} members, fewer than {n_folds} folds"
            )
        rng.shuffle(members)
        for position, index in enumerate(members):
            fold_of[index] = position % n_folds
    return [np.flatnonzero(fold_of == f) for f in range(n_folds)]
