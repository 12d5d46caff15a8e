"""CART decision trees and bootstrapped random forests.

Splits minimize the children's weighted Gini impurity with a deterministic
tie policy: equal-impurity candidates resolve to the lowest feature index,
then the lowest threshold. Samples with feature value <= threshold go left.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from milkspec.errors import DegenerateDataError
from milkspec.learn.rng import SplitMix64


@dataclass
class _Node:
    feature: int = -1
    threshold: float = 0.0
    left: "_Node | None" = None
    right: "_Node | None" = None
    label: int = -1  # class index at a leaf

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0


def _majority(labels: np.ndarray, n_classes: int) -> int:
    return int(np.argmax(np.bincount(labels, minlength=n_classes)))


def _best_split(X, labels, n_classes, feature_indices, min_leaf):
    """Scan candidate thresholds of each feature; returns
    (feature, threshold) or None when no valid split exists."""
    n = labels.size
    best = None
    best_impurity = np.inf
    counts_template = np.zeros((n, n_classes))
    counts_template[np.arange(n), labels] = 1.0
    sizes_left = np.arange(1, n, dtype=np.float64)
    sizes_right = n - sizes_left

    for f in feature_indices:  # ascending order backs the tie policy
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        prefix = np.cumsum(counts_template[order], axis=0)
        left_counts = prefix[:-1]
        right_counts = prefix[-1][None, :] - left_counts

        gini_left = 1.0 - np.sum((left_counts / sizes_left[:, None]) ** 2, axis=1)
        gini_right = 1.0 - np.sum((right_counts / sizes_right[:, None]) ** 2, axis=1)
        weighted = (sizes_left * gini_left + sizes_right * gini_right) / n

        valid = (xs[1:] > xs[:-1]) & (sizes_left >= min_leaf) & (sizes_right >= min_leaf)
        if not valid.any():
            continue
        weighted = np.where(valid, weighted, np.inf)
        i = int(np.argmin(weighted))  # first minimum = lowest threshold
        if weighted[i] < best_impurity:
            best_impurity = float(weighted[i])
            best = (int(f), float(0.5 * (xs[i] + xs[i + 1])))
    return best


class DecisionTreeClassifier:
    def __init__(self, max_depth: int | None = None, min_leaf: int = 1):
        if min_leaf < 1:
            raise ValueError("min_leaf must be >= 1")
        if max_depth is not None and max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.classes_ = None
        self._root = None
        self._feature_sampler = None  # injected by the forest

    def fit(self, X, y) -> "DecisionTreeClassifier":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        if X.shape[0] == 0:
            raise DegenerateDataError("empty training set")
        self.classes_ = np.unique(y)
        labels = np.searchsorted(self.classes_, y)
        self._root = self._grow(X, labels, depth=0)
        return self

    def _candidate_features(self, n_features: int) -> np.ndarray:
        if self._feature_sampler is None:
            return np.arange(n_features)
        return self._feature_sampler(n_features)

    def _grow(self, X, labels, depth) -> _Node:
        n_classes = self.classes_.size
        pure = np.all(labels == labels[0])
        depth_capped = self.max_depth is not None and depth >= self.max_depth
        if pure or depth_capped or labels.size < 2 * self.min_leaf:
            return _Node(label=_majority(labels, n_classes))

        split = _best_split(
            X, labels, n_classes, self._candidate_features(X.shape[1]), self.min_leaf
        )
        if split is None:
            return _Node(label=_majority(labels, n_classes))
        feature, threshold = split
        go_left = X[:, feature] <= threshold
        return _Node(
            feature=feature,
            threshold=threshold,
            left=self._grow(X[go_left], labels[go_left], depth + 1),
            right=self._grow(X[~go_left], labels[~go_left], depth + 1),
        )

    def _predict_index(self, row) -> int:
        node = self._root
        while not node.is_leaf:
            node = node.left if row[node.feature] <= node.threshold else node.right
        return node.label

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return self.classes_[[self._predict_index(row) for row in X]]


class RandomForestClassifier:
    """Bootstrap-aggregated CART trees with per-split feature subsampling.

    Each tree consumes a child seed derived from the forest seed, so the
    ensemble is reproducible and trees could be fit concurrently without
    changing the result. ``features_per_split`` defaults to sqrt(p).
    """

    def __init__(
        self,
        n_trees: int = 100,
        max_depth: int | None = None,
        min_leaf: int = 1,
        features_per_split: int | None = None,
        seed: int = 0,
        bootstrap: bool = True,
    ):
        if n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.features_per_split = features_per_split
        self.seed = seed
        self.bootstrap = bootstrap
        self.classes_ = None
        self._trees: list[DecisionTreeClassifier] = []

    def fit(self, X, y) -> "RandomForestClassifier":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        if X.shape[0] == 0:
            raise DegenerateDataError("empty training set")
        self.classes_ = np.unique(y)
        n, p = X.shape
        k = self.features_per_split
        if k is None:
            k = max(1, int(np.sqrt(p)))
        if not 1 <= k <= p:
            raise ValueError(f"features_per_split must be in [1, {p}]")

        seeder = SplitMix64(self.seed)
        tree_seeds = [seeder.spawn_seed() for _ in range(self.n_trees)]

        self._trees = []
        for tree_seed in tree_seeds:
            rng = SplitMix64(tree_seed)
            if self.bootstrap:
                rows = np.array([rng.randint(n) for _ in range(n)])
            else:
                rows = np.arange(n)
            tree = DecisionTreeClassifier(max_depth=self.max_depth, min_leaf=self.min_leaf)
            if k < p:
                tree._feature_sampler = _make_feature_sampler(rng, k)
            tree.classes_ = self.classes_
            labels = np.searchsorted(self.classes_, y[rows])
            tree._root = tree._grow(X[rows], labels, depth=0)
            self._trees.append(tree)
        return self

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        n_classes = self.classes_.size
        votes = np.zeros((X.shape[0], n_classes), dtype=int)
        for tree in self._trees:
            for i, row in enumerate(X):
                votes[i, tree._predict_index(row)] += 1
        return self.classes_[np.argmax(votes, axis=1)]  # vote ties to lower class id


def _make_feature_sampler(rng: SplitMix64, k: int):
    def sampler(n_features: int) -> np.ndarray:
        pool = list(range(n_features))
        # partial Fisher-Yates: first k entries are a uniform subset
        for i in range(k):
            j = i + rng.randint(n_features - i)
            pool[i], pool[j] = pool[j], pool[i]
        return np.array(sorted(pool[:k]))

    return sampler
