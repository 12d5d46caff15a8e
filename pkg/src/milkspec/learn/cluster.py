"""K-means clustering with silhouette scoring and ANOVA cluster validation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from milkspec.errors import DegenerateDataError
from milkspec.learn.rng import SplitMix64
from milkspec.stats.anova import OneWayAnova, anova_oneway

_MAX_LLOYD_ITERATIONS = 300


@dataclass
class ClusterResult:
    assignments: np.ndarray
    centroids: np.ndarray
    inertia: float
    silhouette_mean: float  # NaN for k = 1
    anova_p: float | None = None  # filled by cluster_validate
    n_iterations: int = 0


def _squared_distances(data: np.ndarray, points: np.ndarray) -> np.ndarray:
    """(n, m) squared Euclidean distances between rows of data and points."""
    diff = data[:, None, :] - points[None, :, :]
    return np.sum(diff * diff, axis=2)


def _kmeans_pp_init(data: np.ndarray, k: int, rng: SplitMix64) -> np.ndarray:
    n = data.shape[0]
    centroids = [data[rng.randint(n)]]
    while len(centroids) < k:
        d2 = _squared_distances(data, np.array(centroids)).min(axis=1)
        total = float(d2.sum())
        if total == 0.0:
            # all remaining mass sits on chosen points; take any uncovered row
            centroids.append(data[rng.randint(n)])
            continue
        r = rng.uniform() * total
        idx = int(np.searchsorted(np.cumsum(d2), r, side="right"))
        centroids.append(data[min(idx, n - 1)])
    return np.array(centroids)


def kmeans(data, k: int, seed: int = 0, max_iterations: int = _MAX_LLOYD_ITERATIONS) -> ClusterResult:
    """Lloyd iterations from a k-means++ start until the assignment fixpoint.

    An emptied cluster is reseeded to the point farthest from its assigned
    centroid. The silhouette mean is computed on the final partition (NaN
    when k = 1).
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("data must be (rows, features)")
    distinct = np.unique(data, axis=0).shape[0]
    if k < 1 or k > distinct:
        raise DegenerateDataError(f"k={k} exceeds the {distinct} distinct rows")

    rng = SplitMix64(seed)
    centroids = _kmeans_pp_init(data, k, rng)
    assignments = np.full(data.shape[0], -1, dtype=int)
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        d2 = _squared_distances(data, centroids)
        new_assignments = np.argmin(d2, axis=1)  # distance ties to the lower index

        for cluster in range(k):
            if np.any(new_assignments == cluster):
                continue
            nearest = d2[np.arange(data.shape[0]), new_assignments]
            farthest = int(np.argmax(nearest))
            centroids[cluster] = data[farthest]
            new_assignments[farthest] = cluster

        if np.array_equal(new_assignments, assignments):
            break
        assignments = new_assignments
        for cluster in range(k):
            centroids[cluster] = data[assignments == cluster].mean(axis=0)

    d2 = _squared_distances(data, centroids)
    inertia = float(d2[np.arange(data.shape[0]), assignments].sum())
    score = silhouette(data, assignments) if k >= 2 else math.nan
    return ClusterResult(
        assignments=assignments,
        centroids=centroids,
        inertia=inertia,
        silhouette_mean=score,
        n_iterations=iterations,
    )


def silhouette(data, assignments) -> float:
    """Mean silhouette score (b - a) / max(a, b) over all points.

    Singleton clusters contribute 0 by convention, as does a point whose
    cohesion and separation are both zero (duplicated points). Distances
    are accumulated in row chunks, so pixel-scale inputs never materialize
    an n x n matrix.
    """
    data = np.asarray(data, dtype=np.float64)
    assignments = np.asarray(assignments)
    labels = np.unique(assignments)
    if labels.size < 2:
        raise DegenerateDataError("silhouette needs at least 2 clusters")

    n = data.shape[0]
    label_index = {label: j for j, label in enumerate(labels)}
    member_of = np.array([label_index[a] for a in assignments])
    onehot = np.zeros((n, labels.size))
    onehot[np.arange(n), member_of] = 1.0
    sizes = onehot.sum(axis=0)
    if np.any(sizes == 0):
        raise DegenerateDataError("every cluster must be non-empty")

    chunk = max(1, min(n, (1 << 22) // max(n, 1)))
    scores = np.empty(n)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        block = np.sqrt(_squared_distances(data[start:stop], data))
        cluster_sums = block @ onehot  # (chunk, k) summed distances per cluster
        for i in range(start, stop):
            own = member_of[i]
            own_size = sizes[own]
            if own_size == 1:
                scores[i] = 0.0
                continue
            a = cluster_sums[i - start, own] / (own_size - 1)  # d(i,i) = 0 drops out
            other_means = [
                cluster_sums[i - start, j] / sizes[j] for j in range(labels.size) if j != own
            ]
            b = min(other_means)
            denom = max(a, b)
            scores[i] = 0.0 if denom == 0.0 else (b - a) / denom
    return float(scores.mean())


def cluster_validate(assignments, auxiliary) -> OneWayAnova:
    """One-way ANOVA of an auxiliary variable grouped by cluster label.

    The returned result's ``p_value`` answers whether the clusters differ on
    the auxiliary variable; ``degenerate`` marks a zero within-cluster
    variance (p reported as 0).
    """
    assignments = np.asarray(assignments)
    auxiliary = np.asarray(auxiliary, dtype=np.float64)
    if assignments.size != auxiliary.size:
        raise ValueError("assignments and auxiliary variable must share length")
    labels = np.unique(assignments)
    if labels.size < 2:
        raise DegenerateDataError("cluster validation needs at least 2 clusters")
    groups = [auxiliary[assignments == label] for label in labels]
    if any(g.size < 2 for g in groups):
        raise DegenerateDataError("every cluster must have at least 2 members")
    return anova_oneway(groups)
