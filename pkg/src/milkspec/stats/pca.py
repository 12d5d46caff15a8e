"""Principal component analysis on the sample covariance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from milkspec.errors import DegenerateDataError
from milkspec.stats.eigen import sym_eigen


@dataclass(frozen=True)
class PcaResult:
    """Scores and loadings for the requested components.

    ``explained_variance_ratio`` covers the full eigenvalue spectrum (it
    sums to one); ``scores``/``loadings`` are truncated to ``n_components``.
    """

    scores: np.ndarray  # (samples, n_components)
    loadings: np.ndarray  # (features, n_components), orthonormal columns
    explained_variance_ratio: np.ndarray
    eigenvalues: np.ndarray
    mean: np.ndarray

    @property
    def n_components(self) -> int:
        return self.loadings.shape[1]


def fix_component_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive."""
    vectors = vectors.copy()
    for j in range(vectors.shape[1]):
        pivot = int(np.argmax(np.abs(vectors[:, j])))
        if vectors[pivot, j] < 0:
            vectors[:, j] = -vectors[:, j]
    return vectors


def pca(data, n_components: int | None = None) -> PcaResult:
    """Column-center the data and eigendecompose its covariance (divisor n-1).

    The sign convention makes the largest-magnitude loading entry of each
    component positive, so results are reproducible across runs.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("data must be (samples, features)")
    n, p = data.shape
    if n < 2:
        raise DegenerateDataError("PCA requires at least 2 samples")
    if n_components is None:
        n_components = min(n - 1, p)
    if not 1 <= n_components <= min(n - 1, p):
        raise ValueError(f"n_components must be in [1, {min(n - 1, p)}]")

    mean = data.mean(axis=0)
    centered = data - mean
    covariance = centered.T @ centered / (n - 1)
    decomposition = sym_eigen(covariance)

    eigenvalues = np.clip(decomposition.eigenvalues, 0.0, None)
    total = eigenvalues.sum()
    if total == 0.0:
        raise DegenerateDataError("data have zero variance")
    ratios = eigenvalues / total

    loadings = fix_component_signs(decomposition.eigenvectors[:, :n_components])
    scores = centered @ loadings
    return PcaResult(
        scores=scores,
        loadings=loadings,
        explained_variance_ratio=ratios,
        eigenvalues=eigenvalues,
        mean=mean,
    )
