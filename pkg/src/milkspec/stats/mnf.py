"""Minimum noise fraction transform for hyperspectral regions.

Noise is estimated from first differences between spatially adjacent
pixels (the canonical shift-difference estimator), the data covariance is
whitened by the inverse symmetric square root of the noise covariance, and
the whitened covariance is eigendecomposed. Components come out ordered by
decreasing signal-to-noise eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from milkspec.errors import DegenerateDataError
from milkspec.stats.eigen import sym_eigen
from milkspec.stats.pca import fix_component_signs

_REG_EPS = 1e-10


@dataclass(frozen=True)
class MnfResult:
    components: np.ndarray  # (bands, n_components) transform vectors
    snr_eigenvalues: np.ndarray  # full spectrum, descending
    noise_covariance: np.ndarray  # after regularization
    scores: np.ndarray  # (pixels, n_components)
    mean: np.ndarray


def estimate_noise_covariance(roi: np.ndarray, axis: str = "horizontal") -> np.ndarray:
    """Shift-difference noise covariance cov(d)/2 over a (rows, cols, bands)
    ROI; ``axis`` selects horizontal (column) or vertical (row) differencing."""
    roi = np.asarray(roi, dtype=np.float64)
    if roi.ndim != 3:
        raise ValueError("ROI must be (rows, cols, bands)")
    if axis == "horizontal":
        if roi.shape[1] < 2:
            raise DegenerateDataError("ROI has a single column; no horizontal shift pairs")
        diffs = roi[:, :-1, :] - roi[:, 1:, :]
    elif axis == "vertical":
        if roi.shape[0] < 2:
            raise DegenerateDataError("ROI has a single row; no vertical shift pairs")
        diffs = roi[:-1, :, :] - roi[1:, :, :]
    else:
        raise ValueError(f"unknown noise axis {axis!r}")
    flat = diffs.reshape(-1, roi.shape[2])
    if flat.shape[0] < 2:
        raise DegenerateDataError("not enough shift pairs for a covariance")
    centered = flat - flat.mean(axis=0)
    return centered.T @ centered / (flat.shape[0] - 1) / 2.0


def _regularize(noise_cov: np.ndarray, eps: float) -> np.ndarray:
    bands = noise_cov.shape[0]
    trace = float(np.trace(noise_cov))
    # a zero trace (constant ROI) would make the relative ridge vanish too;
    # fall back to an absolute floor so the whitening stays defined
    ridge = eps * (trace / bands) if trace > 0.0 else eps
    return noise_cov + ridge * np.eye(bands)


def mnf(
    roi,
    n_components: int | None = None,
    noise_covariance: np.ndarray | None = None,
    noise_axis: str = "horizontal",
    ridge_eps: float = _REG_EPS,
) -> MnfResult:
    """Noise-whitened principal components of a (rows, cols, bands) ROI.

    ``noise_covariance`` overrides the shift-difference estimate; it is
    regularized the same way (ridge eps * trace / bands). Passing the
    identity reduces the transform to plain PCA up to the ridge term.
    """
    roi = np.asarray(roi, dtype=np.float64)
    if roi.ndim != 3:
        raise ValueError("ROI must be (rows, cols, bands)")
    rows, cols, bands = roi.shape
    n_pixels = rows * cols
    if n_pixels < bands + 1:
        raise DegenerateDataError(
            f"need at least bands+1 pixels ({bands + 1}), got {n_pixels}"
        )
    if n_components is None:
        n_components = bands
    if not 1 <= n_components <= bands:
        raise ValueError(f"n_components must be in [1, {bands}]")

    if noise_covariance is None:
        noise_covariance = estimate_noise_covariance(roi, noise_axis)
    else:
        noise_covariance = np.asarray(noise_covariance, dtype=np.float64)
        if noise_covariance.shape != (bands, bands):
            raise ValueError("noise covariance shape must be (bands, bands)")
    noise_covariance = _regularize(noise_covariance, ridge_eps)

    X = roi.reshape(n_pixels, bands)
    mean = X.mean(axis=0)
    centered = X - mean
    data_cov = centered.T @ centered / (n_pixels - 1)

    noise_eigen = sym_eigen(noise_covariance)
    noise_values = np.clip(noise_eigen.eigenvalues, 0.0, None)
    if noise_values.min() <= 0.0:
        raise DegenerateDataError("noise covariance is singular after regularization")
    inv_sqrt = (
        noise_eigen.eigenvectors
        @ np.diag(1.0 / np.sqrt(noise_values))
        @ noise_eigen.eigenvectors.T
    )

    whitened_cov = inv_sqrt @ data_cov @ inv_sqrt
    whitened_cov = 0.5 * (whitened_cov + whitened_cov.T)  # kill rounding asymmetry
    snr_eigen = sym_eigen(whitened_cov)
    snr_values = np.clip(snr_eigen.eigenvalues, 0.0, None)

    components = fix_component_signs(inv_sqrt @ snr_eigen.eigenvectors[:, :n_components])
    scores = centered @ components
    return MnfResult(
        components=components,
        snr_eigenvalues=snr_values,
        noise_covariance=noise_covariance,
        scores=scores,
        mean=mean,
    )
