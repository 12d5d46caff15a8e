"""Unsupervised spectral segmentation: MNF denoising, PCA reduction,
k-means clustering, silhouette scoring, and ANOVA validation against an
auxiliary variable."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from milkspec.learn.cluster import ClusterResult, cluster_validate, kmeans
from milkspec.stats.anova import OneWayAnova
from milkspec.stats.mnf import MnfResult, mnf
from milkspec.stats.pca import PcaResult, pca


@dataclass(frozen=True)
class SpectralClusterResult:
    mnf: MnfResult
    pca: PcaResult
    clusters: ClusterResult
    anova: OneWayAnova | None

    @property
    def silhouette_mean(self) -> float:
        return self.clusters.silhouette_mean

    @property
    def anova_p(self) -> float | None:
        return None if self.anova is None else self.anova.p_value


def spectral_cluster_pipeline(
    roi,
    mnf_components: int,
    pca_components: int,
    k: int,
    seed: int,
    noise_covariance: np.ndarray | None = None,
    auxiliary=None,
) -> SpectralClusterResult:
    """Run the full reduction/clustering chain on a (rows, cols, bands) ROI.

    The MNF scores are reduced again by PCA, k-means groups the reduced
    pixels, and, when ``auxiliary`` carries one value per pixel, a one-way
    ANOVA between the clusters checks that the grouping tracks it. Fixing
    the seed fixes every stochastic choice, so reruns are bit-identical.
    """
    mnf_result = mnf(roi, n_components=mnf_components, noise_covariance=noise_covariance)
    pca_result = pca(mnf_result.scores, n_components=pca_components)
    cluster_result = kmeans(pca_result.scores, k=k, seed=seed)

    anova = None
    if auxiliary is not None:
        anova = cluster_validate(cluster_result.assignments, auxiliary)
        cluster_result.anova_p = anova.p_value

    return SpectralClusterResult(
        mnf=mnf_result,
        pca=pca_result,
        clusters=cluster_result,
        anova=anova,
    )
