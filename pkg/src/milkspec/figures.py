"""Report figures rendered to deterministic SVG text.

All figures go through matplotlib's SVG backend with a pinned hash salt,
literal (non-outlined) text, and no date metadata, so identical inputs
produce byte-identical SVG — the report bundle hashes depend on it.
"""

from __future__ import annotations

import io

import matplotlib
import numpy as np

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from milkspec.errors import DegenerateDataError
from milkspec.learn.metrics import ClassificationReport
from milkspec.stats.pca import PcaResult

_RC = {
    "svg.fonttype": "none",
    "svg.hashsalt": "milkspec",
    "figure.dpi": 100,
    "font.size": 10,
}

_GROUP_MARKERS = ("o", "s", "^", "D", "v", "P", "X")


def _to_svg(fig, description: str | None = None) -> str:
    buffer = io.StringIO()
    metadata = {"Date": None}
    if description is not None:
        metadata["Description"] = description
    fig.savefig(buffer, format="svg", metadata=metadata, bbox_inches="tight")
    plt.close(fig)
    return buffer.getvalue()


def render_confusion_svg(report: ClassificationReport, title: str = "Confusion matrix") -> str:
    """Heatmap of the (true x predicted) counts with cell annotations."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.8, 4.2))
        image = ax.imshow(report.confusion, cmap="Blues")
        n = len(report.class_names)
        ax.set_xticks(range(n), labels=report.class_names)
        ax.set_yticks(range(n), labels=report.class_names)
        ax.set_xlabel("Predicted")
        ax.set_ylabel("True")
        ax.set_title(title)
        threshold = report.confusion.max() / 2.0
        for i in range(n):
            for j in range(n):
                count = int(report.confusion[i, j])
                color = "white" if count > threshold else "black"
                ax.text(j, i, str(count), ha="center", va="center", color=color)
        fig.colorbar(image, ax=ax, fraction=0.046, pad=0.04)
        return _to_svg(fig)


def render_scatter_svg(
    result: PcaResult,
    labels,
    label_names: dict | None = None,
    title: str = "Principal component scores",
) -> str:
    """PC1 vs PC2 scatter with one glyph per group and explained-variance
    percentages in the axis labels."""
    if result.n_components < 2:
        raise DegenerateDataError("scatter needs at least 2 components")
    labels = np.asarray(labels)
    if labels.size != result.scores.shape[0]:
        raise ValueError("one label per score row required")
    ratios = result.explained_variance_ratio

    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5.6, 4.4))
        for g, value in enumerate(np.unique(labels)):
            mask = labels == value
            name = label_names.get(value, str(value)) if label_names else str(value)
            ax.scatter(
                result.scores[mask, 0],
                result.scores[mask, 1],
                marker=_GROUP_MARKERS[g % len(_GROUP_MARKERS)],
                s=36,
                alpha=0.8,
                label=name,
            )
        ax.set_xlabel(f"PC1 ({ratios[0] * 100:.1f}%)")
        ax.set_ylabel(f"PC2 ({ratios[1] * 100:.1f}%)")
        ax.set_title(title)
        ax.legend()
        ax.grid(True, alpha=0.3)
        return _to_svg(fig)


def render_qq_svg(points, title: str = "Q-Q plot of the residuals") -> str:
    """Normal quantile-quantile scatter plus the identity diagonal.

    The largest vertical deviation from the diagonal is recorded in the SVG
    description metadata.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] != 2 or points.shape[0] < 2:
        raise DegenerateDataError("need at least 2 (theoretical, observed) pairs")
    theoretical = points[:, 0]
    observed = points[:, 1]
    max_deviation = float(np.max(np.abs(observed - theoretical)))

    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(4.8, 4.4))
        lo = float(min(theoretical.min(), observed.min()))
        hi = float(max(theoretical.max(), observed.max()))
        pad = 0.05 * (hi - lo if hi > lo else 1.0)
        ax.plot([lo - pad, hi + pad], [lo - pad, hi + pad], color="gray", linewidth=1.0)
        ax.scatter(theoretical, observed, s=20, alpha=0.8)
        ax.set_xlabel("Theoretical quantiles")
        ax.set_ylabel("Ordered standardized residuals")
        ax.set_title(title)
        ax.grid(True, alpha=0.3)
        return _to_svg(fig, description=f"max vertical deviation from diagonal: {max_deviation!r}")
