"""Visible-image descriptors for milk sample patches.

A patch is the 512x512 square cut from the center of each sample photo.
The descriptor concatenates per-channel first-order statistics, four
co-occurrence texture properties, and four selected bins of the
concatenated per-channel color histogram.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from milkspec.errors import DataFormatError, DegenerateDataError

# Luminance weights for the default texture plane.
_LUMA = (0.299, 0.587, 0.114)

# Indices into the 768-bin concatenated RGB histogram (256 bins per channel,
# channel 1 occupies 256..511). All four selected bins fall in that block.
HISTOGRAM_BINS = (293, 301, 365, 366)

FEATURE_NAMES = (
    "Mean color channel 0",
    "Mean color channel 1",
    "Mean color channel 2",
    "Std color channel 0",
    "Std color channel 1",
    "Std color channel 2",
    "Texture contrast",
    "Texture energy",
    "Texture correlation",
    "Texture homogeneity",
    "Histogram bin 293",
    "Histogram bin 301",
    "Histogram bin 365",
    "Histogram bin 366",
)


@dataclass(frozen=True)
class RgbPatch:
    """An 8-bit RGB patch stored as a (height, width, 3) uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise DataFormatError("patch must be (height, width, 3)")
        if self.pixels.dtype != np.uint8:
            raise DataFormatError("patch must be 8-bit")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    def channel(self, index: int) -> np.ndarray:
        return self.pixels[:, :, index]


@dataclass(frozen=True)
class Glcm:
    """Symmetric normalized gray-level co-occurrence matrix."""

    levels: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.matrix.shape != (self.levels, self.levels):
            raise DataFormatError("GLCM shape does not match level count")


@dataclass(frozen=True)
class GlcmConfig:
    levels: int = 8
    offset: tuple[int, int] = (0, 1)
    plane: str = "luminance"  # or "channel0" / "channel1" / "channel2"


@dataclass(frozen=True)
class ImageFeatureVector:
    mean_c0: float
    mean_c1: float
    mean_c2: float
    std_c0: float
    std_c1: float
    std_c2: float
    glcm_contrast: float
    glcm_energy: float
    glcm_correlation: float
    glcm_homogeneity: float
    hist_bin_293: float
    hist_bin_301: float
    hist_bin_365: float
    hist_bin_366: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [
                self.mean_c0, self.mean_c1, self.mean_c2,
                self.std_c0, self.std_c1, self.std_c2,
                self.glcm_contrast, self.glcm_energy,
                self.glcm_correlation, self.glcm_homogeneity,
                self.hist_bin_293, self.hist_bin_301,
                self.hist_bin_365, self.hist_bin_366,
            ]
        )


def load_patch(path: str) -> RgbPatch:
    """Load an 8-bit RGB raster (PPM at minimum; anything Pillow decodes)."""
    try:
        with Image.open(path) as img:
            rgb = img.convert("RGB")
            pixels = np.asarray(rgb, dtype=np.uint8)
    except (OSError, ValueError) as exc:
        raise DataFormatError(f"cannot read image {path}: {exc}") from exc
    return RgbPatch(pixels)


def channel_stats(patch: RgbPatch) -> list[tuple[float, float]]:
    """Per-channel (mean, population std) with intensities rescaled to [0,1]."""
    stats = []
    for c in range(3):
        plane = patch.channel(c).astype(np.float64)
        stats.append((float(plane.mean()) / 255.0, float(plane.std()) / 255.0))
    return stats


def luminance_plane(patch: RgbPatch) -> np.ndarray:
    """Float luminance plane 0.299 R + 0.587 G + 0.114 B, still on [0, 255]."""
    pixels = patch.pixels.astype(np.float64)
    return _LUMA[0] * pixels[:, :, 0] + _LUMA[1] * pixels[:, :, 1] + _LUMA[2] * pixels[:, :, 2]


def quantize_plane(plane: np.ndarray, levels: int) -> np.ndarray:
    """Equal-width quantization of [0, 255] intensities into ``levels`` bins."""
    if levels < 2:
        raise DataFormatError("levels must be >= 2")
    q = np.floor(np.asarray(plane, dtype=np.float64) * levels / 256.0).astype(np.intp)
    return np.clip(q, 0, levels - 1)


def compute_glcm(plane: np.ndarray, levels: int = 8, offset: tuple[int, int] = (0, 1)) -> Glcm:
    """Symmetric co-occurrence matrix of a single intensity plane.

    Intensities are quantized to ``levels`` equal-width bins over [0, 255];
    pairs are accumulated for ``offset`` and its reverse (so the matrix is
    symmetric by construction) and normalized to sum to one. Counts are
    accumulated in integers, so accumulation order cannot perturb the result.
    """
    drow, dcol = offset
    if drow == 0 and dcol == 0:
        raise DataFormatError("offset must be nonzero")
    plane = np.asarray(plane)
    rows, cols = plane.shape
    if abs(drow) >= rows or abs(dcol) >= cols:
        raise DataFormatError(f"plane {plane.shape} is smaller than offset {offset}")

    q = quantize_plane(plane, levels)
    r0, r1 = max(0, -drow), min(rows, rows - drow)
    c0, c1 = max(0, -dcol), min(cols, cols - dcol)
    a = q[r0:r1, c0:c1].ravel()
    b = q[r0 + drow : r1 + drow, c0 + dcol : c1 + dcol].ravel()

    counts = np.bincount(a * levels + b, minlength=levels * levels).reshape(levels, levels)
    counts = counts + counts.T  # symmetric accumulation: offset plus reverse
    total = counts.sum()
    return Glcm(levels=levels, matrix=counts.astype(np.float64) / total)


def glcm_props(g: Glcm) -> tuple[float, float, float, float]:
    """(contrast, energy, correlation, homogeneity) of a normalized GLCM.

    Energy is the square root of the angular second moment. Correlation of a
    zero-variance matrix (constant texture) is defined as 1.
    """
    p = g.matrix
    idx = np.arange(g.levels, dtype=np.float64)
    i = idx[:, None]
    j = idx[None, :]

    contrast = float(np.sum(p * (i - j) ** 2))
    energy = float(np.sqrt(np.sum(p * p)))
    homogeneity = float(np.sum(p / (1.0 + np.abs(i - j))))

    mu_i = float(np.sum(p * i))
    mu_j = float(np.sum(p * j))
    var_i = float(np.sum(p * (i - mu_i) ** 2))
    var_j = float(np.sum(p * (j - mu_j) ** 2))
    denom = np.sqrt(var_i * var_j)
    if denom == 0.0:
        correlation = 1.0
    else:
        correlation = float(np.sum(p * (i - mu_i) * (j - mu_j)) / denom)
    return contrast, energy, correlation, homogeneity


def concat_histogram(patch: RgbPatch) -> np.ndarray:
    """768-bin concatenated RGB histogram, each channel normalized to sum 1.

    Bin index arithmetic is ``256 * channel + intensity``; channel 0 fills
    bins 0..255, channel 1 bins 256..511, channel 2 bins 512..767.
    """
    out = np.empty(768, dtype=np.float64)
    n = patch.height * patch.width
    for c in range(3):
        counts = np.bincount(patch.channel(c).ravel(), minlength=256)
        out[256 * c : 256 * (c + 1)] = counts / n
    return out


def _texture_plane(patch: RgbPatch, config: GlcmConfig) -> np.ndarray:
    if config.plane == "luminance":
        return luminance_plane(patch)
    if config.plane in ("channel0", "channel1", "channel2"):
        return patch.channel(int(config.plane[-1])).astype(np.float64)
    raise DataFormatError(f"unknown GLCM plane {config.plane!r}")


def extract_feature_vector(patch: RgbPatch, config: GlcmConfig = GlcmConfig()) -> ImageFeatureVector:
    """The full per-patch descriptor in canonical field order."""
    stats = channel_stats(patch)
    glcm = compute_glcm(_texture_plane(patch, config), config.levels, config.offset)
    contrast, energy, correlation, homogeneity = glcm_props(glcm)
    hist = concat_histogram(patch)
    return ImageFeatureVector(
        mean_c0=stats[0][0],
        mean_c1=stats[1][0],
        mean_c2=stats[2][0],
        std_c0=stats[0][1],
        std_c1=stats[1][1],
        std_c2=stats[2][1],
        glcm_contrast=contrast,
        glcm_energy=energy,
        glcm_correlation=correlation,
        glcm_homogeneity=homogeneity,
        hist_bin_293=float(hist[HISTOGRAM_BINS[0]]),
        hist_bin_301=float(hist[HISTOGRAM_BINS[1]]),
        hist_bin_365=float(hist[HISTOGRAM_BINS[2]]),
        hist_bin_366=float(hist[HISTOGRAM_BINS[3]]),
    )


def snv_normalize(spectrum) -> np.ndarray:
    """Standard normal variate: center and scale a spectrum to mean 0, sd 1.

    Uses the sample sd (ddof=1); a constant spectrum has no scale and raises.
    """
    spectrum = np.asarray(spectrum, dtype=np.float64)
    if spectrum.size < 2:
        raise DegenerateDataError("spectrum must have at least 2 points")
    sd = spectrum.std(ddof=1)
    if sd == 0.0:
        raise DegenerateDataError("zero-variance spectrum cannot be normalized")
    return (spectrum - spectrum.mean()) / sd
