"""Pearson, Spearman and Kendall correlations with p-values, plus the
per-band significance scan used on hyperspectral spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from milkspec.errors import DegenerateDataError
from milkspec.stats.distributions import normal_sf, t_sf

_COLLINEAR_EPS = 1e-15


@dataclass(frozen=True)
class CorrelationResult:
    method: str
    coefficient: float
    p_value: float
    n: int


def _midranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties replaced by the mean of their rank range."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.float64)
    sorted_values = values[order]
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_values[j + 1] == sorted_values[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _pearson(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    n = x.size
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateDataError("zero variance input to correlation")
    r = float(xc @ yc) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if 1.0 - abs(r) < _COLLINEAR_EPS:
        return math.copysign(1.0, r), 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    p = 2.0 * t_sf(abs(t), n - 2)
    return r, min(1.0, p)


def _kendall_exact_p(n: int, s: int) -> float:
    """Two-sided exact p-value for tie-free Kendall S via the classical
    inversion-count recurrence (number of permutations with k discordant
    pairs)."""
    n0 = n * (n - 1) // 2
    counts = np.zeros(n0 + 1, dtype=np.float64)
    counts[0] = 1.0
    for m in range(2, n + 1):
        # convolve with a length-m run of ones: inserting element m adds
        # anywhere from 0 to m-1 discordant pairs
        cumulative = np.cumsum(counts)
        new = cumulative.copy()
        new[m:] -= cumulative[:-m]
        counts = new
    total = counts.sum()
    d = (n0 - abs(s)) // 2  # discordance of the observed |S|
    low = counts[: d + 1].sum()
    high = counts[n0 - d :].sum()
    return float(min(1.0, (low + high) / total))


def _kendall(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    n = x.size
    dx = np.sign(x[:, None] - x[None, :])
    dy = np.sign(y[:, None] - y[None, :])
    upper = np.triu_indices(n, k=1)
    s = float(np.sum(dx[upper] * dy[upper]))

    n0 = n * (n - 1) / 2.0
    _, tx = np.unique(x, return_counts=True)
    _, ty = np.unique(y, return_counts=True)
    n1 = float(np.sum(tx * (tx - 1) / 2.0))
    n2 = float(np.sum(ty * (ty - 1) / 2.0))
    denom = math.sqrt((n0 - n1) * (n0 - n2))
    if denom == 0.0:
        raise DegenerateDataError("zero variance input to correlation")
    tau = s / denom
    tau = max(-1.0, min(1.0, tau))
    if 1.0 - abs(tau) < _COLLINEAR_EPS:
        return math.copysign(1.0, tau), 0.0

    has_ties = n1 > 0 or n2 > 0
    if n <= 10 and not has_ties:
        return tau, _kendall_exact_p(n, int(round(s)))

    # normal approximation with the tie-corrected variance of S
    v0 = n * (n - 1) * (2 * n + 5)
    vt = float(np.sum(tx * (tx - 1) * (2 * tx + 5)))
    vu = float(np.sum(ty * (ty - 1) * (2 * ty + 5)))
    v1 = float(np.sum(tx * (tx - 1)) * np.sum(ty * (ty - 1))) / (2.0 * n * (n - 1))
    v2 = 0.0
    if n > 2:
        v2 = (
            float(np.sum(tx * (tx - 1) * (tx - 2)) * np.sum(ty * (ty - 1) * (ty - 2)))
            / (9.0 * n * (n - 1) * (n - 2))
        )
    var_s = (v0 - vt - vu) / 18.0 + v1 + v2
    if var_s <= 0.0:
        return tau, 1.0
    z = s / math.sqrt(var_s)
    p = 2.0 * normal_sf(abs(z))
    return tau, min(1.0, p)


def correlation(x, y, method: str = "pearson") -> CorrelationResult:
    """Correlation coefficient with a two-sided p-value.

    pearson: product-moment r with the exact t reference. spearman: pearson
    on mid-ranks. kendall: tau-b with tie correction; exact enumeration of
    the null for tie-free n <= 10, the tie-corrected normal approximation
    otherwise. Exact collinearity is clamped to |r| = 1 with p = 0.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D and the same length")
    n = x.size
    if n < 3:
        raise DegenerateDataError("correlation requires n >= 3")
    # an exactly constant vector has no direction; centering noise must not
    # manufacture variance out of it
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DegenerateDataError("zero variance input to correlation")

    if method == "pearson":
        r, p = _pearson(x, y)
    elif method == "spearman":
        r, p = _pearson(_midranks(x), _midranks(y))
    elif method == "kendall":
        r, p = _kendall(x, y)
    else:
        raise ValueError(f"unknown correlation method {method!r}")
    return CorrelationResult(method=method, coefficient=r, p_value=p, n=n)


@dataclass(frozen=True)
class BandResult:
    band_index: int
    wavelength_nm: float  # NaN when the cube has no wavelength grid
    coefficient: float  # NaN for a constant band
    p_value: float
    significant: bool
    note: str = ""


def benjamini_hochberg_flags(p_values, alpha: float) -> np.ndarray:
    """Step-up BH procedure; True where the hypothesis is rejected."""
    p = np.asarray(p_values, dtype=np.float64)
    m = p.size
    order = np.argsort(p, kind="stable")
    flags = np.zeros(m, dtype=bool)
    threshold_rank = 0
    for rank, idx in enumerate(order, start=1):
        if p[idx] <= rank / m * alpha:
            threshold_rank = rank
    flags[order[:threshold_rank]] = True
    return flags


def band_significance(
    spectra,
    target,
    method: str = "pearson",
    alpha: float = 0.05,
    correction: str = "none",
    wavelengths=None,
) -> list[BandResult]:
    """Per-band correlation against a target with a significance flag.

    A constant band is reported as not significant with a diagnostic note
    rather than failing the scan. ``correction`` is ``none`` (raw p < alpha,
    the paper's convention) or ``benjamini_hochberg``.
    """
    spectra = np.asarray(spectra, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if spectra.ndim != 2:
        raise ValueError("spectra must be (samples, bands)")
    if target.size != spectra.shape[0]:
        raise ValueError("target length must equal the sample count")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if correction not in ("none", "benjamini_hochberg"):
        raise ValueError(f"unknown correction {correction!r}")

    n_bands = spectra.shape[1]
    if wavelengths is not None and len(wavelengths) != n_bands:
        raise ValueError("wavelength grid length must equal the band count")

    coefficients = np.full(n_bands, np.nan)
    p_values = np.ones(n_bands)
    notes = [""] * n_bands
    for b in range(n_bands):
        try:
            result = correlation(spectra[:, b], target, method)
        except DegenerateDataError:
            notes[b] = "constant band"
            continue
        coefficients[b] = result.coefficient
        p_values[b] = result.p_value

    testable = np.array([note == "" for note in notes])
    flags = np.zeros(n_bands, dtype=bool)
    if correction == "none":
        flags[testable] = p_values[testable] < alpha
    elif testable.any():
        flags[testable] = benjamini_hochberg_flags(p_values[testable], alpha)

    return [
        BandResult(
            band_index=b,
            wavelength_nm=float(wavelengths[b]) if wavelengths is not None else math.nan,
            coefficient=float(coefficients[b]),
            p_value=float(p_values[b]),
            significant=bool(flags[b]),
            note=notes[b],
        )
        for b in range(n_bands)
    ]
