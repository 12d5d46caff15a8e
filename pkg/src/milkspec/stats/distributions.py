"""Distribution CDFs and inverses backing every p-value in the package.

All four reference distributions ride on the regularized incomplete
beta/gamma functions (scipy.special); the wrappers add domain checks and a
uniform calling surface.
"""

from __future__ import annotations

from scipy import special

from milkspec.errors import DegenerateDataError


def normal_cdf(x: float) -> float:
    return float(special.ndtr(x))


def normal_sf(x: float) -> float:
    """Upper tail 1 - CDF, computed without cancellation."""
    return float(special.ndtr(-x))


def normal_ppf(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise DegenerateDataError("normal_ppf requires p in (0, 1)")
    return float(special.ndtri(p))


def t_cdf(x: float, df: float) -> float:
    if df <= 0:
        raise DegenerateDataError("t distribution requires df > 0")
    return float(special.stdtr(df, x))


def t_sf(x: float, df: float) -> float:
    # symmetry keeps the upper tail exact for large |x|
    return t_cdf(-x, df)


def t_ppf(p: float, df: float) -> float:
    if df <= 0:
        raise DegenerateDataError("t distribution requires df > 0")
    if not 0.0 < p < 1.0:
        raise DegenerateDataError("t_ppf requires p in (0, 1)")
    return float(special.stdtrit(df, p))


def f_cdf(x: float, d1: float, d2: float) -> float:
    if d1 <= 0 or d2 <= 0:
        raise DegenerateDataError("F distribution requires positive dfs")
    if x <= 0:
        return 0.0
    return float(special.fdtr(d1, d2, x))


def f_sf(x: float, d1: float, d2: float) -> float:
    if d1 <= 0 or d2 <= 0:
        raise DegenerateDataError("F distribution requires positive dfs")
    if x <= 0:
        return 1.0
    return float(special.fdtrc(d1, d2, x))


def chi2_cdf(x: float, df: float) -> float:
    if df <= 0:
        raise DegenerateDataError("chi-square distribution requires df > 0")
    if x <= 0:
        return 0.0
    return float(special.chdtr(df, x))


def chi2_sf(x: float, df: float) -> float:
    if df <= 0:
        raise DegenerateDataError("chi-square distribution requires df > 0")
    if x <= 0:
        return 1.0
    return float(special.chdtrc(df, x))


def dist_cdf(dist: str, x: float, *params: float) -> float:
    """Dispatch by name: ``normal``, ``t`` (df), ``f`` (d1, d2), ``chi2`` (df)."""
    dist = dist.lower()
    if dist == "normal":
        return normal_cdf(x)
    if dist == "t":
        return t_cdf(x, *params)
    if dist == "f":
        return f_cdf(x, *params)
    if dist == "chi2":
        return chi2_cdf(x, *params)
    raise ValueError(f"unknown distribution {dist!r}")
