"""One-way and two-way fixed-effects analysis of variance.

The two-way layout with interaction stands in for the mixed model behind
the per-parameter TIME/GROUP/interaction p-value table; sums of squares are
sequential (Type I) in the order A, B, A x B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from milkspec.errors import DegenerateDataError
from milkspec.stats.distributions import f_sf


@dataclass(frozen=True)
class OneWayAnova:
    f_statistic: float
    p_value: float
    df_between: int
    df_within: int
    ss_between: float
    ss_within: float
    degenerate: bool  # MSW == 0 while the group means differ


@dataclass(frozen=True)
class FactorEffect:
    name: str
    f_statistic: float
    p_value: float
    df: int
    sum_squares: float


@dataclass(frozen=True)
class TwoWayAnova:
    factor_a: FactorEffect
    factor_b: FactorEffect
    interaction: FactorEffect
    df_residual: int
    ss_residual: float
    degenerate: bool


def _f_and_p(ss: float, df: int, mse: float, df_err: int) -> tuple[float, float, bool]:
    """F ratio with the degenerate conventions: a zero effect SS gives
    F = 0, p = 1 regardless of the error term; a zero error term under a
    nonzero effect gives F = inf, p = 0, flagged."""
    if df <= 0:
        raise DegenerateDataError("effect has no degrees of freedom")
    ms = ss / df
    if ms <= 0.0:
        return 0.0, 1.0, False
    if mse <= 0.0:
        return math.inf, 0.0, True
    f = ms / mse
    return f, f_sf(f, df, df_err), False


def anova_oneway(groups) -> OneWayAnova:
    """Classic between/within decomposition over >= 2 groups of n >= 2."""
    arrays = [np.asarray(g, dtype=np.float64) for g in groups]
    if len(arrays) < 2:
        raise DegenerateDataError("one-way ANOVA requires at least 2 groups")
    if any(a.size < 2 for a in arrays):
        raise DegenerateDataError("every group must have at least 2 observations")
    n = sum(a.size for a in arrays)
    grand = sum(float(a.sum()) for a in arrays) / n

    ss_between = sum(a.size * (float(a.mean()) - grand) ** 2 for a in arrays)
    ss_within = sum(float(((a - a.mean()) ** 2).sum()) for a in arrays)
    df_between = len(arrays) - 1
    df_within = n - len(arrays)

    mse = ss_within / df_within
    f, p, degenerate = _f_and_p(ss_between, df_between, mse, df_within)
    return OneWayAnova(
        f_statistic=f,
        p_value=p,
        df_between=df_between,
        df_within=df_within,
        ss_between=ss_between,
        ss_within=ss_within,
        degenerate=degenerate,
    )


def _dummy_columns(labels: np.ndarray) -> tuple[np.ndarray, list]:
    levels = sorted(set(labels.tolist()))
    if len(levels) < 2:
        raise DegenerateDataError("factor must have at least 2 levels")
    columns = np.column_stack([(labels == lv).astype(np.float64) for lv in levels[1:]])
    return columns, levels


def _rss(design: np.ndarray, y: np.ndarray) -> float:
    beta, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ beta
    return float(resid @ resid)


def anova_twoway(values, factor_a, factor_b) -> TwoWayAnova:
    """Two-factor fixed-effects ANOVA with interaction, Type-I order A, B, AxB.

    Works for balanced and unbalanced layouts; every cell of the A x B cross
    must be populated for the interaction term to be estimable.
    """
    y = np.asarray(values, dtype=np.float64)
    fa = np.asarray(factor_a)
    fb = np.asarray(factor_b)
    if not (y.size == fa.size == fb.size):
        raise ValueError("values and factor labels must share length")

    a_dummies, a_levels = _dummy_columns(fa)
    b_dummies, b_levels = _dummy_columns(fb)
    for la in a_levels:
        for lb in b_levels:
            if not np.any((fa == la) & (fb == lb)):
                raise DegenerateDataError(f"empty cell ({la!r}, {lb!r}) with interaction requested")

    n = y.size
    df_a = len(a_levels) - 1
    df_b = len(b_levels) - 1
    df_int = df_a * df_b
    df_err = n - len(a_levels) * len(b_levels)
    if df_err <= 0:
        raise DegenerateDataError("no residual degrees of freedom (one replicate per cell)")

    intercept = np.ones((n, 1))
    interaction = np.column_stack(
        [a_dummies[:, i] * b_dummies[:, j] for i in range(df_a) for j in range(df_b)]
    )
    rss_0 = _rss(intercept, y)
    rss_a = _rss(np.hstack([intercept, a_dummies]), y)
    rss_ab = _rss(np.hstack([intercept, a_dummies, b_dummies]), y)
    rss_full = _rss(np.hstack([intercept, a_dummies, b_dummies, interaction]), y)

    # sequential decrements pick up rounding noise; sums of squares carry
    # absolute float error of order eps^2 * ||y||^2, so clamp below that
    floor = 1e-20 * max(float(y @ y), 1.0)

    def clamp(ss: float) -> float:
        return ss if ss > floor else 0.0

    ss_a = clamp(rss_0 - rss_a)
    ss_b = clamp(rss_a - rss_ab)
    ss_int = clamp(rss_ab - rss_full)
    mse = clamp(rss_full) / df_err

    f_a, p_a, deg_a = _f_and_p(ss_a, df_a, mse, df_err)
    f_b, p_b, deg_b = _f_and_p(ss_b, df_b, mse, df_err)
    f_i, p_i, deg_i = _f_and_p(ss_int, df_int, mse, df_err)
    return TwoWayAnova(
        factor_a=FactorEffect("A", f_a, p_a, df_a, ss_a),
        factor_b=FactorEffect("B", f_b, p_b, df_b, ss_b),
        interaction=FactorEffect("AxB", f_i, p_i, df_int, ss_int),
        df_residual=df_err,
        ss_residual=rss_full,
        degenerate=deg_a or deg_b or deg_i,
    )


def _format_p(p: float) -> str:
    if math.isnan(p):
        return "nan".rjust(12)
    if p != 0.0 and p < 1e-4:
        return f"{p:.6e}".rjust(12)
    return f"{p:.6f}".rjust(12)


def render_factor_table(rows: list[tuple[str, TwoWayAnova]]) -> str:
    """Fixed-width per-parameter table with TIME_p / GROUP_p / INT_p columns.

    Factor A is the milking time, factor B the treatment group, matching the
    column order of the reported mixed-model approximation.
    """
    width = max(12, max((len(name) for name, _ in rows), default=12) + 2)
    lines = [
        "Parameter".ljust(width)
        + "TIME_p".rjust(12)
        + "GROUP_p".rjust(12)
        + "INT_p".rjust(12)
    ]
    for name, result in rows:
        lines.append(
            name.ljust(width)
            + _format_p(result.factor_a.p_value)
            + _format_p(result.factor_b.p_value)
            + _format_p(result.interaction.p_value)
        )
    return "\n".join(lines) + "\n"
