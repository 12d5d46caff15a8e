"""Ordinary least squares with the full diagnostic panel.

Covers the coefficient table (standard errors, t, two-sided p, 95% CI) and
the goodness-of-fit / residual block: R-squared, adjusted R-squared, F,
Gaussian ML log-likelihood, AIC/BIC, Durbin-Watson, residual skewness and
kurtosis (Pearson, kurtosis not excess), Jarque-Bera, the D'Agostino-Pearson
omnibus K-squared, and the condition number of the column-scaled design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from milkspec.errors import DegenerateDataError
from milkspec.stats.distributions import chi2_sf, f_sf, normal_ppf, t_sf, t_ppf

# residual sum of squares below this fraction of the centered total is an
# exact fit; moment-based diagnostics are meaningless there
_EXACT_FIT_RTOL = 1e-20


@dataclass(frozen=True)
class CoefficientRow:
    name: str
    coef: float
    std_err: float
    t_value: float
    p_value: float
    ci_low: float
    ci_high: float


@dataclass(frozen=True)
class OlsSummary:
    dep_variable: str
    coefficients: tuple[CoefficientRow, ...]
    r_squared: float
    adj_r_squared: float
    f_statistic: float
    f_p_value: float
    log_likelihood: float
    aic: float
    bic: float
    durbin_watson: float
    omnibus: float
    omnibus_p: float
    jarque_bera: float
    jb_p: float
    skew: float
    kurtosis: float
    condition_number: float
    n_obs: int
    df_resid: int
    df_model: int
    residuals: np.ndarray
    fitted: np.ndarray
    degenerate: bool


def _skewtest_z(g1: float, n: int) -> float:
    """D'Agostino's transformed skewness statistic (requires n >= 8)."""
    y = g1 * math.sqrt((n + 1.0) * (n + 3.0) / (6.0 * (n - 2.0)))
    beta2 = (
        3.0 * (n * n + 27.0 * n - 70.0) * (n + 1.0) * (n + 3.0)
        / ((n - 2.0) * (n + 5.0) * (n + 7.0) * (n + 9.0))
    )
    w2 = -1.0 + math.sqrt(2.0 * (beta2 - 1.0))
    delta = 1.0 / math.sqrt(0.5 * math.log(w2))
    alpha = math.sqrt(2.0 / (w2 - 1.0))
    if y == 0.0:
        return 0.0
    return delta * math.log(y / alpha + math.sqrt((y / alpha) ** 2 + 1.0))


def _kurtosistest_z(b2: float, n: int) -> float:
    """Anscombe-Glynn transformed kurtosis statistic (requires n >= 5)."""
    e = 3.0 * (n - 1.0) / (n + 1.0)
    var = 24.0 * n * (n - 2.0) * (n - 3.0) / ((n + 1.0) ** 2 * (n + 3.0) * (n + 5.0))
    x = (b2 - e) / math.sqrt(var)
    sqrtbeta1 = (
        6.0 * (n * n - 5.0 * n + 2.0) / ((n + 7.0) * (n + 9.0))
        * math.sqrt(6.0 * (n + 3.0) * (n + 5.0) / (n * (n - 2.0) * (n - 3.0)))
    )
    a = 6.0 + 8.0 / sqrtbeta1 * (2.0 / sqrtbeta1 + math.sqrt(1.0 + 4.0 / sqrtbeta1**2))
    term1 = 1.0 - 2.0 / (9.0 * a)
    denom = 1.0 + x * math.sqrt(2.0 / (a - 4.0))
    term2 = math.copysign(abs((1.0 - 2.0 / a) / denom) ** (1.0 / 3.0), denom)
    return (term1 - term2) / math.sqrt(2.0 / (9.0 * a))


def residual_moments(residuals: np.ndarray) -> tuple[float, float]:
    """(skewness, kurtosis) from central moments; kurtosis is not excess."""
    m2 = float(np.mean(residuals**2))
    if m2 == 0.0:
        raise DegenerateDataError("zero-variance residuals")
    m3 = float(np.mean(residuals**3))
    m4 = float(np.mean(residuals**4))
    return m3 / m2**1.5, m4 / m2**2


def ols_fit(X, y, names=None, dep_variable: str = "y") -> OlsSummary:
    """Fit y on a design matrix that already contains its intercept column.

    Coefficients come from a QR decomposition of the design; the covariance
    of the estimates is sigma^2 (X'X)^-1 with sigma^2 = RSS / df_resid. The
    log-likelihood uses the Gaussian ML convention sigma^2 = RSS / n. The
    condition number is the singular-value ratio after scaling every design
    column (intercept included) to unit Euclidean norm.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be 2-D")
    n, k = X.shape
    if y.shape != (n,):
        raise ValueError("y length must match the rows of X")
    if n <= k:
        raise DegenerateDataError(f"need more observations than parameters ({n} <= {k})")
    if names is None:
        names = [f"x{i}" for i in range(k)]
    if len(names) != k:
        raise ValueError("one name per design column required")

    singular_values = np.linalg.svd(X, compute_uv=False)
    if singular_values[-1] <= singular_values[0] * max(n, k) * np.finfo(float).eps:
        raise DegenerateDataError("design matrix is rank deficient")

    q, r = np.linalg.qr(X)
    beta = np.linalg.solve(r, q.T @ y)
    fitted = X @ beta
    residuals = y - fitted
    rss = float(residuals @ residuals)
    tss = float(((y - y.mean()) ** 2).sum())

    df_model = k - 1
    df_resid = n - k
    exact_fit = rss <= _EXACT_FIT_RTOL * max(tss, 1.0)

    r_inv = np.linalg.inv(r)
    xtx_inv = r_inv @ r_inv.T
    sigma2 = rss / df_resid
    std_err = np.sqrt(np.clip(sigma2 * np.diag(xtx_inv), 0.0, None))

    rows = []
    if exact_fit:
        for name, b in zip(names, beta):
            rows.append(CoefficientRow(name, float(b), 0.0, math.inf, 0.0, float(b), float(b)))
    else:
        t_crit = t_ppf(0.975, df_resid)
        for name, b, se in zip(names, beta, std_err):
            t_val = float(b) / float(se) if se > 0 else math.inf
            p_val = 2.0 * t_sf(abs(t_val), df_resid) if math.isfinite(t_val) else 0.0
            rows.append(
                CoefficientRow(
                    name=name,
                    coef=float(b),
                    std_err=float(se),
                    t_value=t_val,
                    p_value=min(1.0, p_val),
                    ci_low=float(b) - t_crit * float(se),
                    ci_high=float(b) + t_crit * float(se),
                )
            )

    if tss == 0.0:
        raise DegenerateDataError("response has zero variance")
    r_squared = 1.0 - rss / tss
    adj_r_squared = 1.0 - (1.0 - r_squared) * (n - 1) / df_resid

    if exact_fit:
        f_stat, f_p = math.inf, 0.0
        r_squared = 1.0
        adj_r_squared = 1.0
        log_likelihood = aic = bic = math.nan
        dw = skew = kurt = jb = jb_p = omnibus = omnibus_p = math.nan
    else:
        if df_model > 0:
            f_stat = (tss - rss) / df_model / sigma2
            f_p = f_sf(f_stat, df_model, df_resid) if f_stat > 0 else 1.0
        else:
            f_stat, f_p = math.nan, math.nan
        log_likelihood = -0.5 * n * (math.log(2.0 * math.pi) + math.log(rss / n) + 1.0)
        aic = 2.0 * k - 2.0 * log_likelihood
        bic = k * math.log(n) - 2.0 * log_likelihood
        dw = float(np.sum(np.diff(residuals) ** 2)) / rss
        skew, kurt = residual_moments(residuals)
        jb = n / 6.0 * (skew**2 + (kurt - 3.0) ** 2 / 4.0)
        jb_p = chi2_sf(jb, 2)
        if n >= 8:
            k2 = _skewtest_z(skew, n) ** 2 + _kurtosistest_z(kurt, n) ** 2
            omnibus = k2
            omnibus_p = chi2_sf(k2, 2)
        else:
            omnibus, omnibus_p = math.nan, math.nan

    scaled = X / np.linalg.norm(X, axis=0)
    scaled_singular = np.linalg.svd(scaled, compute_uv=False)
    condition_number = float(scaled_singular[0] / scaled_singular[-1])

    return OlsSummary(
        dep_variable=dep_variable,
        coefficients=tuple(rows),
        r_squared=r_squared,
        adj_r_squared=adj_r_squared,
        f_statistic=f_stat,
        f_p_value=f_p,
        log_likelihood=log_likelihood,
        aic=aic,
        bic=bic,
        durbin_watson=dw,
        omnibus=omnibus,
        omnibus_p=omnibus_p,
        jarque_bera=jb,
        jb_p=jb_p,
        skew=skew,
        kurtosis=kurt,
        condition_number=condition_number,
        n_obs=n,
        df_resid=df_resid,
        df_model=df_model,
        residuals=residuals,
        fitted=fitted,
        degenerate=exact_fit,
    )


def qq_points(residuals) -> np.ndarray:
    """(theoretical quantile, ordered standardized residual) pairs.

    Position i of n uses the inverse normal CDF at (i - 0.5) / n;
    standardization uses the sample sd.
    """
    residuals = np.asarray(residuals, dtype=np.float64)
    n = residuals.size
    if n < 2:
        raise DegenerateDataError("need at least 2 residuals")
    sd = residuals.std(ddof=1)
    if sd == 0.0:
        raise DegenerateDataError("zero-variance residuals")
    standardized = np.sort((residuals - residuals.mean()) / sd)
    theoretical = np.array([normal_ppf((i + 0.5) / n) for i in range(n)])
    return np.column_stack([theoretical, standardized])


def _two_col(width, left_label, left_value, right_label, right_value) -> str:
    half = (width - 1) // 2
    left = left_label + left_value.rjust(half - len(left_label))
    right = right_label + right_value.rjust(width - half - 1 - len(right_label))
    return left + " " + right


def _fmt(value: float, spec: str) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    return format(value, spec)


def render_ols_text(summary: OlsSummary) -> str:
    """Fixed-width regression table in the classic layout."""
    name_width = max(12, max(len(row.name) for row in summary.coefficients) + 1)
    width = max(78, name_width + 6 * 11)
    sep = "=" * width
    thin = "-" * width

    def two_col(ll, lv, rl, rv):
        return _two_col(width, ll, lv, rl, rv)

    lines = ["OLS Regression Results".center(width).rstrip(), sep]
    lines.append(two_col("Dep. Variable:", summary.dep_variable, "R-squared:", _fmt(summary.r_squared, ".3f")))
    lines.append(two_col("Model:", "OLS", "Adj. R-squared:", _fmt(summary.adj_r_squared, ".3f")))
    lines.append(two_col("Method:", "Least Squares", "F-statistic:", _fmt(summary.f_statistic, ".4g")))
    lines.append(two_col("No. Observations:", str(summary.n_obs), "Prob (F-statistic):", _fmt(summary.f_p_value, ".3g")))
    lines.append(two_col("Df Residuals:", str(summary.df_resid), "Log-Likelihood:", _fmt(summary.log_likelihood, ".5g")))
    lines.append(two_col("Df Model:", str(summary.df_model), "AIC:", _fmt(summary.aic, ".4g")))
    lines.append(two_col("Covariance Type:", "nonrobust", "BIC:", _fmt(summary.bic, ".4g")))
    lines.append(sep)

    lines.append(
        " " * name_width
        + "coef".rjust(11)
        + "std err".rjust(11)
        + "t".rjust(11)
        + "P>|t|".rjust(11)
        + "[0.025".rjust(11)
        + "0.975]".rjust(11)
    )
    lines.append(thin)
    for row in summary.coefficients:
        lines.append(
            row.name.ljust(name_width)
            + _fmt(row.coef, ".4f").rjust(11)
            + _fmt(row.std_err, ".3f").rjust(11)
            + _fmt(row.t_value, ".3f").rjust(11)
            + _fmt(row.p_value, ".3f").rjust(11)
            + _fmt(row.ci_low, ".3f").rjust(11)
            + _fmt(row.ci_high, ".3f").rjust(11)
        )
    lines.append(sep)
    lines.append(two_col("Omnibus:", _fmt(summary.omnibus, ".3f"), "Durbin-Watson:", _fmt(summary.durbin_watson, ".3f")))
    lines.append(two_col("Prob(Omnibus):", _fmt(summary.omnibus_p, ".3f"), "Jarque-Bera (JB):", _fmt(summary.jarque_bera, ".3f")))
    lines.append(two_col("Skew:", _fmt(summary.skew, ".3f"), "Prob(JB):", _fmt(summary.jb_p, ".4g")))
    lines.append(two_col("Kurtosis:", _fmt(summary.kurtosis, ".3f"), "Cond. No.", _fmt(summary.condition_number, ".3g")))
    lines.append(sep)
    return "\n".join(lines) + "\n"


def _json_value(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def ols_to_dict(summary: OlsSummary) -> dict:
    """JSON-ready dict with snake_case keys (non-finite values become null)."""
    return {
        "dep_variable": summary.dep_variable,
        "coefficients": [
            {
                "name": row.name,
                "coef": _json_value(row.coef),
                "std_err": _json_value(row.std_err),
                "t": _json_value(row.t_value),
                "p_value": _json_value(row.p_value),
                "ci_low": _json_value(row.ci_low),
                "ci_high": _json_value(row.ci_high),
            }
            for row in summary.coefficients
        ],
        "r_squared": _json_value(summary.r_squared),
        "adj_r_squared": _json_value(summary.adj_r_squared),
        "f_statistic": _json_value(summary.f_statistic),
        "f_p_value": _json_value(summary.f_p_value),
        "log_likelihood": _json_value(summary.log_likelihood),
        "aic": _json_value(summary.aic),
        "bic": _json_value(summary.bic),
        "durbin_watson": _json_value(summary.durbin_watson),
        "omnibus": _json_value(summary.omnibus),
        "omnibus_p": _json_value(summary.omnibus_p),
        "jarque_bera": _json_value(summary.jarque_bera),
        "jb_p": _json_value(summary.jb_p),
        "skew": _json_value(summary.skew),
        "kurtosis": _json_value(summary.kurtosis),
        "condition_number": _json_value(summary.condition_number),
        "n_obs": summary.n_obs,
        "df_resid": summary.df_resid,
        "df_model": summary.df_model,
        "degenerate": summary.degenerate,
    }
