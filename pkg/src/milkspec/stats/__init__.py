from milkspec.stats.anova import (
    OneWayAnova,
    TwoWayAnova,
    anova_oneway,
    anova_twoway,
    render_factor_table,
)
from milkspec.stats.calibration import (
    FRAP_STANDARD_RANGE_UM,
    CalibrationModel,
    InversePrediction,
    calibration_fit,
    inverse_predict,
)
from milkspec.stats.correlation import (
    BandResult,
    CorrelationResult,
    band_significance,
    benjamini_hochberg_flags,
    correlation,
)
from milkspec.stats.distributions import (
    chi2_cdf,
    chi2_sf,
    dist_cdf,
    f_cdf,
    f_sf,
    normal_cdf,
    normal_ppf,
    normal_sf,
    t_cdf,
    t_ppf,
    t_sf,
)
from milkspec.stats.eigen import EigenDecomposition, sym_eigen
from milkspec.stats.lasso import LassoFit, lambda_max, lasso_fit, lasso_objective, soft_threshold
from milkspec.stats.mnf import MnfResult, estimate_noise_covariance, mnf
from milkspec.stats.ols import (
    CoefficientRow,
    OlsSummary,
    ols_fit,
    ols_to_dict,
    qq_points,
    render_ols_text,
)
from milkspec.stats.pca import PcaResult, fix_component_signs, pca
from milkspec.stats.pls import PlsModel, pls_fit, pls_predict

__all__ = [
    "BandResult",
    "CalibrationModel",
    "CoefficientRow",
    "CorrelationResult",
    "EigenDecomposition",
    "FRAP_STANDARD_RANGE_UM",
    "InversePrediction",
    "LassoFit",
    "MnfResult",
    "OlsSummary",
    "OneWayAnova",
    "PcaResult",
    "PlsModel",
    "TwoWayAnova",
    "anova_oneway",
    "anova_twoway",
    "band_significance",
    "benjamini_hochberg_flags",
    "calibration_fit",
    "chi2_cdf",
    "chi2_sf",
    "correlation",
    "dist_cdf",
    "estimate_noise_covariance",
    "f_cdf",
    "f_sf",
    "fix_component_signs",
    "inverse_predict",
    "lambda_max",
    "lasso_fit",
    "lasso_objective",
    "mnf",
    "normal_cdf",
    "normal_ppf",
    "normal_sf",
    "ols_fit",
    "ols_to_dict",
    "pca",
    "pls_fit",
    "pls_predict",
    "qq_points",
    "render_factor_table",
    "render_ols_text",
    "soft_threshold",
    "sym_eigen",
    "t_cdf",
    "t_ppf",
    "t_sf",
]
