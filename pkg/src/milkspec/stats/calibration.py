"""Spectrophotometric calibration lines and inverse prediction.

Absorbance is regressed on standard concentrations; unknown samples are
read back through the inverted line. Predictions outside the standard
range are flagged as extrapolated, never silently trusted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from milkspec.errors import DegenerateDataError

# Ferrous sulfate standard range used for the antioxidant-capacity curve (uM).
FRAP_STANDARD_RANGE_UM = (31.25, 2000.0)


@dataclass(frozen=True)
class CalibrationModel:
    slope: float
    intercept: float
    r_squared: float
    domain: tuple[float, float]  # (min standard, max standard) concentrations


@dataclass(frozen=True)
class InversePrediction:
    concentration: float
    extrapolated: bool  # outside the standard range
    negative: bool  # absorbance below the intercept


def calibration_fit(concentrations, absorbances) -> CalibrationModel:
    """Least-squares line absorbance = slope * concentration + intercept."""
    conc = np.asarray(concentrations, dtype=np.float64)
    absorb = np.asarray(absorbances, dtype=np.float64)
    if conc.shape != absorb.shape or conc.ndim != 1:
        raise ValueError("concentrations and absorbances must be 1-D and equal length")
    if np.unique(conc).size < 2:
        raise DegenerateDataError("calibration needs at least 2 distinct standards")

    cc = conc - conc.mean()
    slope = float(cc @ (absorb - absorb.mean())) / float(cc @ cc)
    intercept = float(absorb.mean()) - slope * float(conc.mean())
    fitted = slope * conc + intercept
    tss = float(((absorb - absorb.mean()) ** 2).sum())
    rss = float(((absorb - fitted) ** 2).sum())
    r_squared = 1.0 if tss == 0.0 else 1.0 - rss / tss
    return CalibrationModel(
        slope=slope,
        intercept=intercept,
        r_squared=r_squared,
        domain=(float(conc.min()), float(conc.max())),
    )


def inverse_predict(model: CalibrationModel, absorbance: float) -> InversePrediction:
    """Concentration for an absorbance reading: (abs - intercept) / slope."""
    if model.slope == 0.0:
        raise DegenerateDataError("calibration line has zero slope")
    concentration = (absorbance - model.intercept) / model.slope
    lo, hi = model.domain
    return InversePrediction(
        concentration=concentration,
        extrapolated=not (lo <= concentration <= hi),
        negative=concentration < 0.0,
    )
