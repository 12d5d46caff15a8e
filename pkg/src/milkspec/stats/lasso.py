"""L1-penalized least squares by cyclic coordinate descent.

Minimizes 0.5 * ||y - X b||^2 + lam * ||b||_1 with soft-thresholding
updates. The intercept is never penalized: predictors are expected
column-standardized, so it is simply the response mean.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from milkspec.errors import ConvergenceError, DegenerateDataError


@dataclass(frozen=True)
class LassoFit:
    intercept: float
    coefficients: np.ndarray
    n_sweeps: int
    lam: float
    objective_history: tuple[float, ...] | None = None  # per sweep, when tracked


def soft_threshold(z: float, threshold: float) -> float:
    if z > threshold:
        return z - threshold
    if z < -threshold:
        return z + threshold
    return 0.0


def lambda_max(X, y) -> float:
    """Smallest penalty that zeroes every coefficient: max |X'(y - ybar)|."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return float(np.max(np.abs(X.T @ (y - y.mean()))))


def lasso_objective(X, y, fit: LassoFit) -> float:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    resid = y - fit.intercept - X @ fit.coefficients
    return 0.5 * float(resid @ resid) + fit.lam * float(np.abs(fit.coefficients).sum())


def lasso_fit(
    X, y, lam: float, max_sweeps: int = 10_000, tol: float = 1e-8, track_objective: bool = False
) -> LassoFit:
    """Cyclic coordinate descent until the largest coefficient change in a
    sweep drops below ``tol``; raises after ``max_sweeps`` without
    convergence."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.size:
        raise ValueError("X must be (n, p) and y length n")
    if lam < 0:
        raise ValueError("lambda must be >= 0")

    norms_sq = np.sum(X * X, axis=0)
    if np.any(norms_sq == 0.0):
        raise DegenerateDataError("X contains an all-zero column")

    intercept = float(y.mean())
    beta = np.zeros(X.shape[1])
    residual = y - intercept  # equals y_c - X @ beta throughout
    history: list[float] = []

    for sweep in range(1, max_sweeps + 1):
        max_change = 0.0
        for j in range(beta.size):
            old = beta[j]
            rho = float(X[:, j] @ residual) + norms_sq[j] * old
            new = soft_threshold(rho, lam) / norms_sq[j]
            if new != old:
                residual -= (new - old) * X[:, j]
                beta[j] = new
            max_change = max(max_change, abs(new - old))
        if track_objective:
            history.append(0.5 * float(residual @ residual) + lam * float(np.abs(beta).sum()))
        if max_change < tol:
            return LassoFit(
                intercept=intercept,
                coefficients=beta,
                n_sweeps=sweep,
                lam=lam,
                objective_history=tuple(history) if track_objective else None,
            )
    raise ConvergenceError(f"coordinate descent did not converge in {max_sweeps} sweeps")
