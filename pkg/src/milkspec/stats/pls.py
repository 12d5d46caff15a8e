"""Partial least squares regression via NIPALS with deflation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from milkspec.errors import ConvergenceError, DegenerateDataError

_NIPALS_TOL = 1e-12
_NIPALS_MAX_ITER = 1000


@dataclass(frozen=True)
class PlsModel:
    n_components: int
    x_weights: np.ndarray  # W, (features, k), unit columns
    x_loadings: np.ndarray  # P, (features, k)
    y_loadings: np.ndarray  # C, (targets, k)
    x_scores: np.ndarray  # T, (samples, k)
    coefficients: np.ndarray  # (features, targets)
    x_mean: np.ndarray
    y_mean: np.ndarray


def pls_fit(X, Y, n_components: int) -> PlsModel:
    """Fit a PLS model with ``n_components`` latent variables.

    Each component iterates the NIPALS score/weight exchange to
    convergence, then deflates X (and Y) on the extracted score. Prediction
    coefficients accumulate as B = W (P'W)^-1 C'.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.ndim != 2 or X.shape[0] != Y.shape[0]:
        raise ValueError("X and Y must share the sample dimension")

    x_mean = X.mean(axis=0)
    y_mean = Y.mean(axis=0)
    Xc = X - x_mean
    Yc = Y - y_mean
    if not np.any(Yc):
        raise DegenerateDataError("Y has zero variance")
    rank = np.linalg.matrix_rank(Xc)
    if not 1 <= n_components <= rank:
        raise DegenerateDataError(
            f"n_components must be in [1, rank(X) = {rank}], got {n_components}"
        )

    n, p = Xc.shape
    q = Yc.shape[1]
    W = np.zeros((p, n_components))
    P = np.zeros((p, n_components))
    C = np.zeros((q, n_components))
    T = np.zeros((n, n_components))

    Xd, Yd = Xc.copy(), Yc.copy()
    for a in range(n_components):
        # start u from the Y column with the largest remaining variance
        u = Yd[:, int(np.argmax(np.sum(Yd * Yd, axis=0)))].copy()
        t_old = None
        for _ in range(_NIPALS_MAX_ITER):
            w = Xd.T @ u / float(u @ u)
            w_norm = float(np.linalg.norm(w))
            if w_norm == 0.0:
                raise DegenerateDataError("X deflated to zero before extracting all components")
            w /= w_norm
            t = Xd @ w
            tt = float(t @ t)
            if tt == 0.0:
                raise DegenerateDataError("degenerate score vector")
            c = Yd.T @ t / tt
            cc = float(c @ c)
            if cc == 0.0:
                raise DegenerateDataError("Y carries no remaining information")
            u = Yd @ c / cc
            if t_old is not None and float(np.linalg.norm(t - t_old)) <= _NIPALS_TOL * float(
                np.linalg.norm(t)
            ):
                break
            t_old = t
        else:
            raise ConvergenceError("NIPALS did not converge")

        p_vec = Xd.T @ t / tt
        W[:, a] = w
        P[:, a] = p_vec
        C[:, a] = c
        T[:, a] = t
        Xd = Xd - np.outer(t, p_vec)
        Yd = Yd - np.outer(t, c)

    coefficients = W @ np.linalg.solve(P.T @ W, C.T)
    return PlsModel(
        n_components=n_components,
        x_weights=W,
        x_loadings=P,
        y_loadings=C,
        x_scores=T,
        coefficients=coefficients,
        x_mean=x_mean,
        y_mean=y_mean,
    )


def pls_predict(model: PlsModel, X) -> np.ndarray:
    """Predicted responses; 1-D when the model was fit on a single target."""
    X = np.asarray(X, dtype=np.float64)
    predictions = (X - model.x_mean) @ model.coefficients + model.y_mean
    if predictions.shape[1] == 1:
        return predictions[:, 0]
    return predictions
