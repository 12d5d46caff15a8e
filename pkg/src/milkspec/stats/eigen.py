"""Deterministic symmetric eigendecomposition via cyclic Jacobi rotations.

Matrices in this package are at most a few hundred square (covariance of
bands or features), where Jacobi's simplicity and platform-independent
determinism beat iterative solvers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from milkspec.errors import DegenerateDataError

_SYMMETRY_TOL = 1e-10
_OFFDIAG_TOL = 1e-12
_MAX_SWEEPS = 100


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # orthonormal columns, eigenvectors[:, i] pairs eigenvalues[i]


def sym_eigen(A, tol: float = _OFFDIAG_TOL, max_sweeps: int = _MAX_SWEEPS) -> EigenDecomposition:
    """Eigenpairs of a symmetric matrix, sorted by descending eigenvalue.

    Runs cyclic Jacobi sweeps until every off-diagonal magnitude drops below
    ``tol`` times the Frobenius norm of the input (default 1e-12).
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("input must be a square matrix")
    n = A.shape[0]
    scale = max(np.abs(A).max(), 1.0)
    if np.abs(A - A.T).max() > _SYMMETRY_TOL * scale:
        raise DegenerateDataError("matrix is not symmetric")

    work = 0.5 * (A + A.T)
    vectors = np.eye(n)
    norm = float(np.linalg.norm(work))
    if norm == 0.0:
        return EigenDecomposition(np.zeros(n), vectors)
    threshold = tol * norm

    for _ in range(max_sweeps):
        max_off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                mag = abs(apq)
                if mag <= threshold:
                    continue
                max_off = max(max_off, mag)
                theta = (work[q, q] - work[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c

                row_p = work[p, :].copy()
                row_q = work[q, :].copy()
                work[p, :] = c * row_p - s * row_q
                work[q, :] = s * row_p + c * row_q
                col_p = work[:, p].copy()
                col_q = work[:, q].copy()
                work[:, p] = c * col_p - s * col_q
                work[:, q] = s * col_p + c * col_q

                vec_p = vectors[:, p].copy()
                vec_q = vectors[:, q].copy()
                vectors[:, p] = c * vec_p - s * vec_q
                vectors[:, q] = s * vec_p + c * vec_q
        if max_off <= threshold:
            break

    eigenvalues = np.diag(work).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    return EigenDecomposition(eigenvalues[order], vectors[:, order])
