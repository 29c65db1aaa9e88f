"""Dense symmetric eigensolvers, pivoted least squares, Pearson correlation.

The eigensolver is a cyclic Jacobi iteration: provably convergent,
ample at the matrix orders used here (n <= ~200), and accurate to
near machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .errors import ConvergenceError

_SYM_TOL = 1e-12


def _as_symmetric(m) -> np.ndarray:
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] == 0:
        raise ValueError("matrix order must be >= 1")
    if np.abs(a - a.T).max(initial=0.0) > _SYM_TOL:
        raise ValueError("matrix is not symmetric within 1e-12")
    return a


def symmetric_eigen(m) -> Tuple[np.ndarray, np.ndarray]:
    """Full eigendecomposition of a symmetric matrix.

    Returns (eigenvalues descending, orthonormal eigenvector columns in
    matching order).
    """
    a = _as_symmetric(m)
    w, v, _, converged = _kernels.jacobi_eigh(a.copy())
    if not converged:
        raise ConvergenceError("Jacobi sweep limit reached")
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def dominant_eigenpair(m, tol: float = 1e-10,
                       max_iterations: int = 100_000) -> Tuple[float, np.ndarray]:
    """Dominant eigenpair by shifted power iteration.

    The iteration runs on M + cI with c = 1 + max absolute row sum, which
    is positive definite (so bipartite-style +/- eigenvalue ties cannot
    stall it), and the eigenpair of M is recovered afterwards. The
    eigenvector sign is fixed so its largest-magnitude component is
    positive.
    """
    a = _as_symmetric(m)
    lam, vec, _, converged = _kernels.power_iteration(a, tol, max_iterations)
    if not converged:
        raise ConvergenceError(
            f"power iteration did not converge in {max_iterations} iterations")
    i = int(np.argmax(np.abs(vec)))
    if vec[i] < 0:
        vec = -vec
    return float(lam), vec


@dataclass(frozen=True)
class RegressionFit:
    """Least-squares fit; coefficients[0] is the intercept."""

    coefficients: np.ndarray
    feature_names: List[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.coefficients) != len(self.feature_names) + 1:
            raise ValueError("need exactly one coefficient per feature "
                             "plus an intercept")

    def predict(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return self.coefficients[0] + X @ self.coefficients[1:]


def least_squares_fit(X, y, feature_names: Optional[Sequence[str]] = None
                      ) -> RegressionFit:
    """Minimize ||y - (b0 + X b)||_2 via Householder QR with column
    pivoting. Columns judged rank-deficient get zero coefficients."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("X must be a non-empty 2-d array")
    if X.shape[0] != y.shape[0]:
        raise ValueError("X and y row counts differ")
    rows, k = X.shape
    if rows < k + 1:
        raise ValueError(f"need at least {k + 1} rows for {k} features, "
                         f"got {rows}")
    if feature_names is None:
        feature_names = [f"x{i}" for i in range(k)]
    elif len(feature_names) != k:
        raise ValueError("feature_names length must match X columns")

    ncols = k + 1
    a = np.empty((rows, ncols))
    a[:, 0] = 1.0
    a[:, 1:] = X
    qty = y.copy()
    perm = np.arange(ncols)

    col_norms = np.sqrt(np.sum(a * a, axis=0))
    tol = max(rows, ncols) * np.finfo(np.float64).eps * max(
        col_norms.max(initial=0.0), 1.0)

    rank = ncols
    for j in range(ncols):
        norms = np.sqrt(np.sum(a[j:, j:] ** 2, axis=0))
        pivot = j + int(np.argmax(norms))
        if norms[pivot - j] <= tol:
            rank = j
            break
        if pivot != j:
            a[:, [j, pivot]] = a[:, [pivot, j]]
            perm[[j, pivot]] = perm[[pivot, j]]
        x = a[j:, j].copy()
        normx = np.linalg.norm(x)
        alpha = -normx if x[0] >= 0 else normx
        u = x
        u[0] -= alpha
        unorm = np.linalg.norm(u)
        if unorm > 0:
            u /= unorm
            a[j:, j:] -= 2.0 * np.outer(u, u @ a[j:, j:])
            qty[j:] -= 2.0 * u * (u @ qty[j:])
        a[j:, j] = 0.0
        a[j, j] = alpha

    beta_perm = np.zeros(ncols)
    if rank > 0:
        beta_perm[:rank] = np.linalg.solve(np.triu(a[:rank, :rank]),
                                           qty[:rank])
    coefficients = np.zeros(ncols)
    coefficients[perm] = beta_perm
    return RegressionFit(coefficients, list(feature_names))


def pearson(x, y) -> Optional[float]:
    """Pearson correlation; None when either input has zero variance."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape[0] != y.shape[0]:
        raise ValueError("inputs must have equal length")
    if x.shape[0] < 2:
        raise ValueError("need at least two observations")
    dx = x - x.mean()
    dy = y - y.mean()
    sx2 = float(np.sum(dx * dx))
    sy2 = float(np.sum(dy * dy))
    if sx2 == 0.0 or sy2 == 0.0:
        return None
    r = float(np.sum(dx * dy)) / math.sqrt(sx2 * sy2)
    return min(1.0, max(-1.0, r))
