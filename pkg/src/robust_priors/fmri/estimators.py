"""Per-trial weight estimators for voxel time series.

All estimators take the design ``X`` of shape (n, trials) and either one
voxel series of length n or a matrix (n, voxels); outputs are (trials,) or
(trials, voxels) accordingly.
"""

from __future__ import annotations

import numpy as np

from ..errors import InputError
from ..linear import PINV_RCOND, solve_ols, solve_ridge_with_prior

__all__ = ["estimate_lsa", "estimate_lss", "estimate_lss_prior", "rmse", "score_rmse"]


def estimate_lsa(X, y) -> np.ndarray:
    """One regressor per trial, all trials in a single least-squares fit."""
    return solve_ols(X, y)


def estimate_lss(X, y, return_flags: bool = False):
    """Least squares separate: one two-regressor fit per trial.

    For trial ``k`` the design is ``[x_k, sum_{j != k} x_j]``; only the first
    coefficient is kept. Trials whose two columns are collinear are solved by
    pseudoinverse and reported in the optional flag vector.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[1] < 2:
        raise InputError("LSS needs at least two trial regressors")
    single = y.ndim == 1
    Y = y[:, None] if single else y
    total = X.sum(axis=1)
    others = total[:, None] - X
    aa = np.einsum("ij,ij->j", X, X)
    bb = np.einsum("ij,ij->j", others, others)
    ab = np.einsum("ij,ij->j", X, others)
    aY = X.T @ Y
    bY = others.T @ Y
    det = aa * bb - ab * ab
    flags = det <= PINV_RCOND**2 * aa * bb
    safe = np.where(flags, 1.0, det)
    W = (bb[:, None] * aY - ab[:, None] * bY) / safe[:, None]
    for k in np.flatnonzero(flags):
        W[k] = np.linalg.pinv(np.column_stack([X[:, k], others[:, k]]), rcond=PINV_RCOND)[0] @ Y
    W = W[:, 0] if single else W
    return (W, flags) if return_flags else W


def estimate_lss_prior(X, y, w_lss, theta: float) -> np.ndarray:
    """Single-model fit shrunk toward the LSS estimates with penalty ``theta``."""
    return solve_ridge_with_prior(X, y, w_lss, theta)


def rmse(W_hat, Psi) -> np.ndarray:
    """Per-voxel root mean squared error over trials (axis 0)."""
    W_hat = np.asarray(W_hat, dtype=float)
    Psi = np.asarray(Psi, dtype=float)
    if W_hat.shape != Psi.shape:
        raise InputError(f"shape mismatch {W_hat.shape} vs {Psi.shape}")
    return np.sqrt(np.mean((W_hat - Psi) ** 2, axis=0))


def score_rmse(W_hat, Psi) -> float:
    """RMSE averaged over all signal voxels."""
    return float(np.mean(rmse(W_hat, Psi)))
