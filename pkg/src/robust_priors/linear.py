"""Closed-form least squares and ridge regression toward a prior vector.

Every solver here accepts a single response vector ``y`` of length ``n`` or a
stack of responses as an ``(n, k)`` matrix; the latter is what the voxel-wise
fMRI estimators use.
"""

from __future__ import annotations

import numpy as np
from scipy import linalg

from .errors import ContractError, DegenerateDirectionError, InputError

__all__ = [
    "PINV_RCOND",
    "as_design",
    "solve_ols",
    "solve_ridge_with_prior",
    "fit_shared_scalar",
    "ridge_objective",
    "ridge_gradient",
]

#: Relative singular-value cutoff for the minimum-norm solution.
PINV_RCOND = 1e-10


def as_design(X) -> np.ndarray:
    """Return ``X`` as a finite 2-D float array with at least one row and column."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ContractError(f"design matrix must be 2-D, got shape {X.shape}")
    if X.shape[0] < 1 or X.shape[1] < 1:
        raise ContractError(f"design matrix must be non-empty, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InputError("design matrix contains non-finite entries")
    return X


def _as_response(y, n: int) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim not in (1, 2) or y.shape[0] != n:
        raise ContractError(f"response has shape {y.shape}, expected ({n},) or ({n}, k)")
    if not np.all(np.isfinite(y)):
        raise InputError("response contains non-finite entries")
    return y


def solve_ols(X, y) -> np.ndarray:
    """Least-squares weights, minimum-norm when ``X`` is rank deficient.

    Singular values below ``PINV_RCOND * sigma_max`` are treated as zero.
    """
    X = as_design(X)
    y = _as_response(y, X.shape[0])
    return np.linalg.pinv(X, rcond=PINV_RCOND) @ y


def _broadcast_prior(prior, m: int, y: np.ndarray) -> np.ndarray:
    prior = np.asarray(prior, dtype=float)
    if prior.shape[0] != m or prior.ndim > y.ndim:
        raise ContractError(f"prior has shape {prior.shape}, expected leading dimension {m}")
    if not np.all(np.isfinite(prior)):
        raise InputError("prior contains non-finite entries")
    if y.ndim == 2 and prior.ndim == 1:
        prior = np.repeat(prior[:, None], y.shape[1], axis=1)
    return prior


def solve_ridge_with_prior(X, y, prior, theta: float) -> np.ndarray:
    """Minimize ``||y - X w||^2 + theta * ||w - prior||^2``.

    Parameters
    ----------
    X : array_like, shape (n, m)
    y : array_like, shape (n,) or (n, k)
    prior : array_like, shape (m,) or (m, k)
        Target the weights are shrunk toward. A 1-D prior is shared by every
        response column.
    theta : float
        Non-negative penalty. ``theta == 0`` defers to :func:`solve_ols`.

    Returns
    -------
    ndarray, shape (m,) or (m, k)
    """
    X = as_design(X)
    y = _as_response(y, X.shape[0])
    m = X.shape[1]
    prior = _broadcast_prior(prior, m, y)
    theta = float(theta)
    if not np.isfinite(theta) or theta < 0:
        raise InputError(f"theta must be finite and non-negative, got {theta}")
    if theta == 0.0:
        return solve_ols(X, y)

    A = X.T @ X
    A[np.diag_indices_from(A)] += theta
    b = X.T @ y + theta * prior
    try:
        return linalg.cho_solve(linalg.cho_factor(A, lower=True, check_finite=False), b)
    except linalg.LinAlgError:
        return np.linalg.pinv(A, rcond=PINV_RCOND, hermitian=True) @ b


def ridge_objective(X, y, prior, theta: float, w) -> float:
    r = np.asarray(y, float) - np.asarray(X, float) @ w
    d = np.asarray(w, float) - np.asarray(prior, float)
    return float(r @ r + theta * d @ d)


def ridge_gradient(X, y, prior, theta: float, w) -> np.ndarray:
    X = np.asarray(X, float)
    w = np.asarray(w, float)
    return 2.0 * X.T @ (X @ w - np.asarray(y, float)) + 2.0 * theta * (w - np.asarray(prior, float))


def fit_shared_scalar(X, y, q) -> float:
    """Best single coefficient ``s`` for the constrained weights ``q * s``.

    Raises
    ------
    DegenerateDirectionError
        If ``X @ q`` is the zero vector, so every ``s`` fits equally well.
    """
    X = as_design(X)
    y = _as_response(y, X.shape[0])
    q = np.asarray(q, dtype=float)
    if q.shape != (X.shape[1],):
        raise ContractError(f"direction has shape {q.shape}, expected ({X.shape[1]},)")
    z = X @ q
    zz = float(z @ z)
    if zz == 0.0:
        raise DegenerateDirectionError("X @ q is identically zero")
    return float(z @ y) / zz
