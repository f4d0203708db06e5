"""Logistic regression penalized toward a prior, fitted by damped Newton.

The objective maximized is the log-likelihood minus
``0.5 * theta * ||w - prior||^2``. Labels are 0/1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg
from scipy.special import expit

from .errors import ContractError, DegenerateDirectionError, InputError, NumericalError
from .linear import PINV_RCOND, as_design
from .priors import PriorSpec

__all__ = [
    "SCALE_JITTER",
    "NewtonTrace",
    "log_likelihood",
    "penalized_objective",
    "penalized_gradient",
    "fit_logistic_scale",
    "logistic_prior",
    "fit_logistic_ridge",
    "predict_proba",
    "to01",
]

#: Ridge on the scalar in the direction-constrained fit; keeps it finite
#: when the data are separable along that direction.
SCALE_JITTER = 1e-4

MAX_ITER = 100
MAX_HALVINGS = 60
STEP_FLOOR = 8 * np.finfo(float).eps


@dataclass(frozen=True)
class NewtonTrace:
    iterations: int
    final_gradient_norm: float
    converged: bool


def to01(y) -> np.ndarray:
    """Map -1/+1 outcomes onto 0/1 labels."""
    y = np.asarray(y, dtype=float)
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise InputError("outcomes must be -1 or +1")
    return (y > 0).astype(float)


def _check_labels(y01, n: int) -> np.ndarray:
    y01 = np.asarray(y01, dtype=float)
    if y01.shape != (n,):
        raise ContractError(f"labels have shape {y01.shape}, expected ({n},)")
    if not np.all(np.isin(y01, (0.0, 1.0))):
        raise InputError("labels must be 0 or 1")
    return y01


def log_likelihood(X, y01, w) -> float:
    eta = np.asarray(X, float) @ np.asarray(w, float)
    # log p(y=1) = -log(1 + e^-eta), log p(y=0) = -log(1 + e^eta)
    return float(-np.sum(np.logaddexp(0.0, np.where(y01 > 0, -eta, eta))))


def penalized_objective(X, y01, prior, theta, w) -> float:
    d = np.asarray(w, float) - np.asarray(prior, float)
    return log_likelihood(X, y01, w) - 0.5 * theta * float(d @ d)


def penalized_gradient(X, y01, prior, theta, w) -> np.ndarray:
    X = np.asarray(X, float)
    w = np.asarray(w, float)
    return X.T @ (y01 - expit(X @ w)) - theta * (w - np.asarray(prior, float))


def fit_logistic_scale(X, y01, q) -> float:
    """Maximum-likelihood scalar ``s`` for weights ``s * q``.

    A jitter of ``SCALE_JITTER * s**2 / 2`` is subtracted from the
    log-likelihood so that the optimum is finite under separation.
    """
    X = as_design(X)
    y01 = _check_labels(y01, X.shape[0])
    q = np.asarray(q, dtype=float)
    if q.shape != (X.shape[1],):
        raise ContractError(f"direction has shape {q.shape}, expected ({X.shape[1]},)")
    z = X @ q
    if not np.any(z):
        raise DegenerateDirectionError("X @ q is identically zero")

    def objective(s):
        return log_likelihood(z[:, None], y01, [s]) - 0.5 * SCALE_JITTER * s * s

    s = 0.0
    f = objective(s)
    for _ in range(MAX_ITER):
        p = expit(z * s)
        g = float(z @ (y01 - p)) - SCALE_JITTER * s
        h = float(np.sum(z * z * p * (1.0 - p))) + SCALE_JITTER
        if abs(g) < 1e-12 * (1.0 + len(z)):
            break
        step = g / h
        for _ in range(MAX_HALVINGS):
            f_new = objective(s + step)
            if f_new >= f:
                break
            step *= 0.5
        else:
            break
        s, f = s + step, f_new
    return s


def logistic_prior(scale: float, q, label: str = "tal", transform=None, phi: float = 1.0) -> PriorSpec:
    """Prior ``q * |scale|`` for the logistic model."""
    q = np.asarray(q, dtype=float)
    if transform is None:
        transform = np.ones(q.shape[0])
    return PriorSpec(label, q * abs(float(scale)), transform, phi)


def _newton_step(X, s, theta, g):
    H = (X.T * s) @ X
    H[np.diag_indices_from(H)] += theta
    try:
        return linalg.cho_solve(linalg.cho_factor(H, lower=True, check_finite=False), g)
    except linalg.LinAlgError:
        return np.linalg.lstsq(H, g, rcond=PINV_RCOND)[0]


def fit_logistic_ridge(X, y01, prior, theta: float, w0=None, tol=None) -> tuple[np.ndarray, NewtonTrace]:
    """Maximize the penalized log-likelihood by damped Newton-Raphson.

    Parameters
    ----------
    X : array_like, shape (n, m)
    y01 : array_like, shape (n,)
        Labels in {0, 1}.
    prior : array_like, shape (m,)
    theta : float
        Penalty strength, ``>= 0``.
    w0 : array_like, optional
        Starting point; defaults to ``prior``. Warm starts along a penalty
        path reach the same optimum for ``theta > 0``.
    tol : float, optional
        Gradient-norm threshold; defaults to ``1e-8 * (1 + n)``. The fit
        also stops once the Newton step is below working precision.

    Returns
    -------
    w : ndarray, shape (m,)
    trace : NewtonTrace
        ``converged`` is False when the iteration cap was hit, which is the
        expected outcome for separable data at ``theta == 0``.
    """
    X = as_design(X)
    n, m = X.shape
    y01 = _check_labels(y01, n)
    prior = np.asarray(prior, dtype=float)
    if prior.shape != (m,):
        raise ContractError(f"prior has shape {prior.shape}, expected ({m},)")
    theta = float(theta)
    if not np.isfinite(theta) or theta < 0:
        raise InputError(f"theta must be finite and non-negative, got {theta}")
    if tol is None:
        tol = 1e-8 * (1 + n)

    w = prior.copy() if w0 is None else np.array(w0, dtype=float)
    f = penalized_objective(X, y01, prior, theta, w)
    if not np.isfinite(f):
        raise NumericalError("non-finite objective at the starting point")
    it = 0
    while True:
        p = expit(X @ w)
        g = X.T @ (y01 - p) - theta * (w - prior)
        gnorm = float(np.linalg.norm(g))
        if gnorm < tol:
            return w, NewtonTrace(it, gnorm, True)
        if it >= MAX_ITER:
            return w, NewtonTrace(it, gnorm, False)
        step = _newton_step(X, p * (1.0 - p), theta, g)
        if np.max(np.abs(step)) <= STEP_FLOOR * (1.0 + np.max(np.abs(w))):
            # at large theta, rounding in theta * (w - prior) keeps the
            # gradient above tol even though w can no longer move
            return w, NewtonTrace(it, gnorm, True)
        for _ in range(MAX_HALVINGS):
            w_new = w + step
            f_new = penalized_objective(X, y01, prior, theta, w_new)
            if not np.isfinite(f_new):
                raise NumericalError("non-finite objective during line search")
            if f_new >= f:
                break
            step = 0.5 * step
        else:
            # no ascent possible at working precision
            return w, NewtonTrace(it, gnorm, False)
        w, f = w_new, f_new
        it += 1


def predict_proba(w, x) -> np.ndarray | float:
    """Sigmoid of ``x @ w`` for one row or a matrix of rows."""
    out = expit(np.asarray(x, dtype=float) @ np.asarray(w, dtype=float))
    return float(out) if np.ndim(out) == 0 else out
