"""Canonical double-gamma haemodynamic response, peak-normalized."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy import optimize, stats

PEAK_DELAY = 6.0
UNDER_DELAY = 16.0
PEAK_DISP = 1.0
UNDER_DISP = 1.0
UNDER_RATIO = 1.0 / 6.0


def _raw(t, which="pdf"):
    f = getattr(stats.gamma, which)
    t = np.asarray(t, dtype=float)
    peak = f(t, PEAK_DELAY / PEAK_DISP, scale=PEAK_DISP)
    under = f(t, UNDER_DELAY / UNDER_DISP, scale=UNDER_DISP)
    return peak - UNDER_RATIO * under


@lru_cache(maxsize=1)
def _peak_value() -> float:
    res = optimize.minimize_scalar(lambda t: -_raw(t), bounds=(1.0, 12.0), method="bounded",
                                   options={"xatol": 1e-10})
    return float(-res.fun)


def double_gamma_hrf(t):
    """HRF amplitude at times ``t`` (seconds), with a maximum of exactly 1.

    Negative times give 0.
    """
    t = np.asarray(t, dtype=float)
    out = np.where(t > 0, _raw(np.maximum(t, 0.0)), 0.0) / _peak_value()
    return float(out) if out.ndim == 0 else out


def hrf_integral(t):
    """``int_0^t double_gamma_hrf(u) du``; zero for ``t <= 0``."""
    t = np.asarray(t, dtype=float)
    return np.where(t > 0, _raw(np.maximum(t, 0.0), "cdf"), 0.0) / _peak_value()
