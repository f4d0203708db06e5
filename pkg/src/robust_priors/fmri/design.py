"""Event schedules and the one-regressor-per-trial design matrix."""

from __future__ import annotations

import numpy as np

from ..errors import InputError
from .config import SimConfig
from .hrf import hrf_integral

__all__ = ["event_schedule", "build_design_lsa"]


def event_schedule(cfg: SimConfig, rng: np.random.Generator) -> np.ndarray:
    """Trial onsets (seconds) with null epochs placed in random slots.

    The run is a sequence of ``n_trials + n_null`` slots of length
    ``ED + ISI``; null slots are chosen uniformly without replacement.
    """
    n_slots = cfg.n_trials + cfg.n_null
    null = rng.choice(n_slots, size=cfg.n_null, replace=False)
    trial_slots = np.setdiff1d(np.arange(n_slots), null)
    return trial_slots * cfg.slot


def build_design_lsa(cfg: SimConfig, onsets) -> np.ndarray:
    """Boxcar-convolved HRF regressors sampled every ``TR``, one per trial.

    The convolution of a boxcar ``[o, o + ED)`` with the HRF is evaluated
    exactly as a difference of the HRF's running integral.
    """
    onsets = np.asarray(onsets, dtype=float)
    if onsets.ndim != 1 or onsets.size < 1:
        raise InputError("need a 1-D array of onsets")
    if np.any(np.diff(np.sort(onsets)) < cfg.ED - 1e-12):
        raise InputError("events overlap")
    n = cfg.n_scans
    if onsets.min() < 0 or onsets.max() + cfg.ED > n * cfg.TR:
        raise InputError(f"events extend beyond the {n * cfg.TR:g} s acquisition")
    t = np.arange(n)[:, None] * cfg.TR
    lag = t - onsets[None, :]
    return hrf_integral(lag) - hrf_integral(lag - cfg.ED)
