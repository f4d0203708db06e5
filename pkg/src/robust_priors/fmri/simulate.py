"""Simulated BOLD volumes with known per-trial weights.

Per iteration the stimulus means and the voxel covariance are drawn once and
shared by all runs; each run then draws its own trial weights, trial order,
event schedule and scanner noise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage, stats

from ..errors import NumericalError
from .config import SimConfig
from .design import build_design_lsa, event_schedule

__all__ = [
    "FWHM_TO_SIGMA",
    "GroundTruth",
    "RunTruth",
    "FmriScene",
    "sample_covariance",
    "sample_ground_truth",
    "smoothing_sigmas",
    "smooth_noise",
    "simulate",
]

FWHM_TO_SIGMA = 1.0 / (2.0 * np.sqrt(2.0 * np.log(2.0)))
MAX_COV_DRAWS = 10


@dataclass(frozen=True)
class RunTruth:
    M: np.ndarray  # (trials, d**3), rows in presentation order
    stimulus: np.ndarray  # (trials,) stimulus index of each trial
    Psi: np.ndarray  # (trials, d, d, d)
    Omega: np.ndarray  # (trials, 3d, 3d, 3d)


@dataclass(frozen=True)
class GroundTruth:
    mu: np.ndarray  # (n_stimuli, d**3)
    Sigma: np.ndarray  # (d**3, d**3)
    effect_center: tuple
    runs: tuple

    def signal_slices(self, d: int) -> tuple:
        return tuple(slice(c - 1, c - 1 + d) for c in self.effect_center)


@dataclass(frozen=True)
class FmriScene:
    X_lsa: np.ndarray  # (n, trials)
    Psi: np.ndarray
    Omega: np.ndarray
    Y: np.ndarray  # (n, 3d, 3d, 3d)
    effect_center: tuple

    def signal_series(self) -> np.ndarray:
        """Time series of the signal voxels, shape (n, d**3), row-major voxel order."""
        d = self.Psi.shape[1]
        sl = tuple(slice(c - 1, c - 1 + d) for c in self.effect_center)
        return self.Y[(slice(None),) + sl].reshape(self.Y.shape[0], -1)


def sample_covariance(cfg: SimConfig, rng: np.random.Generator) -> np.ndarray:
    """Draw ``W(V, df) / df`` with ``df = d**3`` and equicorrelated ``V``."""
    p = cfg.d**3
    V = np.full((p, p), cfg.v_offdiag)
    np.fill_diagonal(V, 1.0)
    dist = stats.wishart(df=p, scale=V)
    for _ in range(MAX_COV_DRAWS):
        S = np.atleast_2d(dist.rvs(random_state=rng)) / p
        try:
            np.linalg.cholesky(S)
        except np.linalg.LinAlgError:
            continue
        return S
    raise NumericalError(f"no positive definite covariance in {MAX_COV_DRAWS} draws")


def sample_ground_truth(cfg: SimConfig, rng: np.random.Generator) -> GroundTruth:
    d, p = cfg.d, cfg.d**3
    mu = rng.normal(0.0, np.sqrt(cfg.sigma2_psi), size=(cfg.n_stimuli, p))
    Sigma = sample_covariance(cfg, rng)
    L = np.linalg.cholesky(Sigma)
    center = tuple(int(c) for c in rng.integers(cfg.center_low, cfg.center_high + 1, size=3))
    sl = tuple(slice(c - 1, c - 1 + d) for c in center)
    runs = []
    for _ in range(cfg.runs):
        stim = np.repeat(np.arange(cfg.n_stimuli), cfg.reps_per_stim)
        z = rng.standard_normal((stim.size, p))
        M = mu[stim] + z @ L.T
        order = rng.permutation(stim.size)
        M, stim = M[order], stim[order]
        Psi = M.reshape(stim.size, d, d, d)
        Omega = np.zeros((stim.size,) + cfg.volume_shape)
        Omega[(slice(None),) + sl] = Psi
        runs.append(RunTruth(M, stim, Psi, Omega))
    return GroundTruth(mu, Sigma, center, tuple(runs))


def smoothing_sigmas(cfg: SimConfig) -> np.ndarray:
    """Gaussian widths in samples along (time, x, y, z)."""
    fwhm = np.array([cfg.fwhm_s / cfg.TR] + [cfg.fwhm_mm / v for v in cfg.voxel_mm])
    return fwhm * FWHM_TO_SIGMA


def smooth_noise(E, cfg: SimConfig) -> np.ndarray:
    """Separable Gaussian filter over the time and three spatial axes."""
    return ndimage.gaussian_filter(np.asarray(E, dtype=float), smoothing_sigmas(cfg), mode="reflect")


def simulate(cfg: SimConfig, rng: np.random.Generator, truth: GroundTruth | None = None) -> tuple[GroundTruth, list]:
    """Ground truth plus one :class:`FmriScene` per run."""
    if truth is None:
        truth = sample_ground_truth(cfg, rng)
    scenes = []
    n = cfg.n_scans
    for run in truth.runs:
        X = build_design_lsa(cfg, event_schedule(cfg, rng))
        signal = (X @ run.Omega.reshape(run.Omega.shape[0], -1)).reshape((n,) + cfg.volume_shape)
        if cfg.sigma2_scanner > 0:
            E = rng.normal(0.0, np.sqrt(cfg.sigma2_scanner), size=signal.shape)
            Y = signal + smooth_noise(E, cfg)
        else:
            Y = signal
        scenes.append(FmriScene(X, run.Psi, run.Omega, Y, truth.effect_center))
    return truth, scenes
