"""Simulated fMRI trial-wise estimation: LSA, LSS and LSS-prior ridge."""

from .config import SimConfig
from .design import build_design_lsa, event_schedule
from .estimators import estimate_lsa, estimate_lss, estimate_lss_prior, rmse, score_rmse
from .experiment import CellResult, EstimatorReport, run_cell, run_grid
from .hrf import double_gamma_hrf
from .simulate import FmriScene, sample_ground_truth, simulate, smooth_noise

__all__ = [
    "SimConfig",
    "build_design_lsa",
    "event_schedule",
    "estimate_lsa",
    "estimate_lss",
    "estimate_lss_prior",
    "rmse",
    "score_rmse",
    "CellResult",
    "EstimatorReport",
    "run_cell",
    "run_grid",
    "double_gamma_hrf",
    "FmriScene",
    "sample_ground_truth",
    "simulate",
    "smooth_noise",
]
