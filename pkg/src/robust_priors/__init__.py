"""Ridge and logistic regression shrunk toward heuristic priors."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    ContractError,
    DegenerateDirectionError,
    InputError,
    NumericalError,
    RobustPriorsError,
)
from .heuristics import Choice, CueStats, cue_stats, cue_validities, heuristic_accuracy, tal_predict, ttb_predict
from .linear import fit_shared_scalar, solve_ols, solve_ridge_with_prior
from .logistic import NewtonTrace, fit_logistic_ridge, fit_logistic_scale, logistic_prior, predict_proba
from .priors import PriorSpec, permuted_ols_prior, tal_prior, ttb_prior, ttb_transform, zero_prior

__all__ = [
    "ConfigError",
    "ContractError",
    "DegenerateDirectionError",
    "InputError",
    "NumericalError",
    "RobustPriorsError",
    "Choice",
    "CueStats",
    "cue_stats",
    "cue_validities",
    "heuristic_accuracy",
    "tal_predict",
    "ttb_predict",
    "fit_shared_scalar",
    "solve_ols",
    "solve_ridge_with_prior",
    "NewtonTrace",
    "fit_logistic_ridge",
    "fit_logistic_scale",
    "logistic_prior",
    "predict_proba",
    "PriorSpec",
    "permuted_ols_prior",
    "tal_prior",
    "ttb_prior",
    "ttb_transform",
    "zero_prior",
]
