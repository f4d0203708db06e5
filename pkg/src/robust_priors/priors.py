"""Prior weight vectors for ridge regression, built from heuristics.

A :class:`PriorSpec` bundles the prior with the diagonal column scaling the
model must be fitted on. Keeping the two together means training and test
rows always go through the same transform.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDirectionError, InputError
from .heuristics import CueStats
from .linear import as_design, fit_shared_scalar, solve_ols

__all__ = [
    "PriorSpec",
    "zero_prior",
    "tal_prior",
    "ttb_transform",
    "ttb_prior",
    "permuted_ols_prior",
    "TTB_PHI",
]

TTB_PHI = 2.0


@dataclass(frozen=True)
class PriorSpec:
    """Prior weights plus the column scaling applied to the design.

    Attributes
    ----------
    label : str
        Prior family: ``"zero"``, ``"tal"``, ``"ttb"`` or ``"permuted_ols"``.
    prior : ndarray
        Target weights, expressed on the transformed design.
    transform : ndarray
        Positive per-column multipliers (all ones unless the family rescales).
    phi : float
        Base of the geometric rank scaling; 1 means no rescaling.
    degenerate : bool
        Set when the requested family could not be built and the zero prior
        was substituted.
    """

    label: str
    prior: np.ndarray
    transform: np.ndarray
    phi: float = 1.0
    degenerate: bool = False

    def __post_init__(self):
        prior = np.array(self.prior, dtype=float)
        transform = np.array(self.transform, dtype=float)
        if prior.ndim != 1 or transform.shape != prior.shape:
            raise InputError("prior and transform must be vectors of equal length")
        if not np.all(np.isfinite(prior)):
            raise InputError("prior contains non-finite entries")
        if not np.all(transform > 0) or not np.all(np.isfinite(transform)):
            raise InputError("transform entries must be finite and positive")
        prior.setflags(write=False)
        transform.setflags(write=False)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "transform", transform)
        object.__setattr__(self, "phi", float(self.phi))

    @property
    def m(self) -> int:
        return int(self.prior.shape[0])

    def apply(self, X) -> np.ndarray:
        """Scale the columns of ``X`` by the stored transform."""
        return np.asarray(X, dtype=float) * self.transform

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "prior": self.prior.tolist(),
            "transform": self.transform.tolist(),
            "phi": self.phi,
            "degenerate": self.degenerate,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "PriorSpec":
        return cls(
            label=d["label"],
            prior=d["prior"],
            transform=d["transform"],
            phi=d.get("phi", 1.0),
            degenerate=d.get("degenerate", False),
        )

    @classmethod
    def from_json(cls, text: str) -> "PriorSpec":
        return cls.from_dict(json.loads(text))


def zero_prior(m: int) -> PriorSpec:
    if m < 1:
        raise InputError("need at least one predictor")
    return PriorSpec("zero", np.zeros(m), np.ones(m))


def _directional_prior(label, X, y, directions, transform, phi) -> PriorSpec:
    m = directions.shape[0]
    try:
        scale = fit_shared_scalar(X, y, directions)
    except DegenerateDirectionError:
        return PriorSpec(label, np.zeros(m), transform, phi, degenerate=True)
    return PriorSpec(label, directions * scale, transform, phi)


def tal_prior(X, y, stats: CueStats) -> PriorSpec:
    """Cue directions times one least-squares scale shared by all cues."""
    X = as_design(X)
    return _directional_prior("tal", X, y, stats.directions, np.ones(stats.m), 1.0)


def ttb_transform(X, stats: CueStats, phi: float = TTB_PHI) -> np.ndarray:
    """Multiply column ``j`` of ``X`` by ``phi ** rank_j``."""
    if not phi > 0:
        raise InputError(f"phi must be positive, got {phi}")
    return as_design(X) * _rank_scaling(stats, phi)


def _rank_scaling(stats: CueStats, phi: float) -> np.ndarray:
    return float(phi) ** stats.ranks.astype(float)


def ttb_prior(X, y, stats: CueStats, phi: float = TTB_PHI) -> tuple[PriorSpec, np.ndarray]:
    """Take-the-best prior and the rescaled design it applies to.

    The shared scale is fitted on the rescaled design, so the returned prior
    is only meaningful together with ``X_ttb`` (or ``spec.apply(X)``).
    """
    X_ttb = ttb_transform(X, stats, phi)
    spec = _directional_prior("ttb", X_ttb, y, stats.directions, _rank_scaling(stats, phi), phi)
    return spec, X_ttb


def permuted_ols_prior(X, y, rng: np.random.Generator) -> PriorSpec:
    """Least-squares weights in a random order; a control with no structure."""
    w = solve_ols(X, y)
    return PriorSpec("permuted_ols", rng.permutation(w), np.ones(w.shape[0]))
