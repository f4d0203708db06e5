"""Cue validities and the tallying / take-the-best decision rules.

Rows are paired comparisons coded over ``{-1, 0, +1}``: a negative cue value
favours the left option, a positive value the right one, zero means the cue
does not discriminate. Outcomes are ``-1`` (left) or ``+1`` (right).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ContractError, InputError

__all__ = [
    "Choice",
    "CueStats",
    "check_ternary",
    "check_signs",
    "cue_validities",
    "cue_stats",
    "tal_choices",
    "ttb_choices",
    "tal_predict",
    "ttb_predict",
    "choice_scores",
    "heuristic_accuracy",
    "RULES",
]


class Choice(enum.IntEnum):
    LEFT = -1
    TIE = 0
    RIGHT = 1


def check_ternary(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
        raise ContractError(f"expected a non-empty 2-D cue matrix, got shape {X.shape}")
    if not np.all(np.isin(X, (-1.0, 0.0, 1.0))):
        raise InputError("cue values must lie in {-1, 0, +1}")
    return X


def check_signs(y, n: int | None = None) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or (n is not None and y.shape[0] != n):
        raise ContractError(f"outcome vector has shape {y.shape}, expected ({n},)")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise InputError("outcomes must be -1 or +1")
    return y


def cue_validities(X, y) -> np.ndarray:
    """Per-cue ``(R - W) / (R + W)`` over the rows where the cue discriminates.

    ``R`` counts rows whose cue sign equals the outcome, ``W`` the rest of the
    discriminating rows. A cue that never discriminates gets validity 0.
    """
    X = check_ternary(X)
    y = check_signs(y, X.shape[0])
    active = X != 0
    right = np.sum(active & (X == y[:, None]), axis=0)
    total = np.sum(active, axis=0)
    wrong = total - right
    out = np.zeros(X.shape[1])
    seen = total > 0
    out[seen] = (right[seen] - wrong[seen]) / total[seen]
    return out


def _ascending_ranks(validities: np.ndarray) -> np.ndarray:
    # stable sort: among equal |v| the lower column index gets the lower rank
    order = np.argsort(np.abs(validities), kind="stable")
    ranks = np.empty(validities.shape[0], dtype=int)
    ranks[order] = np.arange(validities.shape[0])
    return ranks


@dataclass(frozen=True)
class CueStats:
    """Validities, directions (signs) and ascending ``|validity|`` ranks."""

    validities: np.ndarray
    directions: np.ndarray
    ranks: np.ndarray

    @classmethod
    def from_validities(cls, validities) -> "CueStats":
        v = np.asarray(validities, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise ContractError("validities must be a non-empty vector")
        if np.any(np.abs(v) > 1):
            raise InputError("validities must lie in [-1, 1]")
        v = v.copy()
        directions = np.sign(v)
        ranks = _ascending_ranks(v)
        for a in (v, directions, ranks):
            a.setflags(write=False)
        return cls(v, directions, ranks)

    @property
    def m(self) -> int:
        return int(self.validities.shape[0])


def cue_stats(X, y) -> CueStats:
    return CueStats.from_validities(cue_validities(X, y))


def tal_choices(X, stats: CueStats) -> np.ndarray:
    """Tallying choices for every row of ``X`` as ints in ``{-1, 0, +1}``."""
    X = check_ternary(X)
    if X.shape[1] != stats.m:
        raise ContractError(f"{X.shape[1]} cues given, statistics cover {stats.m}")
    votes = np.sign(X * stats.validities)
    return np.sign(votes.sum(axis=1)).astype(int)


def ttb_choices(X, stats: CueStats) -> np.ndarray:
    """Take-the-best choices for every row of ``X``.

    The highest-ranked discriminating cue decides, voting in the direction of
    its validity. Rows with no discriminating cue, or whose best cue has zero
    validity, are ties.
    """
    X = check_ternary(X)
    if X.shape[1] != stats.m:
        raise ContractError(f"{X.shape[1]} cues given, statistics cover {stats.m}")
    keyed = np.where(X != 0, stats.ranks[None, :], -1)
    best = np.argmax(keyed, axis=1)
    rows = np.arange(X.shape[0])
    return (np.sign(X[rows, best]) * stats.directions[best]).astype(int)


def tal_predict(x, stats: CueStats) -> Choice:
    return Choice(int(tal_choices(np.atleast_2d(x), stats)[0]))


def ttb_predict(x, stats: CueStats) -> Choice:
    return Choice(int(ttb_choices(np.atleast_2d(x), stats)[0]))


def choice_scores(choices, y) -> np.ndarray:
    """1 for a correct choice, 0 for a wrong one, 0.5 for a tie."""
    choices = np.asarray(choices)
    y = np.asarray(y)
    return np.where(choices == 0, 0.5, (choices == y).astype(float))


RULES: dict[str, Callable[[np.ndarray, CueStats], np.ndarray]] = {
    "tal": tal_choices,
    "ttb": ttb_choices,
}


def heuristic_accuracy(X_test, y_test, stats: CueStats, rule) -> float:
    """Mean test score of a heuristic, with ties credited at 0.5.

    ``rule`` is ``"tal"``, ``"ttb"`` or a callable with the signature of
    :func:`tal_choices`.
    """
    X_test = check_ternary(X_test)
    y_test = check_signs(y_test, X_test.shape[0])
    if isinstance(rule, str):
        try:
            rule = RULES[rule]
        except KeyError:
            raise InputError(f"unknown heuristic {rule!r}") from None
    return float(np.mean(choice_scores(rule(X_test, stats), y_test)))
