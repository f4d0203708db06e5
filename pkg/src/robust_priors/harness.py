"""Train/test penalty sweeps for the paired-comparison and classification tasks.

A sweep repeatedly samples a training set, derives cue statistics and priors
from the training rows only, fits every model across a grid of penalties and
scores the held-out rows.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import ConfigError, ContractError, DegenerateDirectionError, InputError
from .heuristics import CueStats, check_signs, check_ternary, choice_scores, cue_stats, tal_choices, ttb_choices
from .linear import solve_ridge_with_prior
from .logistic import fit_logistic_ridge, fit_logistic_scale, logistic_prior, to01
from .priors import TTB_PHI, PriorSpec, permuted_ols_prior, tal_prior, ttb_prior, ttb_transform, zero_prior

__all__ = [
    "MODELS",
    "FAMILIES",
    "TernaryDataset",
    "SweepConfig",
    "PenaltySweepResult",
    "default_theta_grid",
    "check_theta_grid",
    "median_split",
    "pairwise_encode",
    "normalized_entropy",
    "split_indices",
    "fit_priors",
    "run_sweep",
]

MODELS = ("zero", "tal", "ttb", "permuted_ols")
FAMILIES = ("logistic", "linear")
KINDS = ("paired", "classification")
MAX_RESAMPLES = 1000


def default_theta_grid() -> np.ndarray:
    """Zero followed by 30 log-spaced penalties from 1e-3 to 1e6."""
    return np.concatenate([[0.0], np.logspace(-3, 6, 30)])


def check_theta_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 1 or grid[0] != 0.0:
        raise ConfigError("theta grid must start at 0")
    if np.any(np.diff(grid) <= 0) or not np.all(np.isfinite(grid)):
        raise ConfigError("theta grid must be strictly ascending and finite")
    return grid


@dataclass(frozen=True)
class TernaryDataset:
    X: np.ndarray
    y: np.ndarray
    cue_names: tuple
    kind: str = "paired"

    def __post_init__(self):
        X = check_ternary(self.X)
        y = check_signs(self.y, X.shape[0])
        if self.kind not in KINDS:
            raise InputError(f"unknown dataset kind {self.kind!r}")
        names = tuple(self.cue_names) if self.cue_names else tuple(f"cue{j}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise ContractError(f"{len(names)} cue names for {X.shape[1]} cues")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "cue_names", names)

    @property
    def n(self) -> int:
        return int(self.X.shape[0])

    @property
    def m(self) -> int:
        return int(self.X.shape[1])


def median_split(values, kind: str = "classification") -> tuple[np.ndarray, np.ndarray]:
    """Dichotomize each column at its median.

    ``kind="paired"`` codes values strictly above the median as 1 and the rest
    as 0; ``kind="classification"`` codes above/equal/below as +1/0/-1.

    Returns
    -------
    coded : ndarray
    constant : ndarray of bool
        Columns without any spread; they code to all zeros.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise ContractError(f"expected a 2-D table, got shape {values.shape}")
    if not np.all(np.isfinite(values)):
        raise InputError("table contains non-finite values")
    med = np.median(values, axis=0)
    constant = np.all(values == values[:1], axis=0)
    if kind == "paired":
        coded = (values > med).astype(float)
    elif kind == "classification":
        coded = np.sign(values - med)
    else:
        raise InputError(f"unknown median-split kind {kind!r}")
    coded[:, constant] = 0.0
    return coded, constant


def pairwise_encode(items, criterion, rng=None, cue_names=None) -> TernaryDataset:
    """Encode every pair of items with distinct criteria as one comparison.

    Each unordered pair appears once. With ``rng`` given, a coin flip decides
    which item sits on the right; otherwise the later item does. The row is
    ``right - left`` and the outcome is +1 when the right item has the larger
    criterion.
    """
    items = np.asarray(items, dtype=float)
    criterion = np.asarray(criterion, dtype=float)
    if items.ndim != 2 or criterion.shape != (items.shape[0],):
        raise ContractError("items must be (N, m) with one criterion value per item")
    if items.shape[0] < 2:
        raise InputError("need at least two items to form pairs")
    i, j = np.triu_indices(items.shape[0], k=1)
    keep = criterion[i] != criterion[j]
    i, j = i[keep], j[keep]
    if i.size == 0:
        raise InputError("all items share one criterion value; no informative pairs")
    if rng is not None:
        flip = rng.random(i.size) < 0.5
        i, j = np.where(flip, j, i), np.where(flip, i, j)
    X = items[j] - items[i]
    y = np.where(criterion[j] > criterion[i], 1.0, -1.0)
    return TernaryDataset(X, y, cue_names, "paired")


def normalized_entropy(w, ranks=None, phi: float = 1.0) -> float:
    """Shannon entropy (bits) of rank-scaled absolute weights over ``log2 m``.

    The weights ``|w_j| / ||w||_1 * phi**rank_j`` are renormalized to sum to
    one first, which keeps the result in [0, 1] for ``phi != 1``. A single
    weight has entropy 1 by convention.
    """
    w = np.abs(np.asarray(w, dtype=float))
    if w.ndim != 1 or w.size < 1:
        raise ContractError("weights must be a non-empty vector")
    total = w.sum()
    if not total > 0:
        raise InputError("entropy is undefined for an all-zero weight vector")
    m = w.size
    if m == 1:
        return 1.0
    p = w / total
    if ranks is not None and phi != 1.0:
        p = p * float(phi) ** np.asarray(ranks, dtype=float)
        p = p / p.sum()
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)) / np.log2(m))


@dataclass
class SweepConfig:
    theta_grid: np.ndarray = field(default_factory=default_theta_grid)
    train_size: int = 50
    iterations: int = 1000
    seed: int = 0
    model_set: tuple = MODELS
    family: str = "logistic"

    def __post_init__(self):
        self.theta_grid = check_theta_grid(self.theta_grid)
        if self.iterations < 1:
            raise ConfigError("iterations must be at least 1")
        if self.train_size < 2:
            raise ConfigError("train size must be at least 2")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        self.model_set = tuple(self.model_set)
        unknown = set(self.model_set) - set(MODELS)
        if unknown or not self.model_set:
            raise ConfigError(f"unknown models {sorted(unknown)}; choose from {MODELS}")
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["theta_grid"] = [float(t) for t in self.theta_grid]
        d["model_set"] = list(self.model_set)
        return d


def split_indices(data: TernaryDataset, cfg: SweepConfig, iteration: int) -> tuple[np.ndarray, np.ndarray, np.random.Generator]:
    """Train/test indices for one iteration and the generator for its later draws.

    The generator is seeded from ``(cfg.seed, iteration)`` so iterations are
    independent of execution order.
    """
    if cfg.train_size >= data.n:
        raise ConfigError(f"train size {cfg.train_size} leaves no test rows (n={data.n})")
    rng = np.random.default_rng([int(cfg.seed), int(iteration)])
    for _ in range(MAX_RESAMPLES):
        perm = rng.permutation(data.n)
        train, test = np.sort(perm[: cfg.train_size]), np.sort(perm[cfg.train_size :])
        if data.kind != "classification" or np.unique(data.y[train]).size == 2:
            return train, test, rng
    raise InputError(f"no two-class training set in {MAX_RESAMPLES} draws")


def _logistic_directional(label, X, y01, stats, transform, phi) -> PriorSpec:
    try:
        scale = fit_logistic_scale(X, y01, stats.directions)
    except DegenerateDirectionError:
        return PriorSpec(label, np.zeros(stats.m), transform, phi, degenerate=True)
    return logistic_prior(scale, stats.directions, label, transform, phi)


def fit_priors(X, y, stats: CueStats, models, family: str, rng: np.random.Generator) -> dict[str, PriorSpec]:
    """Build the prior for each requested model from training rows."""
    m = X.shape[1]
    out = {}
    for name in models:
        if name == "zero":
            out[name] = zero_prior(m)
        elif name == "permuted_ols":
            out[name] = permuted_ols_prior(X, y, rng)
        elif family == "linear":
            out[name] = tal_prior(X, y, stats) if name == "tal" else ttb_prior(X, y, stats)[0]
        elif name == "tal":
            out[name] = _logistic_directional("tal", X, to01(y), stats, np.ones(m), 1.0)
        else:
            X_ttb = ttb_transform(X, stats, TTB_PHI)
            out[name] = _logistic_directional("ttb", X_ttb, to01(y), stats, TTB_PHI ** stats.ranks.astype(float), TTB_PHI)
    return out


def _fit_path(X, y, spec: PriorSpec, grid, family) -> np.ndarray:
    """Weights for every penalty in ``grid``, shape (len(grid), m)."""
    Xt = spec.apply(X)
    W = np.empty((grid.size, X.shape[1]))
    if family == "linear":
        for k, theta in enumerate(grid):
            W[k] = solve_ridge_with_prior(Xt, y, spec.prior, theta)
        return W
    y01 = to01(y)
    w = None
    # strongest penalty first: each fit warm-starts the next, weaker one
    for k in range(grid.size - 1, -1, -1):
        w, _ = fit_logistic_ridge(Xt, y01, spec.prior, grid[k], w0=w)
        W[k] = w
    return W


@dataclass
class PenaltySweepResult:
    """Per-iteration scores of a sweep and their aggregates.

    ``accuracy`` and ``entropy`` map model name to arrays of shape
    ``(iterations, len(theta_grid))``; ``agreement`` holds, for the heuristic
    prior models, the share of heuristic non-tie test rows where the model
    makes the same choice. ``heuristic_accuracy`` maps ``"tal"``/``"ttb"`` to
    per-iteration accuracies of the plain rules.
    """

    config: SweepConfig
    accuracy: dict
    entropy: dict
    agreement: dict
    heuristic_accuracy: dict
    degenerate_priors: dict

    @property
    def theta_grid(self) -> np.ndarray:
        return self.config.theta_grid

    def mean_accuracy(self, model: str) -> np.ndarray:
        return self.accuracy[model].mean(axis=0)

    def mean_entropy(self, model: str) -> np.ndarray:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return np.nanmean(self.entropy[model], axis=0)

    def best_worst(self, model: str) -> dict:
        acc = self.mean_accuracy(model)
        b, w = int(np.argmax(acc)), int(np.argmin(acc))
        return {
            "best_theta": float(self.theta_grid[b]),
            "best_accuracy": float(acc[b]),
            "worst_theta": float(self.theta_grid[w]),
            "worst_accuracy": float(acc[w]),
        }

    def rows(self) -> list[tuple]:
        ddof = 1 if self.config.iterations > 1 else 0
        out = []
        for model in self.config.model_set:
            acc, ent = self.accuracy[model], self.entropy[model]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                mean_ent = np.nanmean(ent, axis=0)
                sd_ent = np.nanstd(ent, axis=0, ddof=ddof)
            for k, theta in enumerate(self.theta_grid):
                out.append((model, float(theta), float(acc[:, k].mean()), float(acc[:, k].std(ddof=ddof)),
                            float(mean_ent[k]), float(sd_ent[k])))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["model", "theta", "mean_acc", "sd_acc", "mean_entropy", "sd_entropy"])
        for model, *nums in self.rows():
            w.writerow([model] + [_fmt(x) for x in nums])
        return buf.getvalue()

    def summary(self) -> dict:
        theta_max = len(self.theta_grid) - 1
        return {
            "config": self.config.to_dict(),
            "models": {m: self.best_worst(m) for m in self.config.model_set},
            "heuristics": {h: float(np.mean(a)) for h, a in self.heuristic_accuracy.items()},
            "ols_accuracy": float(self.mean_accuracy(self.config.model_set[0])[0]),
            "agreement_at_max_theta": {m: _finite(_nanmean(a[:, theta_max])) for m, a in self.agreement.items()},
            "degenerate_priors": {m: int(c) for m, c in self.degenerate_priors.items()},
        }

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True) + "\n"


def _fmt(x: float) -> str:
    return "nan" if np.isnan(x) else repr(float(x))


def _nanmean(a) -> float:
    a = a[~np.isnan(a)]
    return float(a.mean()) if a.size else float("nan")


def _finite(x) -> float | None:
    x = float(x)
    return x if np.isfinite(x) else None


def run_sweep(data: TernaryDataset, cfg: SweepConfig) -> PenaltySweepResult:
    """Run ``cfg.iterations`` train/test splits over the penalty grid."""
    grid = cfg.theta_grid
    shape = (cfg.iterations, grid.size)
    accuracy = {m: np.empty(shape) for m in cfg.model_set}
    entropy = {m: np.full(shape, np.nan) for m in cfg.model_set}
    agreement = {m: np.full(shape, np.nan) for m in cfg.model_set if m in ("tal", "ttb")}
    heur = {"tal": np.empty(cfg.iterations), "ttb": np.empty(cfg.iterations)}
    degenerate = {m: 0 for m in cfg.model_set}

    for it in range(cfg.iterations):
        train, test, rng = split_indices(data, cfg, it)
        Xtr, ytr = data.X[train], data.y[train]
        Xte, yte = data.X[test], data.y[test]
        stats = cue_stats(Xtr, ytr)
        heuristic_choice = {"tal": tal_choices(Xte, stats), "ttb": ttb_choices(Xte, stats)}
        for h, ch in heuristic_choice.items():
            heur[h][it] = choice_scores(ch, yte).mean()

        specs = fit_priors(Xtr, ytr, stats, cfg.model_set, cfg.family, rng)
        for model, spec in specs.items():
            degenerate[model] += spec.degenerate
            W = _fit_path(Xtr, ytr, spec, grid, cfg.family)
            choices = np.sign(spec.apply(Xte) @ W.T)
            accuracy[model][it] = choice_scores(choices, yte[:, None]).mean(axis=0)
            phi = spec.phi if model == "ttb" else 1.0
            for k in range(grid.size):
                if np.any(W[k]):
                    entropy[model][it, k] = normalized_entropy(W[k], stats.ranks, phi)
            if model in agreement:
                ref = heuristic_choice[model]
                decided = ref != 0
                if decided.any():
                    agreement[model][it] = (choices[decided] == ref[decided, None]).mean(axis=0)
    return PenaltySweepResult(cfg, accuracy, entropy, agreement, heur, degenerate)
