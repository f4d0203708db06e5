"""CSV loading and synthetic item generators for the sweep harness."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, InputError
from .harness import TernaryDataset, median_split, pairwise_encode

__all__ = [
    "MISSING",
    "Table",
    "read_table",
    "decision_dataset",
    "classification_dataset",
    "planted_items",
]

MISSING = frozenset({"", "?", "na", "nan", "null", "none"})


@dataclass(frozen=True)
class Table:
    """Numeric cue columns plus one target column, complete rows only."""

    cues: np.ndarray
    target: np.ndarray
    cue_names: tuple
    target_name: str
    dropped_rows: int


def read_table(path, target: str, drop_columns=()) -> Table:
    """Parse a headed CSV into cue and target arrays.

    Rows with a missing cue or target value are dropped. Any other
    non-numeric cell is an error that names the offending line.
    """
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        if target not in header:
            raise ConfigError(f"{path}: no column named {target!r}; columns are {header}")
        skip = set(drop_columns)
        missing_skips = skip - set(header)
        if missing_skips:
            raise ConfigError(f"{path}: cannot drop unknown columns {sorted(missing_skips)}")
        t_idx = header.index(target)
        c_idx = [i for i, h in enumerate(header) if i != t_idx and h not in skip]
        if not c_idx:
            raise InputError(f"{path}: no cue columns")
        rows, dropped = [], 0
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise InputError(f"{path}:{line}: expected {len(header)} fields, found {len(row)}")
            cells = [row[i].strip() for i in [t_idx] + c_idx]
            if any(c.lower() in MISSING for c in cells):
                dropped += 1
                continue
            try:
                values = [float(c) for c in cells]
            except ValueError as exc:
                raise InputError(f"{path}:{line}: {exc}") from None
            if not all(math.isfinite(v) for v in values):
                raise InputError(f"{path}:{line}: non-finite value")
            rows.append(values)
    if not rows:
        raise InputError(f"{path}: no complete rows")
    data = np.array(rows)
    return Table(data[:, 1:], data[:, 0], tuple(header[i] for i in c_idx), target, dropped)


def decision_dataset(table: Table, seed: int = 0) -> TernaryDataset:
    """Median-split items, then encode all item pairs as comparisons."""
    items, _ = median_split(table.cues, "paired")
    rng = np.random.default_rng([int(seed), 0xC0FFEE])
    return pairwise_encode(items, table.target, rng, table.cue_names)


def classification_dataset(table: Table, positive=None) -> TernaryDataset:
    """Ternary median-split cues with a two-valued label mapped to -1/+1.

    ``positive`` names the label value coded +1; by default the larger one.
    """
    labels = np.unique(table.target)
    if labels.size != 2:
        raise InputError(f"label column {table.target_name!r} must take exactly two values, found {labels.size}")
    pos = labels[1] if positive is None else float(positive)
    if pos not in labels:
        raise ConfigError(f"positive label {positive!r} does not occur in {table.target_name!r}")
    X, _ = median_split(table.cues, "classification")
    y = np.where(table.target == pos, 1.0, -1.0)
    return TernaryDataset(X, y, table.cue_names, "classification")


def planted_items(n_items: int, weights, rng: np.random.Generator, noise: float = 1.0, cue_corr: float = 0.3):
    """Items with equicorrelated Gaussian attributes and a linear criterion.

    Returns ``(attributes, criterion)`` where
    ``criterion = attributes @ weights + noise * N(0, 1)``.
    """
    weights = np.asarray(weights, dtype=float)
    m = weights.size
    cov = np.full((m, m), cue_corr) + (1.0 - cue_corr) * np.eye(m)
    attrs = rng.multivariate_normal(np.zeros(m), cov, size=n_items)
    crit = attrs @ weights + noise * rng.standard_normal(n_items)
    return attrs, crit
