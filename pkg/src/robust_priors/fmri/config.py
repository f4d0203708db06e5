"""Simulation settings for the voxel-wise trial estimation study."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields, replace

from ..errors import ConfigError

__all__ = ["SimConfig"]


@dataclass(frozen=True)
class SimConfig:
    """Parameters of one simulated design.

    Times are in seconds, spatial sizes in millimetres. ``d`` is the side of
    the cube of signal voxels; the simulated volume is ``3 * d`` per side.
    """

    d: int = 7
    reps_per_stim: int = 20
    n_stimuli: int = 2
    runs: int = 2
    TR: float = 1.0
    ED: float = 1.5
    ISI: float = 2.0
    sigma2_psi: float = 20.0
    sigma2_scanner: float = 10000.0
    fwhm_mm: float = 4.0
    fwhm_s: float = 4.5
    voxel_mm: tuple = (3.0, 3.0, 3.75)
    t_end: float = 20.0
    v_offdiag: float = 0.7
    center_low: int = 1
    center_high: int = 11
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "voxel_mm", tuple(float(v) for v in self.voxel_mm))
        for name in ("d", "reps_per_stim", "n_stimuli", "runs"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be a positive integer")
        for name in ("TR", "ED", "fwhm_mm", "fwhm_s", "t_end"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be positive")
        for name in ("ISI", "sigma2_psi", "sigma2_scanner"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigError(f"{name} must be non-negative")
        if len(self.voxel_mm) != 3 or min(self.voxel_mm) <= 0:
            raise ConfigError("voxel_mm needs three positive sizes")
        if not 0 <= self.v_offdiag < 1:
            raise ConfigError("v_offdiag must lie in [0, 1)")
        if not 1 <= self.center_low <= self.center_high or self.center_high - 1 + self.d > 3 * self.d:
            raise ConfigError("effect centers must place the signal cube inside the volume")
        if self.n_trials < 2:
            raise ConfigError("need at least two trials")

    @property
    def n_trials(self) -> int:
        return self.reps_per_stim * self.n_stimuli

    @property
    def n_null(self) -> int:
        return -(-self.n_trials // 3)

    @property
    def slot(self) -> float:
        return self.ED + self.ISI

    @property
    def n_scans(self) -> int:
        # guard against 186.666...+20 landing a hair above an integer
        return math.ceil((4.0 / 3.0 * self.n_trials * self.slot + self.t_end) / self.TR - 1e-9)

    @property
    def volume_shape(self) -> tuple:
        return (3 * self.d,) * 3

    def with_(self, **kw) -> "SimConfig":
        return replace(self, **kw)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["voxel_mm"] = list(self.voxel_mm)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown simulation settings {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json(cls, text: str) -> "SimConfig":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from None
