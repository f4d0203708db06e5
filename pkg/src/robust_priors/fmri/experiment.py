"""Monte-Carlo comparison of LSA, LSS and the LSS-prior penalty path."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from ..harness import default_theta_grid
from .config import SimConfig
from .estimators import estimate_lsa, estimate_lss, rmse
from .simulate import simulate

__all__ = ["CellResult", "EstimatorReport", "run_iteration", "run_cell", "run_grid", "ISI_LEVELS", "SNR_LEVELS"]

ISI_LEVELS = (2.0, 3.0, 4.0)
SNR_LEVELS = (10.0, 15.0, 20.0)


def _ridge_path(X, Y, W_prior, grid) -> np.ndarray:
    """LSS-prior estimates for every penalty, shape (len(grid), trials, voxels).

    Uses one eigendecomposition of ``X'X`` for the whole path; agrees with
    :func:`robust_priors.linear.solve_ridge_with_prior` at each penalty.
    """
    G = X.T @ X
    lam, U = np.linalg.eigh(G)
    XtY = X.T @ Y
    out = np.empty((len(grid),) + W_prior.shape)
    for k, theta in enumerate(grid):
        if theta == 0.0:
            out[k] = estimate_lsa(X, Y)
        else:
            out[k] = U @ ((U.T @ (XtY + theta * W_prior)) / (lam + theta)[:, None])
    return out


def run_iteration(cfg: SimConfig, grid, rng: np.random.Generator) -> dict:
    """RMSE of each estimator for one simulated dataset, averaged over runs."""
    _, scenes = simulate(cfg, rng)
    lsa = lss = 0.0
    path = np.zeros(len(grid))
    for scene in scenes:
        Y = scene.signal_series()
        truth = scene.Psi.reshape(scene.Psi.shape[0], -1)
        W_lss = estimate_lss(scene.X_lsa, Y)
        lsa += rmse(estimate_lsa(scene.X_lsa, Y), truth).mean()
        lss += rmse(W_lss, truth).mean()
        for k, W in enumerate(_ridge_path(scene.X_lsa, Y, W_lss, grid)):
            path[k] += rmse(W, truth).mean()
    r = len(scenes)
    return {"lsa": lsa / r, "lss": lss / r, "lss_prior": path / r}


@dataclass
class CellResult:
    """Per-iteration RMSE for one (ISI, signal variance) design."""

    cfg: SimConfig
    theta_grid: np.ndarray
    lsa: np.ndarray
    lss: np.ndarray
    lss_prior: np.ndarray  # (iterations, len(theta_grid))

    @property
    def iterations(self) -> int:
        return int(self.lsa.shape[0])

    def rows(self) -> list[tuple]:
        ddof = 1 if self.iterations > 1 else 0
        isi, snr = self.cfg.ISI, self.cfg.sigma2_psi
        out = [(isi, snr, "lsa", None, self.lsa.mean(), self.lsa.std(ddof=ddof)),
               (isi, snr, "lss", None, self.lss.mean(), self.lss.std(ddof=ddof))]
        for k, theta in enumerate(self.theta_grid):
            col = self.lss_prior[:, k]
            out.append((isi, snr, "lss_prior", float(theta), col.mean(), col.std(ddof=ddof)))
        return out


def run_cell(cfg: SimConfig, iterations: int, grid=None, seed: int | None = None) -> CellResult:
    """Simulate ``iterations`` datasets for one design.

    Iteration ``i`` draws from a generator seeded with ``(seed, i)``, so
    different designs see common random numbers.
    """
    grid = default_theta_grid() if grid is None else np.asarray(grid, dtype=float)
    seed = cfg.seed if seed is None else seed
    lsa, lss, path = np.empty(iterations), np.empty(iterations), np.empty((iterations, grid.size))
    for i in range(iterations):
        res = run_iteration(cfg, grid, np.random.default_rng([int(seed), i]))
        lsa[i], lss[i], path[i] = res["lsa"], res["lss"], res["lss_prior"]
    return CellResult(cfg, grid, lsa, lss, path)


@dataclass
class EstimatorReport:
    cells: list = field(default_factory=list)

    def rows(self) -> list[tuple]:
        return [row for cell in self.cells for row in cell.rows()]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["isi", "sigma2_psi", "estimator", "theta", "mean_rmse", "sd_rmse"])
        for isi, snr, est, theta, mean, sd in self.rows():
            w.writerow([repr(float(isi)), repr(float(snr)), est, "" if theta is None else repr(theta),
                        repr(float(mean)), repr(float(sd))])
        return buf.getvalue()

    def raw_csv(self) -> str:
        """One row per (cell, iteration, estimator, theta)."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["isi", "sigma2_psi", "iteration", "estimator", "theta", "rmse"])
        for c in self.cells:
            isi, snr = repr(float(c.cfg.ISI)), repr(float(c.cfg.sigma2_psi))
            for i in range(c.iterations):
                w.writerow([isi, snr, i, "lsa", "", repr(float(c.lsa[i]))])
                w.writerow([isi, snr, i, "lss", "", repr(float(c.lss[i]))])
                for k, theta in enumerate(c.theta_grid):
                    w.writerow([isi, snr, i, "lss_prior", repr(float(theta)), repr(float(c.lss_prior[i, k]))])
        return buf.getvalue()


def run_grid(base: SimConfig, iterations: int, isis=ISI_LEVELS, snrs=SNR_LEVELS, grid=None, progress=None) -> EstimatorReport:
    report = EstimatorReport()
    for snr in snrs:
        for isi in isis:
            cell = run_cell(base.with_(ISI=float(isi), sigma2_psi=float(snr)), iterations, grid)
            report.cells.append(cell)
            if progress is not None:
                progress(cell)
    return report
