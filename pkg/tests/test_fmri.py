import numpy as np
import pytest
from scipy import integrate

from robust_priors.errors import ConfigError, InputError
from robust_priors.fmri.config import SimConfig
from robust_priors.fmri.design import build_design_lsa, event_schedule
from robust_priors.fmri.estimators import estimate_lsa, estimate_lss, estimate_lss_prior, rmse, score_rmse
from robust_priors.fmri.experiment import _ridge_path, run_cell
from robust_priors.fmri.hrf import double_gamma_hrf, hrf_integral
from robust_priors.fmri.io import read_arrays, read_scene_dump, write_scene_dump
from robust_priors.fmri.simulate import (
    FWHM_TO_SIGMA,
    sample_covariance,
    sample_ground_truth,
    simulate,
    smooth_noise,
)
from robust_priors.linear import solve_ols, solve_ridge_with_prior

SMALL = SimConfig(d=3, reps_per_stim=5, center_high=4)


def evenly_spaced(cfg):
    return np.arange(cfg.n_trials) * cfg.slot


class TestHrf:
    def test_origin(self):
        assert double_gamma_hrf(0.0) == 0.0

    def test_peak(self):
        t = np.linspace(0, 32, 32001)
        h = double_gamma_hrf(t)
        assert abs(t[np.argmax(h)] - 5.0) <= 1.0
        assert 1.0 - 1e-6 < h.max() <= 1.0

    def test_decayed(self):
        assert abs(double_gamma_hrf(30.0)) < 0.02

    def test_undershoot(self):
        assert double_gamma_hrf(15.0) < 0

    @pytest.mark.parametrize("t", [0.5, 3.0, 7.5, 16.0, 40.0])
    def test_integral_matches_quadrature(self, t):
        val, _ = integrate.quad(double_gamma_hrf, 0.0, t, limit=200)
        assert hrf_integral(t) == pytest.approx(val, abs=1e-9)


class TestDesign:
    def test_scan_count(self):
        assert SimConfig().n_scans == 207

    def test_shape_and_nulls(self, rng):
        cfg = SimConfig()
        onsets = event_schedule(cfg, rng)
        assert onsets.size == 40 and cfg.n_null == 14
        assert np.all(np.diff(onsets) >= cfg.slot - 1e-12)
        assert build_design_lsa(cfg, onsets).shape == (207, 40)

    def test_columns_match_numerical_convolution(self):
        cfg = SimConfig()
        onsets = np.array([0.0, 10.5, 52.5])
        X = build_design_lsa(cfg, onsets)
        dt = 1e-3
        kernel = double_gamma_hrf(np.arange(0, 40, dt))
        for k, o in enumerate(onsets):
            t = np.arange(0, cfg.n_scans, dt)
            box = ((t >= o) & (t < o + cfg.ED)).astype(float)
            conv = np.convolve(box, kernel)[: t.size] * dt
            sampled = conv[np.round(np.arange(cfg.n_scans) / dt).astype(int)]
            np.testing.assert_allclose(X[:, k], sampled, atol=5e-3)

    def test_single_dominant_bump(self, rng):
        # the double gamma dips below zero after the peak, so columns are not strictly non-negative
        cfg = SimConfig()
        X = build_design_lsa(cfg, event_schedule(cfg, rng))
        for col in X.T:
            peak = np.argmax(col)
            above = np.flatnonzero(col > 0.5 * col.max())
            assert np.all(np.diff(above) == 1) and above[0] <= peak <= above[-1]
            assert col.min() >= -0.2 * col.max()

    def test_adjacent_correlation_falls_with_isi(self):
        corr = []
        for isi in (2.0, 3.0, 4.0):
            cfg = SimConfig(ISI=isi)
            X = build_design_lsa(cfg, evenly_spaced(cfg))
            corr.append(np.corrcoef(X[:, 5], X[:, 6])[0, 1])
        assert corr[0] > 0 and corr[0] > corr[1] > corr[2]

    def test_overlap_rejected(self):
        with pytest.raises(InputError):
            build_design_lsa(SimConfig(), [0.0, 1.0])

    def test_past_acquisition_rejected(self):
        with pytest.raises(InputError):
            build_design_lsa(SimConfig(), [0.0, 1000.0])


class TestConfig:
    def test_json_round_trip(self):
        cfg = SimConfig(ISI=3.0, sigma2_psi=15.0)
        assert SimConfig.from_json('{"ISI": 3.0, "sigma2_psi": 15.0}') == cfg
        assert SimConfig.from_dict(cfg.to_dict()) == cfg

    @pytest.mark.parametrize("kw", [dict(TR=0.0), dict(ISI=-1.0), dict(v_offdiag=1.0), dict(center_high=20)])
    def test_rejects(self, kw):
        with pytest.raises(ConfigError):
            SimConfig(**kw)

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            SimConfig.from_dict({"tr": 1.0})


class TestGroundTruth:
    def test_wishart_mean(self):
        cfg = SimConfig()
        rng = np.random.default_rng(0)
        p = cfg.d**3
        off = ~np.eye(p, dtype=bool)
        means = [sample_covariance(cfg, rng)[off].mean() for _ in range(200)]
        assert np.mean(means) == pytest.approx(0.7, abs=0.05)

    def test_omega_zero_outside_block(self, rng):
        truth = sample_ground_truth(SMALL, rng)
        sl = truth.signal_slices(SMALL.d)
        for run in truth.runs:
            inside = run.Omega[(slice(None),) + sl]
            assert np.array_equal(inside, run.Psi)
            mask = np.ones(run.Omega.shape[1:], bool)
            mask[sl] = False
            assert not np.any(run.Omega[:, mask])

    def test_effect_center_range(self):
        cfg = SimConfig()
        centers = np.array([sample_ground_truth(cfg.with_(d=2, center_high=5), np.random.default_rng(s)).effect_center
                            for s in range(50)])
        assert centers.min() >= 1 and centers.max() <= 5

    def test_zero_signal_variance_zeroes_means(self, rng):
        # sigma2_psi scales the stimulus means only; trial weights keep the covariance spread
        truth = sample_ground_truth(SMALL.with_(sigma2_psi=0.0), rng)
        assert not np.any(truth.mu)

    def test_runs_share_means_but_not_weights(self, rng):
        truth = sample_ground_truth(SMALL, rng)
        a, b = truth.runs
        assert not np.array_equal(a.M, b.M)
        assert sorted(a.stimulus.tolist()) == sorted(b.stimulus.tolist())


class TestSmoothing:
    @staticmethod
    def _profile_fwhm(profile):
        x = np.arange(profile.size) - np.argmax(profile)
        keep = profile > 1e-8 * profile.max()
        curvature = np.polyfit(x[keep], np.log(profile[keep]), 2)[0]
        return np.sqrt(-1.0 / (2.0 * curvature)) / FWHM_TO_SIGMA

    def test_impulse_fwhm(self):
        cfg = SimConfig()
        E = np.zeros((41, 21, 21, 21))
        E[20, 10, 10, 10] = 1.0
        S = smooth_noise(E, cfg)
        targets = [cfg.fwhm_s / cfg.TR] + [cfg.fwhm_mm / v for v in cfg.voxel_mm]
        profiles = [S[:, 10, 10, 10], S[20, :, 10, 10], S[20, 10, :, 10], S[20, 10, 10, :]]
        for prof, target in zip(profiles, targets):
            assert self._profile_fwhm(prof) == pytest.approx(target, rel=0.10)

    def test_constant_preserved(self):
        E = np.full((30, 6, 6, 6), 3.5)
        np.testing.assert_allclose(smooth_noise(E, SimConfig()), 3.5, atol=1e-12)

    def test_temporal_autocorrelation_increases(self, rng):
        E = rng.standard_normal((200, 6, 6, 6))
        S = smooth_noise(E, SimConfig())

        def lag1(A):
            return np.mean(np.sum(A[1:] * A[:-1], axis=0) / np.sum(A * A, axis=0))

        assert lag1(S) > lag1(E) + 0.5


class TestSimulate:
    def test_noiseless_reproduces_signal(self, rng):
        cfg = SMALL.with_(sigma2_scanner=0.0)
        truth, scenes = simulate(cfg, rng)
        for run, scene in zip(truth.runs, scenes):
            expected = scene.X_lsa @ run.Omega.reshape(run.Omega.shape[0], -1)
            assert np.array_equal(scene.Y.reshape(scene.Y.shape[0], -1), expected)

    def test_noiseless_lsa_recovers_weights(self, rng):
        _, scenes = simulate(SMALL.with_(sigma2_scanner=0.0), rng)
        for scene in scenes:
            W = estimate_lsa(scene.X_lsa, scene.signal_series())
            np.testing.assert_allclose(W, scene.Psi.reshape(scene.Psi.shape[0], -1), atol=1e-6)

    def test_signal_voxels_more_variable(self):
        cfg = SimConfig(sigma2_psi=20.0, sigma2_scanner=100.0)
        _, scenes = simulate(cfg, np.random.default_rng(4))
        scene = scenes[0]
        var = scene.Y.var(axis=0)
        inside = np.zeros(var.shape, bool)
        inside[tuple(slice(c - 1, c - 1 + cfg.d) for c in scene.effect_center)] = True
        assert var[inside].mean() > var[~inside].mean()

    def test_seeded_determinism(self):
        a = simulate(SMALL, np.random.default_rng([3, 0]))[1][0].Y
        b = simulate(SMALL, np.random.default_rng([3, 0]))[1][0].Y
        assert np.array_equal(a, b)

    def test_runs_have_independent_noise(self):
        _, (s1, s2) = simulate(SMALL, np.random.default_rng(1))
        r1 = s1.Y - (s1.X_lsa @ s1.Omega.reshape(s1.Omega.shape[0], -1)).reshape(s1.Y.shape)
        r2 = s2.Y - (s2.X_lsa @ s2.Omega.reshape(s2.Omega.shape[0], -1)).reshape(s2.Y.shape)
        assert abs(np.corrcoef(r1.ravel(), r2.ravel())[0, 1]) < 0.05


class TestEstimators:
    def test_lsa_is_ols(self, rng):
        X, Y = rng.standard_normal((30, 4)), rng.standard_normal((30, 3))
        assert np.array_equal(estimate_lsa(X, Y), solve_ols(X, Y))

    def test_orthonormal_lsa(self, rng):
        Q, _ = np.linalg.qr(rng.standard_normal((20, 4)))
        y = rng.standard_normal(20)
        np.testing.assert_allclose(estimate_lsa(Q, y), Q.T @ y, atol=1e-12)

    def test_two_trials_lss_equals_lsa(self, rng):
        X, y = rng.standard_normal((25, 2)), rng.standard_normal(25)
        np.testing.assert_allclose(estimate_lss(X, y), estimate_lsa(X, y), atol=1e-12)

    def test_orthogonal_regressors(self, rng):
        X = np.zeros((40, 4))
        for k in range(4):
            X[10 * k:10 * k + 10, k] = rng.standard_normal(10)
        Y = rng.standard_normal((40, 5))
        np.testing.assert_allclose(estimate_lss(X, Y), estimate_lsa(X, Y), atol=1e-8)

    def test_lss_matches_per_trial_lstsq(self, rng):
        X, y = rng.standard_normal((50, 6)), rng.standard_normal(50)
        expected = []
        for k in range(6):
            D = np.column_stack([X[:, k], np.delete(X, k, axis=1).sum(axis=1)])
            expected.append(np.linalg.lstsq(D, y, rcond=None)[0][0])
        np.testing.assert_allclose(estimate_lss(X, y), expected, atol=1e-10)

    def test_collinear_trial_flagged(self):
        X = np.array([[1.0, 0.5, 0.5], [2.0, 1.0, 1.0], [0.0, 0.0, 0.0], [1.0, 0.5, 0.5]])
        W, flags = estimate_lss(X, np.ones(4), return_flags=True)
        assert flags[0] and np.all(np.isfinite(W))

    def test_lss_less_variable_under_collinearity(self):
        cfg = SimConfig(ISI=2.0)
        X = build_design_lsa(cfg, evenly_spaced(cfg))
        rng = np.random.default_rng(0)
        w = rng.standard_normal(cfg.n_trials)
        # white noise: under the default temporally smoothed noise the ordering reverses
        Y = (X @ w)[:, None] + rng.standard_normal((cfg.n_scans, 400))
        assert estimate_lss(X, Y).var(axis=1).mean() < estimate_lsa(X, Y).var(axis=1).mean()

    def test_lss_prior_endpoints(self, rng):
        cfg = SimConfig()
        X = build_design_lsa(cfg, event_schedule(cfg, rng))
        y = X @ rng.standard_normal(40) + rng.standard_normal(cfg.n_scans)
        w_lss = estimate_lss(X, y)
        assert np.array_equal(estimate_lss_prior(X, y, w_lss, 0.0), estimate_lsa(X, y))
        assert np.max(np.abs(estimate_lss_prior(X, y, w_lss, 1e10) - w_lss)) < 1e-4

    def test_eigen_path_matches_direct_solver(self, rng):
        cfg = SimConfig()
        X = build_design_lsa(cfg, event_schedule(cfg, rng))
        Y = rng.standard_normal((cfg.n_scans, 3))
        W_prior = estimate_lss(X, Y)
        grid = np.array([0.0, 1e-3, 1.0, 1e3, 1e6])
        path = _ridge_path(X, Y, W_prior, grid)
        for k, theta in enumerate(grid):
            for v in range(3):
                direct = solve_ridge_with_prior(X, Y[:, v], W_prior[:, v], theta)
                np.testing.assert_allclose(path[k, :, v], direct, atol=1e-8 * (1 + np.abs(direct).max()))

    def test_rmse_examples(self):
        assert rmse([[1.0], [3.0]], [[1.0], [1.0]])[0] == pytest.approx(np.sqrt(2.0), abs=1e-15)
        psi = np.arange(12.0).reshape(4, 3)
        assert score_rmse(psi, psi) == 0.0
        np.testing.assert_allclose(rmse(psi - 2.5, psi), 2.5, atol=1e-14)

    def test_rmse_shape_mismatch(self):
        with pytest.raises(InputError):
            rmse(np.zeros((2, 3)), np.zeros((3, 2)))


class TestExperiment:
    def test_endpoint_identities(self):
        cell = run_cell(SimConfig(), iterations=3)
        rows = {(r[2], r[3]): r[4] for r in cell.rows()}
        assert np.array_equal(cell.lss_prior[:, 0], cell.lsa)
        assert abs(rows[("lss_prior", cell.theta_grid[-1])] - rows[("lss", None)]) < 1e-3
        assert all(r[4] >= 0 for r in cell.rows())

    def test_common_random_numbers(self):
        a = run_cell(SMALL.with_(sigma2_psi=10.0), iterations=2, grid=[0.0, 1.0])
        b = run_cell(SMALL.with_(sigma2_psi=10.0), iterations=2, grid=[0.0, 1.0])
        assert np.array_equal(a.lss_prior, b.lss_prior)


def test_lsa_error_falls_with_isi(fmri_cells):
    lsa = [fmri_cells[(isi, 20.0)].lsa.mean() for isi in (2.0, 3.0, 4.0)]
    assert lsa[0] > lsa[1] > lsa[2], lsa


def test_scene_dump_round_trip(tmp_path, rng):
    X, Psi = rng.standard_normal((7, 3)), rng.standard_normal((3, 2, 2, 2))
    path = tmp_path / "scene.bin"
    write_scene_dump(path, X, Psi)
    raw = path.read_bytes()
    assert np.frombuffer(raw[:24], "<u8").tolist() == [2, 7, 3]
    assert len(raw) == 8 * (3 + 21 + 5 + 24)
    X2, Psi2 = read_scene_dump(path)
    assert np.array_equal(X2, X) and np.array_equal(Psi2, Psi)
    assert len(read_arrays(path)) == 2
