"""Factor fits, rank selection, subspace distance, replication metrics."""

import numpy as np
import pytest

from robustfa import (
    DegeneratePanel,
    InvalidInput,
    RankDeficient,
    ScenarioConfig,
    estimate_factor_number,
    fit_pca,
    fit_rts,
    generate_scenario,
    ols_scores,
    replication_errors,
    subspace_distance,
)


def toy_factor_panel(seed, n=80, p=25, m=2, noise=0.1):
    rng = np.random.default_rng(seed)
    L = rng.standard_normal((p, m))
    F = rng.standard_normal((n, m))
    return F @ L.T + noise * rng.standard_normal((n, p)), L, F


class TestFits:
    @pytest.mark.parametrize("fit_fn", [fit_rts, fit_pca])
    def test_noiseless_rank_one_recovery(self, fit_fn):
        rng = np.random.default_rng(0)
        ell = rng.standard_normal(30)
        f = rng.standard_normal(120)
        X = np.outer(f, ell)
        fit = fit_fn(X, 1)
        assert subspace_distance(fit.loadings, ell[:, None]) <= 1e-8
        assert np.abs(fit.common - X).max() <= 1e-8 * np.abs(X).max()
        assert np.abs(fit.residuals).max() <= 1e-8 * np.abs(X).max()

    @pytest.mark.parametrize("fit_fn", [fit_rts, fit_pca])
    def test_loading_normalization(self, fit_fn):
        X, _, _ = toy_factor_panel(1)
        fit = fit_fn(X, 2)
        p = X.shape[1]
        assert np.abs(fit.loadings.T @ fit.loadings / p - np.eye(2)).max() <= 1e-12

    @pytest.mark.parametrize("fit_fn", [fit_rts, fit_pca])
    def test_scores_closed_form(self, fit_fn):
        X, _, _ = toy_factor_panel(2)
        fit = fit_fn(X, 2)
        np.testing.assert_array_equal(fit.scores, X @ fit.loadings / X.shape[1])

    @pytest.mark.parametrize("fit_fn", [fit_rts, fit_pca])
    def test_residuals_orthogonal_to_loadings(self, fit_fn):
        X, _, _ = toy_factor_panel(3)
        fit = fit_fn(X, 2)
        assert np.abs(fit.residuals @ fit.loadings).max() <= 1e-10

    def test_rts_scale_invariant_loadings(self):
        X, _, _ = toy_factor_panel(4)
        base = fit_rts(X, 2)
        scaled = fit_rts(2.0 * X, 2)  # power of two keeps normalization exact
        np.testing.assert_array_equal(scaled.loadings, base.loadings)
        np.testing.assert_array_equal(scaled.scores, 2.0 * base.scores)

    def test_common_plus_residual_reconstructs(self):
        X, _, _ = toy_factor_panel(5)
        fit = fit_rts(X, 2)
        np.testing.assert_array_equal(fit.residuals, X - fit.common)
        assert np.abs(fit.common + fit.residuals - X).max() <= 1e-12 * np.abs(X).max()

    @pytest.mark.parametrize("fit_fn", [fit_rts, fit_pca])
    def test_identical_rows_degenerate(self, fit_fn):
        X = np.tile([1.0, 2.0, 3.0, 4.0], (10, 1))
        with pytest.raises(DegeneratePanel):
            fit_fn(X, 1)

    def test_m_bounds(self):
        X, _, _ = toy_factor_panel(6, n=10, p=5)
        with pytest.raises(InvalidInput):
            fit_rts(X, 0)
        with pytest.raises(InvalidInput):
            fit_rts(X, 6)
        fit_rts(X, 5)  # min(n - 1, p) = 5 is allowed

    def test_eigengap_warning_on_isotropic_panel(self):
        # equilateral rows make the 2x2 tau matrix exactly isotropic
        X = np.array(
            [[1.0, 0.0], [-0.5, np.sqrt(3.0) / 2.0], [-0.5, -np.sqrt(3.0) / 2.0]]
        )
        fit = fit_rts(X, 1)
        assert fit.eigengap_warning

    def test_no_warning_with_clear_gap(self):
        X, _, _ = toy_factor_panel(7)
        assert not fit_rts(X, 2).eigengap_warning


class TestOlsScores:
    def test_orthogonal_design_identity(self):
        rng = np.random.default_rng(10)
        p, m = 16, 3
        L = np.linalg.qr(rng.standard_normal((p, m)))[0] * np.sqrt(p)
        F = rng.standard_normal((40, m))
        X = F @ L.T
        assert np.abs(ols_scores(X, L) - F).max() <= 1e-10

    def test_matches_lstsq_oracle(self):
        rng = np.random.default_rng(11)
        for k in range(30):
            n = int(rng.integers(2, 30))
            p = int(rng.integers(2, 20))
            m = int(rng.integers(1, min(p, 5) + 1))
            L = rng.standard_normal((p, m))
            X = rng.standard_normal((n, p))
            oracle = np.linalg.lstsq(L, X.T, rcond=None)[0].T
            assert np.abs(ols_scores(X, L) - oracle).max() <= 1e-10

    def test_rank_deficient_loadings(self):
        L = np.ones((6, 2))
        with pytest.raises(RankDeficient):
            ols_scores(np.random.default_rng(0).standard_normal((5, 6)), L)

    def test_shape_mismatch(self):
        with pytest.raises(InvalidInput):
            ols_scores(np.ones((4, 3)), np.ones((5, 1)))


class TestEstimateFactorNumber:
    def test_recovers_three_factors(self):
        cfg = ScenarioConfig(scenario="A", p=100, n=80, family="gaussian", m=3, seed=21)
        truth = generate_scenario(cfg, 1)
        assert estimate_factor_number(truth.panel) == 3
        assert estimate_factor_number(truth.panel, method="pca") == 3

    def test_rank_one_signal(self):
        rng = np.random.default_rng(22)
        X = np.outer(rng.standard_normal(60), rng.standard_normal(30))
        X += 0.01 * rng.standard_normal(X.shape)
        assert estimate_factor_number(X) == 1

    def test_heavy_tail_selection(self):
        cfg = ScenarioConfig(scenario="A", p=100, n=80, family="t2", m=3, seed=23)
        hits = sum(
            estimate_factor_number(generate_scenario(cfg, rep).panel) == 3
            for rep in range(1, 21)
        )
        assert hits >= 18

    def test_m_max_validation(self):
        X = np.random.default_rng(1).standard_normal((20, 10))
        with pytest.raises(InvalidInput):
            estimate_factor_number(X, m_max=6)  # min(n, p) / 2 = 5
        with pytest.raises(InvalidInput):
            estimate_factor_number(X, m_max=0)
        with pytest.raises(InvalidInput):
            estimate_factor_number(X, method="em")
        assert 1 <= estimate_factor_number(X, m_max=5) <= 5


class TestSubspaceDistance:
    def test_identical_input_exact_zero(self):
        Q = np.random.default_rng(0).standard_normal((10, 3))
        assert subspace_distance(Q, Q.copy()) == 0.0

    def test_rotated_basis_near_zero(self):
        rng = np.random.default_rng(1)
        O1 = rng.standard_normal((12, 3))
        R = np.linalg.qr(rng.standard_normal((3, 3)))[0]
        assert subspace_distance(O1, O1 @ R) <= 1e-10

    def test_orthogonal_spans(self):
        assert subspace_distance(np.eye(4)[:, :1], np.eye(4)[:, 1:2]) == 1.0

    def test_forty_five_degrees(self):
        o1 = np.array([[1.0], [0.0]])
        o2 = np.array([[1.0], [1.0]])
        assert abs(subspace_distance(o1, o2) - np.sqrt(0.5)) <= 1e-12

    def test_symmetry_and_range(self):
        rng = np.random.default_rng(2)
        for k in range(20):
            p = int(rng.integers(3, 15))
            A = rng.standard_normal((p, int(rng.integers(1, 4))))
            B = rng.standard_normal((p, int(rng.integers(1, 4))))
            d_ab = subspace_distance(A, B)
            d_ba = subspace_distance(B, A)
            assert abs(d_ab - d_ba) <= 1e-12
            assert 0.0 <= d_ab <= 1.0

    def test_nested_spans_of_unequal_width(self):
        # span(e1) inside span(e1, e2): overlap 1 of max width 2
        d = subspace_distance(np.eye(4)[:, :1], np.eye(4)[:, :2])
        assert abs(d - np.sqrt(0.5)) <= 1e-12

    def test_rank_deficient_rejected(self):
        with pytest.raises(RankDeficient):
            subspace_distance(np.ones((4, 2)), np.eye(4)[:, :1])

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInput):
            subspace_distance(np.eye(3)[:, :1], np.eye(4)[:, :1])


class TestReplicationErrors:
    def test_exact_fit_is_zero(self):
        rng = np.random.default_rng(30)
        L = rng.standard_normal((20, 2))
        F = rng.standard_normal((50, 2))
        fit = fit_rts(F @ L.T, 2)
        err = replication_errors(fit, L, F)
        assert err.cc_err <= 1e-12
        assert err.fl_dist <= 1e-7
        assert err.fs_dist <= 1e-7

    def test_rotation_invariance_of_cc(self):
        X, L, F = toy_factor_panel(31)
        fit = fit_rts(X, 2)
        R = np.linalg.qr(np.random.default_rng(0).standard_normal((2, 2)))[0]
        a = replication_errors(fit, L, F)
        b = replication_errors(fit, L @ R, F @ np.linalg.inv(R).T)
        assert abs(a.cc_err - b.cc_err) <= 1e-10
        assert abs(a.fl_dist - b.fl_dist) <= 1e-10

    def test_direct_formula(self):
        X, L, F = toy_factor_panel(32)
        fit = fit_pca(X, 2)
        err = replication_errors(fit, L, F)
        signal = F @ L.T
        expected = ((fit.common - signal) ** 2).sum() / (signal**2).sum()
        assert abs(err.cc_err - expected) <= 1e-12
        assert err.fl_dist == subspace_distance(fit.loadings, L)
        assert err.fs_dist == subspace_distance(fit.scores, F)

    def test_zero_signal_rejected(self):
        X, L, F = toy_factor_panel(33)
        fit = fit_rts(X, 2)
        with pytest.raises(InvalidInput):
            replication_errors(fit, np.zeros_like(L), np.zeros_like(F))
