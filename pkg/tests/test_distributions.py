"""Samplers: distributional checks at seeded tolerances plus determinism."""

import numpy as np
import pytest
from scipy import stats

from robustfa import (
    ConstantRadial,
    EllipticalSpec,
    GaussianRadial,
    InvalidInput,
    RngStream,
    StudentRadial,
    sample_alpha_stable,
    sample_elliptical,
    sample_mvt,
    sample_skewed_t,
    sample_sphere,
)

CAUCHY_IQR = 2.0  # quantile(0.75) - quantile(0.25) of the standard Cauchy


class TestRngStream:
    def test_same_stream_same_draws(self):
        a = RngStream(5, 2).generator().standard_normal(10)
        b = RngStream(5, 2).generator().standard_normal(10)
        np.testing.assert_array_equal(a, b)

    def test_streams_differ(self):
        a = RngStream(5, 1).generator().standard_normal(10)
        b = RngStream(5, 2).generator().standard_normal(10)
        assert not np.array_equal(a, b)

    def test_child_deterministic_and_distinct(self):
        parent = RngStream(9, 0)
        assert parent.child(3) == parent.child(3)
        assert parent.child(1) != parent.child(2)
        assert parent.child(1).seed == 9


class TestSphere:
    def test_unit_norm(self):
        gen = RngStream(0, 0).generator()
        U = np.vstack([sample_sphere(5, gen) for _ in range(100)])
        np.testing.assert_allclose(np.linalg.norm(U, axis=1), 1.0, atol=1e-12)

    def test_dim_one_is_random_sign(self):
        gen = RngStream(1, 0).generator()
        draws = np.array([sample_sphere(1, gen)[0] for _ in range(2000)])
        assert set(np.unique(draws)) == {-1.0, 1.0}
        assert abs(draws.mean()) < 0.08

    def test_coordinates_centered(self):
        spec = EllipticalSpec(np.eye(3), ConstantRadial(1.0))
        U = sample_elliptical(spec, 100_000, RngStream(2, 0))
        assert np.abs(U.mean(axis=0)).max() < 3.0 / np.sqrt(100_000 / 3.0)


class TestElliptical:
    def test_constant_zero_radius_collapses_to_location(self):
        mu = np.array([1.0, -2.0, 0.5])
        spec = EllipticalSpec(np.eye(3), ConstantRadial(0.0), location=mu)
        draws = sample_elliptical(spec, 50, RngStream(3, 0))
        np.testing.assert_array_equal(draws, np.tile(mu, (50, 1)))

    def test_gaussian_radial_matches_normal(self):
        spec = EllipticalSpec(np.eye(4), GaussianRadial())
        draws = sample_elliptical(spec, 50_000, RngStream(4, 0))
        assert np.abs(draws.var(axis=0, ddof=1) - 1.0).max() < 0.05
        assert np.abs(np.corrcoef(draws.T) - np.eye(4)).max() < 0.05

    def test_rank_deficient_root_stays_in_subspace(self):
        rng = np.random.default_rng(5)
        A = rng.standard_normal((6, 2))
        mu = rng.standard_normal(6)
        spec = EllipticalSpec(A, StudentRadial(3.0), location=mu)
        draws = sample_elliptical(spec, 500, RngStream(6, 0))
        Q = np.linalg.qr(A)[0]
        centered = draws - mu
        residual = centered - centered @ Q @ Q.T
        assert np.abs(residual).max() <= 1e-10 * max(1.0, np.abs(centered).max())

    def test_determinism(self):
        spec = EllipticalSpec(np.eye(2), StudentRadial(2.0))
        a = sample_elliptical(spec, 40, RngStream(7, 1))
        b = sample_elliptical(spec, 40, RngStream(7, 1))
        np.testing.assert_array_equal(a, b)

    def test_custom_radial_callable(self):
        spec = EllipticalSpec(np.eye(2), lambda gen, size: np.ones(size))
        draws = sample_elliptical(spec, 200, RngStream(8, 0))
        np.testing.assert_allclose(np.linalg.norm(draws, axis=1), 1.0, atol=1e-12)

    def test_bad_radial_rejected(self):
        spec = EllipticalSpec(np.eye(2), lambda gen, size: -np.ones(size))
        with pytest.raises(InvalidInput):
            sample_elliptical(spec, 10, RngStream(9, 0))
        with pytest.raises(InvalidInput):
            sample_elliptical(EllipticalSpec(np.eye(2), "chi"), 10, RngStream(9, 0))


class TestMvt:
    def test_high_dof_covariance(self):
        rng = np.random.default_rng(10)
        A = rng.standard_normal((3, 3))
        sigma = A @ A.T + np.eye(3)
        draws = sample_mvt(200.0, sigma, 50_000, RngStream(11, 0))
        assert np.abs(np.cov(draws.T) - sigma).max() < 0.1 * np.abs(sigma).max()

    def test_cauchy_quantiles(self):
        draws = sample_mvt(1.0, np.eye(1), 50_000, RngStream(12, 0))[:, 0]
        assert abs(np.median(draws)) < 0.05
        q25, q75 = np.percentile(draws, [25, 75])
        assert abs((q75 - q25) - CAUCHY_IQR) < 0.1

    def test_pairwise_rank_correlation(self):
        # scatter correlation rho maps to pairwise Kendall tau 2/pi*arcsin(rho)
        rho = 0.5
        sigma = np.array([[1.0, rho], [rho, 1.0]])
        draws = sample_mvt(3.0, sigma, 50_000, RngStream(13, 0))
        tau = stats.kendalltau(draws[:, 0], draws[:, 1]).statistic
        assert abs(tau - 2.0 / np.pi * np.arcsin(rho)) < 0.02

    def test_determinism_and_validation(self):
        a = sample_mvt(2.0, np.eye(2), 25, RngStream(14, 0))
        b = sample_mvt(2.0, np.eye(2), 25, RngStream(14, 0))
        np.testing.assert_array_equal(a, b)
        with pytest.raises(InvalidInput):
            sample_mvt(0.0, np.eye(2), 10, RngStream(14, 0))
        with pytest.raises(InvalidInput):
            sample_mvt(2.0, np.diag([1.0, -1.0]), 10, RngStream(14, 0))


class TestSkewedT:
    def test_zero_slant_matches_symmetric_t(self):
        d = 2
        n = 20_000
        skew = sample_skewed_t(np.zeros(d), np.eye(d), np.zeros(d), 3.0, n, RngStream(15, 0))
        sym = sample_mvt(3.0, np.eye(d), n, RngStream(16, 0))
        for j in range(d):
            ks = stats.ks_2samp(skew[:, j], sym[:, j])
            assert ks.statistic < 1.63 * np.sqrt(2.0 / n)  # 1% critical value

    def test_positive_slant_skews_right(self):
        # third moments of a dof-3 law do not exist; check robust location
        # and sign-mass summaries instead of sample skewness
        d = 2
        draws = sample_skewed_t(
            np.zeros(d), np.eye(d), np.full(d, 20.0), 3.0, 40_000, RngStream(17, 0)
        )
        for j in range(d):
            assert np.median(draws[:, j]) > 0.3
            assert (draws[:, j] > 0).mean() > 0.65

    def test_location_shift(self):
        xi = np.array([5.0, -5.0])
        a = sample_skewed_t(np.zeros(2), np.eye(2), np.ones(2), 5.0, 30_000, RngStream(18, 0))
        b = sample_skewed_t(xi, np.eye(2), np.ones(2), 5.0, 30_000, RngStream(18, 0))
        np.testing.assert_array_equal(b, a + xi)

    def test_validation(self):
        with pytest.raises(InvalidInput):
            sample_skewed_t(np.zeros(2), np.eye(2), np.zeros(3), 3.0, 10, RngStream(0, 0))
        with pytest.raises(InvalidInput):
            sample_skewed_t(np.zeros(2), np.eye(2), np.zeros(2), -1.0, 10, RngStream(0, 0))


class TestAlphaStable:
    def test_gaussian_boundary(self):
        draws = sample_alpha_stable(2.0, 0.0, 1.0, 0.0, 100_000, RngStream(19, 0))
        assert abs(draws.var(ddof=1) - 2.0) < 0.1
        assert abs(stats.skew(draws)) < 0.05

    def test_cauchy_case(self):
        draws = sample_alpha_stable(1.0, 0.0, 1.0, 0.0, 50_000, RngStream(20, 0))
        q25, q75 = np.percentile(draws, [25, 75])
        assert abs((q75 - q25) - CAUCHY_IQR) < 0.1
        assert abs(np.median(draws)) < 0.05

    def test_symmetric_tails_at_alpha_18(self):
        draws = sample_alpha_stable(1.8, 0.0, 1.0, 0.0, 100_000, RngStream(21, 0))
        q05, q50, q95 = np.percentile(draws, [5, 50, 95])
        assert abs(q50) < 0.05
        assert abs((q95 + q05)) < 0.1  # symmetric outer quantiles

    def test_scale_and_location(self):
        base = sample_alpha_stable(1.5, 0.0, 1.0, 0.0, 10_000, RngStream(22, 0))
        moved = sample_alpha_stable(1.5, 0.0, 2.0, 3.0, 10_000, RngStream(22, 0))
        np.testing.assert_allclose(moved, 2.0 * base + 3.0, rtol=0, atol=1e-12)

    def test_skewed_branch_mirror(self):
        # the law of the beta = -1 draw is the reflection of beta = +1
        pos = sample_alpha_stable(1.5, 1.0, 1.0, 0.0, 50_000, RngStream(23, 0))
        neg = sample_alpha_stable(1.5, -1.0, 1.0, 0.0, 50_000, RngStream(23, 1))
        assert np.percentile(pos, 99) > 3.0 * abs(np.percentile(pos, 1))
        assert abs(np.median(neg) + np.median(pos)) < 0.05
        q = np.linspace(5, 95, 19)
        np.testing.assert_allclose(np.percentile(neg, q), -np.percentile(pos, 100.0 - q), atol=0.15)

    def test_alpha_one_skewed_branch_runs(self):
        draws = sample_alpha_stable(1.0, 0.5, 1.0, 0.0, 20_000, RngStream(24, 0))
        assert np.isfinite(draws).all()
        assert np.percentile(draws, 99) > 2.0 * abs(np.percentile(draws, 1))

    def test_validation(self):
        with pytest.raises(InvalidInput):
            sample_alpha_stable(0.0, 0.0, 1.0, 0.0, 10, RngStream(0, 0))
        with pytest.raises(InvalidInput):
            sample_alpha_stable(2.1, 0.0, 1.0, 0.0, 10, RngStream(0, 0))
        with pytest.raises(InvalidInput):
            sample_alpha_stable(1.5, 2.0, 1.0, 0.0, 10, RngStream(0, 0))
        with pytest.raises(InvalidInput):
            sample_alpha_stable(1.5, 0.0, 0.0, 0.0, 10, RngStream(0, 0))
