import math

import numpy as np
import pytest
from scipy import stats as sstats

from postproj import (
    DegenerateUpdateError,
    GaussianPosterior,
    RngStream,
    gaussian_conjugate_update,
    sample_dirichlet,
    sample_normal,
    sample_truncated_normal,
    sample_vmf,
    vmf_posterior_update,
)

HALF_NORMAL_MEAN = math.sqrt(2.0 / math.pi)  # 0.7978845608028654
FAR_TAIL_MEAN_AT_8 = 8.12136811223618  # phi(8)/(1 - Phi(8)), Mills-ratio value


class TestGaussianConjugateUpdate:
    def test_flat_prior_scaling(self):
        # prior variance 1e3, unit noise, n = 50: theta_n = n*xbar/(1e-3 + n)
        data = np.full(50, 0.3)
        post = gaussian_conjugate_update(0.0, 1e3, 1.0, data)
        assert post.theta_n == pytest.approx(50 * 0.3 / (1e-3 + 50), rel=1e-12)
        assert post.sigma_n2 == pytest.approx(1.0 / (1e-3 + 50), rel=1e-12)

    def test_flat_prior_limit(self):
        data = np.array([1.0, 2.0, 3.0])
        post = gaussian_conjugate_update(5.0, math.inf, 1.0, data)
        assert post.theta_n == pytest.approx(2.0, abs=1e-12)

    def test_prior_agreement_case(self):
        data = np.full(7, 0.4)
        for s02 in (0.1, 3.0, 50.0):
            post = gaussian_conjugate_update(0.4, s02, 2.0, data)
            assert post.theta_n == pytest.approx(0.4, abs=1e-12)

    def test_empty_data_rejected(self):
        with pytest.raises(ValueError):
            gaussian_conjugate_update(0.0, 1.0, 1.0, np.array([]))

    def test_standardized_bounds(self):
        post = GaussianPosterior(theta_n=1.0, sigma_n2=4.0)
        assert post.alpha(0.0) == pytest.approx(-0.5)
        assert post.beta(math.inf) == math.inf
        assert post.alpha(-math.inf) == -math.inf


class TestSampleNormal:
    def test_mean_within_tolerance(self):
        n = 10**5
        draws = sample_normal(0.0, 1.0, n, RngStream(seed=1))
        assert abs(draws.mean()) <= 4.0 / math.sqrt(n)

    def test_zero_scale_rejected(self):
        with pytest.raises(ValueError):
            sample_normal(5.0, 0.0, 10, RngStream(seed=1))

    def test_determinism(self):
        a = sample_normal(0.0, 1.0, 100, RngStream(seed=9, stream_id=4))
        b = sample_normal(0.0, 1.0, 100, RngStream(seed=9, stream_id=4))
        np.testing.assert_array_equal(a, b)

    def test_stream_independence(self):
        n = 10**5
        a = sample_normal(0.0, 1.0, n, RngStream(seed=9, stream_id=0))
        b = sample_normal(0.0, 1.0, n, RngStream(seed=9, stream_id=1))
        assert not np.array_equal(a, b)
        corr = float(np.corrcoef(a, b)[0, 1])
        assert abs(corr) <= 4.0 / math.sqrt(n)


class TestSampleTruncatedNormal:
    def test_half_normal_mean(self):
        n = 10**5
        draws = sample_truncated_normal(0.0, 1.0, 0.0, math.inf, n, RngStream(seed=2))
        assert abs(draws.mean() - HALF_NORMAL_MEAN) <= 0.01

    def test_support_is_exact(self):
        draws = sample_truncated_normal(1.0, 2.0, -0.5, 3.0, 5000, RngStream(seed=3))
        assert np.all(draws >= -0.5)
        assert np.all(draws <= 3.0)

    def test_far_tail_mean(self):
        draws = sample_truncated_normal(0.0, 1.0, 8.0, math.inf, 10**3, RngStream(seed=4))
        assert np.all(draws >= 8.0)
        assert abs(draws.mean() - FAR_TAIL_MEAN_AT_8) <= 0.02

    def test_far_lower_tail_mirrored(self):
        draws = sample_truncated_normal(0.0, 1.0, -math.inf, -8.0, 10**3, RngStream(seed=5))
        assert np.all(draws <= -8.0)
        assert abs(draws.mean() + FAR_TAIL_MEAN_AT_8) <= 0.02

    def test_moderate_region_distribution(self):
        # inverse-CDF branch against scipy's truncated-normal CDF
        draws = sample_truncated_normal(0.5, 1.5, -1.0, 2.0, 10**4, RngStream(seed=6))
        ref = sstats.truncnorm(a=(-1.0 - 0.5) / 1.5, b=(2.0 - 0.5) / 1.5, loc=0.5, scale=1.5)
        stat = sstats.kstest(draws, ref.cdf).statistic
        assert stat < 1.628 / math.sqrt(draws.size)

    def test_narrow_far_tail_window(self):
        draws = sample_truncated_normal(0.0, 1.0, 6.0, 6.2, 500, RngStream(seed=7))
        assert np.all((draws >= 6.0) & (draws <= 6.2))

    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            sample_truncated_normal(0.0, 1.0, 2.0, 2.0, 10, RngStream(seed=8))


class TestSampleDirichlet:
    def test_rows_on_simplex(self):
        draws = sample_dirichlet(np.array([2.0, 3.0, 4.0]), 2000, RngStream(seed=10))
        np.testing.assert_allclose(draws.sum(axis=1), 1.0, atol=1e-12)
        assert np.all(draws >= 0.0)

    def test_uniform_mean(self):
        n = 10**5
        draws = sample_dirichlet(np.array([1.0, 1.0]), n, RngStream(seed=11))
        se = math.sqrt(0.25 / (2.0 + 1.0)) / math.sqrt(n)
        assert abs(draws[:, 0].mean() - 0.5) <= 4 * se

    def test_extreme_concentration_robust(self):
        draws = sample_dirichlet(np.array([1e6, 1.0]), 5000, RngStream(seed=12))
        assert np.all(np.isfinite(draws))
        assert np.all(draws > 0.0)
        # log-space oracle for the tiny component: Gamma(1)/Gamma(1e6) ratio
        # built from independent log-gamma draws
        rng = np.random.default_rng(99)
        log_small = sstats.loggamma.rvs(1.0, size=5000, random_state=rng)
        log_big = sstats.loggamma.rvs(1e6, size=5000, random_state=rng)
        oracle = 1.0 / (1.0 + np.exp(log_big - log_small))
        stat = sstats.ks_2samp(draws[:, 1], oracle).statistic
        assert stat < 1.628 * math.sqrt(2.0 / 5000)

    def test_nonpositive_alpha_rejected(self):
        with pytest.raises(ValueError):
            sample_dirichlet(np.array([1.0, 0.0]), 10, RngStream(seed=13))


class TestVmfPosteriorUpdate:
    def test_collinear(self):
        mu_n, psi_n = vmf_posterior_update(np.array([1.0, 0.0, 0.0]), 1.0, np.full((3, 3), 0.0) + np.array([1.0, 0.0, 0.0]))
        assert psi_n == pytest.approx(4.0)
        np.testing.assert_allclose(mu_n, [1.0, 0.0, 0.0], atol=1e-12)

    def test_no_data_information(self):
        data = np.array([[1.0, 0.0], [-1.0, 0.0]])  # resultant zero
        mu_n, psi_n = vmf_posterior_update(np.array([0.0, 1.0]), 2.5, data)
        assert psi_n == pytest.approx(2.5)
        np.testing.assert_allclose(mu_n, [0.0, 1.0], atol=1e-12)

    def test_orthogonal_combination(self):
        data = np.full((3, 3), 0.0) + np.array([1.0 / 3.0, 0.0, 0.0])  # n*xbar = e1
        mu_n, psi_n = vmf_posterior_update(np.array([0.0, 1.0, 0.0]), 1.0, data)
        assert psi_n == pytest.approx(math.sqrt(2.0))
        np.testing.assert_allclose(mu_n, np.array([1.0, 1.0, 0.0]) / math.sqrt(2.0), atol=1e-12)

    def test_zero_resultant_degenerate(self):
        data = np.array([[0.0, -2.0]])  # n*xbar = -psi*mu
        with pytest.raises(DegenerateUpdateError):
            vmf_posterior_update(np.array([0.0, 1.0]), 2.0, data)

    def test_requires_unit_direction(self):
        with pytest.raises(ValueError):
            vmf_posterior_update(np.array([0.0, 2.0]), 1.0, np.ones((2, 2)))


class TestSampleVmf:
    def test_unit_norm_support(self):
        draws = sample_vmf(np.array([0.0, 0.0, 1.0]), 5.0, 2000, RngStream(seed=14))
        np.testing.assert_allclose(np.linalg.norm(draws, axis=1), 1.0, atol=1e-12)

    def test_uniform_limit(self):
        n = 10**4
        draws = sample_vmf(np.array([1.0, 0.0, 0.0]), 0.0, n, RngStream(seed=15))
        resultant = np.linalg.norm(draws.mean(axis=0))
        assert resultant <= 4.0 / math.sqrt(n)

    def test_high_concentration_direction(self):
        n = 10**4
        mu = np.array([1.0, 0.0, 0.0])
        draws = sample_vmf(mu, 50.0, n, RngStream(seed=16))
        direction = draws.mean(axis=0)
        direction /= np.linalg.norm(direction)
        angle = math.degrees(math.acos(float(np.clip(direction @ mu, -1.0, 1.0))))
        assert angle < 1.0

    def test_mean_cosine_matches_langevin_formula(self):
        # on the 2-sphere, E[mu . x] = coth(psi) - 1/psi
        psi, n = 8.0, 10**5
        mu = np.array([0.0, 1.0, 0.0])
        draws = sample_vmf(mu, psi, n, RngStream(seed=17))
        expected = 1.0 / math.tanh(psi) - 1.0 / psi
        cosines = draws @ mu
        assert abs(float(cosines.mean()) - expected) <= 4.0 * float(cosines.std()) / math.sqrt(n)

    def test_determinism(self):
        a = sample_vmf(np.array([0.0, 1.0]), 3.0, 50, RngStream(seed=18))
        b = sample_vmf(np.array([0.0, 1.0]), 3.0, 50, RngStream(seed=18))
        np.testing.assert_array_equal(a, b)

    def test_mean_direction_within_standard_errors(self):
        n = 10**4
        mu = np.array([3.0, 4.0, 0.0]) / 5.0
        draws = sample_vmf(mu, 5.0, n, RngStream(seed=19))
        sample_mean = draws.mean(axis=0)
        se = draws.std(axis=0) / math.sqrt(n)
        expected = (1.0 / math.tanh(5.0) - 1.0 / 5.0) * mu
        assert np.all(np.abs(sample_mean - expected) <= 4.0 * se + 1e-12)
