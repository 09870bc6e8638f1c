"""Closed-form conditional entropies against quadrature, enumeration, and MC oracles."""

import math

import mpmath as mp
import numpy as np
import pytest
from scipy import special, stats

from bayesimax.conjugate import (
    BetaBernoulliSpec,
    GammaPoissonSpec,
    NormalNormalSpec,
    bb_conditional_entropy,
    beta_binomial_pmf,
    beta_posterior_entropy,
    conditional_entropy,
    gamma_posterior_entropy,
    gp_conditional_entropy,
    log_posterior_pdf,
    log_prior_pdf,
    nn_conditional_entropy,
    posterior_params,
    prior_entropy,
    sample_data,
    sample_posterior,
    sample_prior,
    suff_stat,
)

HALF_LN_2PI_E = 0.5 * math.log(2.0 * math.pi * math.e)


mp.mp.dps = 25


def beta_entropy_quadrature(a: float, b: float) -> float:
    """-integral of f ln f for the Beta(a, b) density, in high precision."""
    def integrand(x):
        f = x ** (a - 1) * (1 - x) ** (b - 1) / mp.beta(a, b)
        return -f * mp.log(f) if f > 0 else mp.mpf(0)

    return float(mp.quad(integrand, [0, 0.5, 1]))


def gamma_entropy_quadrature(a: float, rate: float) -> float:
    def integrand(x):
        f = rate ** a * x ** (a - 1) * mp.e ** (-rate * x) / mp.gamma(a)
        return -f * mp.log(f) if f > 0 else mp.mpf(0)

    return float(mp.quad(integrand, [0, a / rate, mp.inf]))


class TestSpecValidation:
    def test_rejects_nonpositive_variance(self):
        with pytest.raises(ValueError):
            NormalNormalSpec(mu=0.0, tau2=0.0, sigma2=1.0, n=1)

    def test_rejects_negative_n(self):
        with pytest.raises(ValueError):
            BetaBernoulliSpec(alpha=1.0, beta=1.0, n=-1)

    def test_rejects_nonpositive_shape(self):
        with pytest.raises(ValueError):
            GammaPoissonSpec(alpha=-2.0, beta=1.0, n=0)


class TestNormalNormal:
    def test_no_data_is_prior_entropy(self):
        spec = NormalNormalSpec(mu=0.0, tau2=1.0, sigma2=1.0, n=0)
        assert nn_conditional_entropy(spec) == pytest.approx(HALF_LN_2PI_E, abs=1e-15)

    def test_one_observation_hand_value(self):
        spec = NormalNormalSpec(mu=0.0, tau2=1.0, sigma2=1.0, n=1)
        assert nn_conditional_entropy(spec) == pytest.approx(
            0.5 * math.log(math.pi * math.e), abs=1e-14)

    def test_independent_of_prior_mean(self):
        a = NormalNormalSpec(mu=0.0, tau2=2.0, sigma2=1.0, n=3)
        b = NormalNormalSpec(mu=57.0, tau2=2.0, sigma2=1.0, n=3)
        assert nn_conditional_entropy(a) == nn_conditional_entropy(b)

    def test_large_n_limit(self):
        for n in (10, 100, 1000, 10000):
            spec = NormalNormalSpec(mu=0.0, tau2=1.0, sigma2=1.0, n=n)
            gap = nn_conditional_entropy(spec) - 0.5 * math.log(
                2.0 * math.pi * math.e * spec.sigma2 / n)
            assert abs(gap) <= 0.5 * spec.sigma2 / (n * spec.tau2)

    def test_strictly_increasing_in_prior_variance(self):
        values = [nn_conditional_entropy(NormalNormalSpec(0.0, t2, 1.0, 2))
                  for t2 in (0.1, 1.0, 10.0, 100.0)]
        assert all(b > a for a, b in zip(values, values[1:]))


class TestBetaEntropy:
    def test_uniform_is_zero(self):
        assert beta_posterior_entropy(1.0, 1.0) == 0.0

    def test_symmetric_case_vs_quadrature(self):
        assert beta_posterior_entropy(2.0, 2.0) == pytest.approx(
            beta_entropy_quadrature(2.0, 2.0), abs=1e-10)

    @pytest.mark.parametrize("a,b", [(2.0, 5.0), (0.7, 0.7), (3.5, 1.2)])
    def test_general_values_vs_quadrature(self, a, b):
        assert beta_posterior_entropy(a, b) == pytest.approx(
            beta_entropy_quadrature(a, b), abs=1e-10)

    def test_argument_symmetry(self):
        assert beta_posterior_entropy(2.5, 4.0) == beta_posterior_entropy(4.0, 2.5)


class TestBetaBernoulli:
    def test_no_data_uniform_prior(self):
        assert bb_conditional_entropy(BetaBernoulliSpec(1.0, 1.0, 0)) == 0.0

    def test_single_observation_symmetry(self):
        # Uniform prior, n=1: both outcomes are equally likely and give
        # posterior entropies H(Beta(2,1)) = H(Beta(1,2)).
        value = bb_conditional_entropy(BetaBernoulliSpec(1.0, 1.0, 1))
        assert value == pytest.approx(beta_posterior_entropy(1.0, 2.0), abs=1e-14)

    def test_pmf_matches_reference(self):
        for n, a, b in [(5, 2.0, 3.0), (7, 0.6, 1.9), (1, 1.0, 1.0)]:
            mine = beta_binomial_pmf(n, a, b)
            ref = stats.betabinom(n, a, b).pmf(np.arange(n + 1))
            np.testing.assert_allclose(mine, ref, atol=1e-13)
            assert mine.sum() == pytest.approx(1.0, abs=1e-12)

    def test_against_independent_reference_sum(self):
        spec = BetaBernoulliSpec(2.0, 3.0, 5)
        pmf = stats.betabinom(5, 2.0, 3.0).pmf(np.arange(6))
        oracle = sum(pmf[s] * stats.beta(2.0 + s, 3.0 + 5 - s).entropy()
                     for s in range(6))
        assert bb_conditional_entropy(spec) == pytest.approx(oracle, abs=1e-9)

    def test_against_sequence_enumeration(self):
        # Sum over raw Bernoulli sequences instead of the sufficient statistic.
        a, b, n = 1.5, 0.8, 6
        total = 0.0
        for bits in range(2 ** n):
            s = bin(bits).count("1")
            seq_prob = math.exp(special.betaln(a + s, b + n - s) - special.betaln(a, b))
            total += seq_prob * beta_posterior_entropy(a + s, b + n - s)
        assert bb_conditional_entropy(BetaBernoulliSpec(a, b, n)) == pytest.approx(
            total, abs=1e-12)

    def test_nonincreasing_in_sample_size(self):
        values = [bb_conditional_entropy(BetaBernoulliSpec(2.0, 3.0, n))
                  for n in (0, 1, 2, 4, 8)]
        assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))


class TestGammaEntropy:
    def test_unit_exponential(self):
        assert gamma_posterior_entropy(1.0, 1.0) == 1.0

    def test_exponential_rate_two(self):
        assert gamma_posterior_entropy(1.0, 2.0) == pytest.approx(
            1.0 - math.log(2.0), abs=1e-14)

    def test_shape_three_vs_quadrature(self):
        # 3 + ln Gamma(3) - 2 psi(3); the frozen digits come from a
        # 25-digit quadrature of -f ln f.  Tolerance reflects the 1e-10
        # digamma contract entering with coefficient 2.
        value = gamma_posterior_entropy(3.0, 1.0)
        assert value == pytest.approx(gamma_entropy_quadrature(3.0, 1.0), abs=1e-10)
        assert value == pytest.approx(1.8475785103630110306, abs=1e-10)

    @pytest.mark.parametrize("a,rate", [(0.5, 1.0), (2.5, 0.3), (10.0, 4.0)])
    def test_general_values_vs_quadrature(self, a, rate):
        assert gamma_posterior_entropy(a, rate) == pytest.approx(
            gamma_entropy_quadrature(a, rate), abs=1e-10)


class TestGammaPoisson:
    def test_no_data_unit_prior(self):
        assert gp_conditional_entropy(GammaPoissonSpec(1.0, 1.0, 0)) == 1.0

    def test_against_long_reference_sum(self):
        for a, b, n in [(2.0, 1.0, 1), (1.5, 2.0, 4), (0.4, 0.7, 2)]:
            spec = GammaPoissonSpec(a, b, n)
            s = np.arange(200_000)
            pmf = stats.nbinom(a, b / (b + n)).pmf(s)
            ent = stats.gamma(a + s, scale=1.0 / (b + n)).entropy()
            oracle = float(np.dot(pmf, ent))
            assert gp_conditional_entropy(spec) == pytest.approx(oracle, abs=1e-8)

    def test_against_plain_monte_carlo(self):
        spec = GammaPoissonSpec(2.0, 1.0, 1)
        rng = np.random.default_rng(97)
        reps = 10_000_000
        theta = rng.gamma(2.0, 1.0, size=reps)
        s = rng.poisson(theta)
        values, counts = np.unique(s, return_counts=True)
        ent = (values + 2.0 - np.log(2.0) + special.gammaln(values + 2.0)
               + (1.0 - (values + 2.0)) * special.digamma(values + 2.0))
        estimate = float(np.dot(counts, ent)) / reps
        stderr = float(np.sqrt(np.dot(counts, (ent - estimate) ** 2) / reps / reps))
        assert abs(gp_conditional_entropy(spec) - estimate) <= 3.0 * stderr

    def test_truncation_tolerance_is_honored(self):
        spec = GammaPoissonSpec(3.0, 0.5, 2)
        coarse = gp_conditional_entropy(spec, tail_tol=1e-4)
        fine = gp_conditional_entropy(spec, tail_tol=1e-13)
        assert abs(coarse - fine) <= 1e-4

    def test_value_grows_as_rate_shrinks(self):
        lo = gp_conditional_entropy(GammaPoissonSpec(2.0, 0.5, 3))
        hi = gp_conditional_entropy(GammaPoissonSpec(2.0, 2.0, 3))
        assert lo > hi

    def test_value_grows_with_shape(self):
        values = [gp_conditional_entropy(GammaPoissonSpec(a, 1.0, 2))
                  for a in (1.0, 2.0, 4.0, 8.0, 16.0)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_nonincreasing_in_sample_size(self):
        values = [gp_conditional_entropy(GammaPoissonSpec(2.0, 1.0, n))
                  for n in (0, 1, 2, 4, 8)]
        assert all(b <= a + 1e-9 for a, b in zip(values, values[1:]))


class TestDispatchers:
    def test_conditional_entropy_routes_by_type(self):
        assert conditional_entropy(NormalNormalSpec(0, 1, 1, 1)) == \
            nn_conditional_entropy(NormalNormalSpec(0, 1, 1, 1))
        assert conditional_entropy(BetaBernoulliSpec(2, 3, 2)) == \
            bb_conditional_entropy(BetaBernoulliSpec(2, 3, 2))
        with pytest.raises(TypeError):
            conditional_entropy(object())

    def test_no_data_equals_prior_entropy(self):
        specs = [NormalNormalSpec(1.0, 2.5, 1.0, 0),
                 BetaBernoulliSpec(2.0, 3.0, 0),
                 GammaPoissonSpec(1.5, 0.5, 0)]
        for spec in specs:
            assert conditional_entropy(spec) == pytest.approx(prior_entropy(spec),
                                                              abs=1e-14)


class TestSamplers:
    def test_beta_prior_moments(self):
        draws = sample_prior(BetaBernoulliSpec(2.0, 2.0, 0), 100_000, seed=1)
        assert draws.mean() == pytest.approx(0.5, abs=0.01)

    def test_conjugate_update_targets_right_posterior(self):
        spec = BetaBernoulliSpec(1.0, 1.0, 3)
        draws = sample_posterior(spec, 2.0, 100_000, seed=2)
        assert posterior_params(spec, 2.0) == (3.0, 2.0)
        assert draws.mean() == pytest.approx(0.6, abs=0.01)  # mean of Beta(3,2)

    def test_seed_repetition_is_bit_identical(self):
        spec = GammaPoissonSpec(2.0, 1.0, 4)
        a = sample_prior(spec, 1000, seed=9)
        b = sample_prior(spec, 1000, seed=9)
        np.testing.assert_array_equal(a, b)

    def test_data_shapes_and_support(self):
        nn = sample_data(NormalNormalSpec(0, 1, 1, 5), 0.3, seed=3)
        bb = sample_data(BetaBernoulliSpec(1, 1, 5), 0.3, seed=3)
        gp = sample_data(GammaPoissonSpec(1, 1, 5), 2.5, seed=3)
        assert nn.shape == bb.shape == gp.shape == (5,)
        assert set(np.unique(bb)) <= {0.0, 1.0}
        assert np.all(gp >= 0) and np.all(gp == np.floor(gp))

    def test_zero_observations(self):
        spec = NormalNormalSpec(0, 1, 1, 0)
        data = sample_data(spec, 0.0, seed=0)
        assert data.size == 0
        assert suff_stat(spec, data) == 0.0

    def test_normal_posterior_update(self):
        spec = NormalNormalSpec(mu=0.0, tau2=1.0, sigma2=1.0, n=1)
        mean, var = posterior_params(spec, 2.0)
        assert var == pytest.approx(0.5, abs=1e-15)
        assert mean == pytest.approx(1.0, abs=1e-15)


class TestDensities:
    @pytest.mark.parametrize("spec,dist", [
        (NormalNormalSpec(0.5, 2.0, 1.0, 0), stats.norm(0.5, math.sqrt(2.0))),
        (BetaBernoulliSpec(2.0, 3.0, 0), stats.beta(2.0, 3.0)),
        (GammaPoissonSpec(1.5, 2.0, 0), stats.gamma(1.5, scale=0.5)),
    ])
    def test_prior_logpdf_matches_reference(self, spec, dist):
        x = np.array([0.05, 0.2, 0.5, 0.9, 1.7]) if not isinstance(
            spec, BetaBernoulliSpec) else np.array([0.05, 0.2, 0.5, 0.9, 0.99])
        np.testing.assert_allclose(log_prior_pdf(spec, x), dist.logpdf(x), atol=1e-10)

    def test_posterior_logpdf_matches_reference(self):
        spec = BetaBernoulliSpec(1.0, 1.0, 4)
        x = np.array([0.1, 0.4, 0.8])
        np.testing.assert_allclose(log_posterior_pdf(spec, 3.0, x),
                                   stats.beta(4.0, 2.0).logpdf(x), atol=1e-10)

    def test_outside_support_is_minus_inf(self):
        spec = GammaPoissonSpec(2.0, 1.0, 0)
        assert log_prior_pdf(spec, np.array([-1.0]))[0] == -math.inf
