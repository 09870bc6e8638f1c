"""Conjugate families with closed-form conditional entropy under the log score.

Three models are built in, each bundling prior hyperparameters with the
sample size n of the experiment:

* Normal-Normal: X_i | theta ~ N(theta, sigma2), theta ~ N(mu, tau2).
* Beta-Bernoulli: X_i | theta ~ Bernoulli(theta), theta ~ Beta(alpha, beta).
* Gamma-Poisson: X_i | theta ~ Poisson(theta), theta ~ Gamma(alpha, beta)
  with beta a *rate*, so the posterior update is (alpha + sum x, beta + n).

`conditional_entropy` returns the expected posterior differential entropy
under the prior predictive, i.e. the minimum Bayes risk of the disclosure
game for the log score.  The outer expectation is exact: a Beta-Binomial
sum over the sufficient statistic for Beta-Bernoulli, and a truncated
Negative-Binomial sum with a rigorous tail bound for Gamma-Poisson.
For Normal-Normal the posterior variance does not depend on the data, so
no expectation is needed.

Sampling helpers draw from prior, likelihood, and conjugate posterior;
they are deterministic given a seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .rng import as_generator
from .specfun import digamma, ln_beta, ln_gamma

__all__ = [
    "NormalNormalSpec",
    "BetaBernoulliSpec",
    "GammaPoissonSpec",
    "nn_conditional_entropy",
    "beta_posterior_entropy",
    "bb_conditional_entropy",
    "gamma_posterior_entropy",
    "gp_conditional_entropy",
    "conditional_entropy",
    "prior_entropy",
    "beta_binomial_pmf",
    "sample_prior",
    "sample_data",
    "suff_stat",
    "posterior_params",
    "sample_posterior",
    "log_prior_pdf",
    "log_posterior_pdf",
]

_HALF_LN_2PI_E = 0.5 * math.log(2.0 * math.pi * math.e)


def _check_positive(value: float, name: str) -> None:
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be a finite positive real, got {value!r}")


def _check_sample_size(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"n must be a non-negative integer, got {n!r}")


@dataclass(frozen=True)
class NormalNormalSpec:
    """Normal observations with known variance and a normal prior on the mean."""

    mu: float
    tau2: float
    sigma2: float
    n: int = 0

    def __post_init__(self):
        _check_positive(self.tau2, "tau2")
        _check_positive(self.sigma2, "sigma2")
        _check_sample_size(self.n)


@dataclass(frozen=True)
class BetaBernoulliSpec:
    """Bernoulli observations with a Beta prior on the success probability."""

    alpha: float
    beta: float
    n: int = 0

    def __post_init__(self):
        _check_positive(self.alpha, "alpha")
        _check_positive(self.beta, "beta")
        _check_sample_size(self.n)


@dataclass(frozen=True)
class GammaPoissonSpec:
    """Poisson observations with a Gamma(shape, rate) prior on the mean."""

    alpha: float
    beta: float
    n: int = 0

    def __post_init__(self):
        _check_positive(self.alpha, "alpha")
        _check_positive(self.beta, "beta")
        _check_sample_size(self.n)


# ---------------------------------------------------------------------------
# Closed-form entropies
# ---------------------------------------------------------------------------

def nn_conditional_entropy(spec: NormalNormalSpec) -> float:
    """Expected posterior entropy for Normal-Normal: 0.5 ln(2 pi e tau2_post).

    The posterior variance (1/tau2 + n/sigma2)^-1 is data-independent, so
    the value does not depend on mu or on what is observed.
    """
    tau2_post = 1.0 / (1.0 / spec.tau2 + spec.n / spec.sigma2)
    return _HALF_LN_2PI_E + 0.5 * math.log(tau2_post)


def beta_posterior_entropy(a_tilde: float, b_tilde: float) -> float:
    """Differential entropy of Beta(a_tilde, b_tilde)."""
    _check_positive(a_tilde, "a_tilde")
    _check_positive(b_tilde, "b_tilde")
    return (ln_beta(a_tilde, b_tilde)
            - (a_tilde - 1.0) * digamma(a_tilde)
            - (b_tilde - 1.0) * digamma(b_tilde)
            + (a_tilde + b_tilde - 2.0) * digamma(a_tilde + b_tilde))


def beta_binomial_pmf(n: int, alpha: float, beta: float) -> np.ndarray:
    """Prior-predictive pmf of the success count s = 0..n under Beta(alpha, beta)."""
    _check_sample_size(n)
    _check_positive(alpha, "alpha")
    _check_positive(beta, "beta")
    log_nb = ln_beta(alpha, beta)
    out = np.empty(n + 1)
    for s in range(n + 1):
        log_choose = ln_gamma(n + 1.0) - ln_gamma(s + 1.0) - ln_gamma(n - s + 1.0)
        out[s] = math.exp(log_choose + ln_beta(alpha + s, beta + n - s) - log_nb)
    return out


def bb_conditional_entropy(spec: BetaBernoulliSpec) -> float:
    """Expected posterior entropy for Beta-Bernoulli, exact over the n+1 outcomes."""
    if spec.n == 0:
        return beta_posterior_entropy(spec.alpha, spec.beta)
    pmf = beta_binomial_pmf(spec.n, spec.alpha, spec.beta)
    total = 0.0
    for s in range(spec.n + 1):
        total += pmf[s] * beta_posterior_entropy(spec.alpha + s, spec.beta + spec.n - s)
    return total


def gamma_posterior_entropy(a_tilde: float, b_tilde: float) -> float:
    """Differential entropy of Gamma(shape a_tilde, rate b_tilde)."""
    _check_positive(a_tilde, "a_tilde")
    _check_positive(b_tilde, "b_tilde")
    return a_tilde - math.log(b_tilde) + ln_gamma(a_tilde) + (1.0 - a_tilde) * digamma(a_tilde)


def gp_conditional_entropy(spec: GammaPoissonSpec, tail_tol: float = 1e-10) -> float:
    """Expected posterior entropy for Gamma-Poisson.

    Sums Negative-Binomial(s; alpha, beta/(beta+n)) weights against
    Gamma(alpha+s, beta+n) entropies.  The sum stops once the geometric
    majorant of the remaining tail (pmf ratios are eventually < 1, and the
    per-term entropy grows at most linearly in s) is below tail_tol.
    """
    _check_positive(tail_tol, "tail_tol")
    if spec.n == 0:
        return gamma_posterior_entropy(spec.alpha, spec.beta)
    alpha, beta, n = spec.alpha, spec.beta, float(spec.n)
    rate_post = beta + n
    p0 = beta / rate_post          # NB success probability; pmf(0) = p0^alpha
    log_fail = math.log1p(-p0)
    log_pmf = alpha * math.log(p0)
    total = 0.0
    s = 0
    while True:
        h = gamma_posterior_entropy(alpha + s, rate_post)
        total += math.exp(log_pmf) * h
        ratio = math.exp(log_fail) * (alpha + s) / (s + 1.0)
        if s >= 1 and alpha + s >= 1.0 and ratio < 1.0:
            # All later ratios are <= qbar (monotone for alpha >= 1, else < 1-p0),
            # and |h(alpha+s')| <= |h(alpha+s+1)| + (s'-s-1) since dh/da <= 1 there.
            qbar = max(ratio, math.exp(log_fail))
            if qbar < 1.0:
                head = math.exp(log_pmf) * ratio
                h_next = abs(gamma_posterior_entropy(alpha + s + 1, rate_post))
                tail_bound = head * (h_next / (1.0 - qbar) + qbar / (1.0 - qbar) ** 2)
                if tail_bound < tail_tol:
                    break
        log_pmf += math.log(ratio)
        s += 1
        if s > 10_000_000:
            raise RuntimeError("Gamma-Poisson predictive sum failed to converge")
    return total


def conditional_entropy(spec, tail_tol: float = 1e-10) -> float:
    """Exact (or truncated-sum) conditional entropy for any built-in family."""
    if isinstance(spec, NormalNormalSpec):
        return nn_conditional_entropy(spec)
    if isinstance(spec, BetaBernoulliSpec):
        return bb_conditional_entropy(spec)
    if isinstance(spec, GammaPoissonSpec):
        return gp_conditional_entropy(spec, tail_tol)
    raise TypeError(f"unsupported family spec {type(spec).__name__}")


def prior_entropy(spec) -> float:
    """Differential entropy of the prior itself (the n = 0 posterior)."""
    if isinstance(spec, NormalNormalSpec):
        return _HALF_LN_2PI_E + 0.5 * math.log(spec.tau2)
    if isinstance(spec, BetaBernoulliSpec):
        return beta_posterior_entropy(spec.alpha, spec.beta)
    if isinstance(spec, GammaPoissonSpec):
        return gamma_posterior_entropy(spec.alpha, spec.beta)
    raise TypeError(f"unsupported family spec {type(spec).__name__}")


# ---------------------------------------------------------------------------
# Samplers and densities
# ---------------------------------------------------------------------------

def sample_prior(spec, count: int, seed) -> np.ndarray:
    """Draw `count` parameter values from the prior."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = as_generator(seed)
    if isinstance(spec, NormalNormalSpec):
        return rng.normal(spec.mu, math.sqrt(spec.tau2), size=count)
    if isinstance(spec, BetaBernoulliSpec):
        return rng.beta(spec.alpha, spec.beta, size=count)
    if isinstance(spec, GammaPoissonSpec):
        return rng.gamma(spec.alpha, 1.0 / spec.beta, size=count)
    raise TypeError(f"unsupported family spec {type(spec).__name__}")


def sample_data(spec, theta: float, seed) -> np.ndarray:
    """Draw the spec's n observations given the parameter value."""
    rng = as_generator(seed)
    if isinstance(spec, NormalNormalSpec):
        return rng.normal(theta, math.sqrt(spec.sigma2), size=spec.n)
    if isinstance(spec, BetaBernoulliSpec):
        return rng.binomial(1, theta, size=spec.n).astype(float)
    if isinstance(spec, GammaPoissonSpec):
        return rng.poisson(theta, size=spec.n).astype(float)
    raise TypeError(f"unsupported family spec {type(spec).__name__}")


def suff_stat(spec, data) -> float:
    """Sufficient statistic of a data vector for the conjugate update (the sum)."""
    data = np.asarray(data, dtype=float)
    if data.size != spec.n:
        raise ValueError(f"expected {spec.n} observations, got {data.size}")
    return float(data.sum())


def posterior_params(spec, stat: float) -> tuple[float, float]:
    """Posterior hyperparameters after observing sufficient statistic `stat`.

    Returns (mean, variance) for Normal-Normal and (shape-like pair) for the
    Beta and Gamma families.
    """
    if isinstance(spec, NormalNormalSpec):
        tau2_post = 1.0 / (1.0 / spec.tau2 + spec.n / spec.sigma2)
        mu_post = tau2_post * (spec.mu / spec.tau2 + stat / spec.sigma2)
        return mu_post, tau2_post
    if isinstance(spec, BetaBernoulliSpec):
        return spec.alpha + stat, spec.beta + spec.n - stat
    if isinstance(spec, GammaPoissonSpec):
        return spec.alpha + stat, spec.beta + spec.n
    raise TypeError(f"unsupported family spec {type(spec).__name__}")


def sample_posterior(spec, stat: float, count: int, seed) -> np.ndarray:
    """Draw `count` parameter values from the conjugate posterior."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = as_generator(seed)
    a, b = posterior_params(spec, stat)
    if isinstance(spec, NormalNormalSpec):
        return rng.normal(a, math.sqrt(b), size=count)
    if isinstance(spec, BetaBernoulliSpec):
        return rng.beta(a, b, size=count)
    if isinstance(spec, GammaPoissonSpec):
        return rng.gamma(a, 1.0 / b, size=count)
    raise TypeError(f"unsupported family spec {type(spec).__name__}")


def _normal_logpdf(x: np.ndarray, mean: float, var: float) -> np.ndarray:
    return -0.5 * (np.log(2.0 * math.pi * var) + (x - mean) ** 2 / var)


def _beta_logpdf(x: np.ndarray, a: float, b: float) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (a - 1.0) * np.log(x) + (b - 1.0) * np.log1p(-x) - ln_beta(a, b)
    return np.where((x > 0.0) & (x < 1.0), out, -np.inf)


def _gamma_logpdf(x: np.ndarray, a: float, rate: float) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        out = a * math.log(rate) - ln_gamma(a) + (a - 1.0) * np.log(x) - rate * x
    return np.where(x > 0.0, out, -np.inf)


def log_prior_pdf(spec, theta) -> np.ndarray:
    """Log prior density evaluated at parameter values `theta` (vectorized)."""
    theta = np.asarray(theta, dtype=float)
    if isinstance(spec, NormalNormalSpec):
        return _normal_logpdf(theta, spec.mu, spec.tau2)
    if isinstance(spec, BetaBernoulliSpec):
        return _beta_logpdf(theta, spec.alpha, spec.beta)
    if isinstance(spec, GammaPoissonSpec):
        return _gamma_logpdf(theta, spec.alpha, spec.beta)
    raise TypeError(f"unsupported family spec {type(spec).__name__}")


def log_posterior_pdf(spec, stat: float, theta) -> np.ndarray:
    """Log posterior density at `theta` given sufficient statistic `stat`."""
    theta = np.asarray(theta, dtype=float)
    a, b = posterior_params(spec, stat)
    if isinstance(spec, NormalNormalSpec):
        return _normal_logpdf(theta, a, b)
    if isinstance(spec, BetaBernoulliSpec):
        return _beta_logpdf(theta, a, b)
    if isinstance(spec, GammaPoissonSpec):
        return _gamma_logpdf(theta, a, b)
    raise TypeError(f"unsupported family spec {type(spec).__name__}")
