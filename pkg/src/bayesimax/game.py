"""Exact engine for finite prior disclosure games.

A game has a finite parameter set (omega, size K), a finite observation
space (size M), a row-stochastic K x M likelihood matrix, and a strictly
proper score.  The player observes x and reports a prior; the loss is the
negative score of the posterior induced by the report, evaluated at the
true parameter.  Everything here is exact linear algebra, so the engine
doubles as an oracle for the game-theoretic facts used elsewhere:
truth-telling is Bayes-optimal, the minimum Bayes risk decomposes as prior
entropy minus expected posterior-vs-prior divergence, and maximizers of
the minimum Bayes risk are exactly the least favorable priors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import optimizer as opt
from .rng import as_generator
from .scores import (
    ScoreKind,
    SUM_TOL,
    divergence,
    entropy,
    score as score_fn,
    validate_distribution,
)

__all__ = [
    "DiscreteGame",
    "RiskProfile",
    "TruthTellingReport",
    "LeastFavorableReport",
    "Decomposition",
    "ZeroMarginalError",
    "posterior",
    "marginal",
    "loss",
    "truth_telling_rule",
    "frequentist_risk",
    "bayes_risk",
    "min_bayes_risk",
    "decomposition",
    "risk_profile",
    "verify_truth_telling",
    "find_bayesimax",
    "check_least_favorable",
]


class ZeroMarginalError(ValueError):
    """The requested observation has zero mass under the given prior."""


@dataclass(frozen=True, eq=False)
class DiscreteGame:
    """Finite disclosure game: parameter labels, likelihood matrix, score."""

    omega: tuple[str, ...]
    likelihood: np.ndarray  # (K, M); row theta is P_theta over observations
    score: ScoreKind

    def __post_init__(self):
        lik = np.asarray(self.likelihood, dtype=float)
        if lik.ndim != 2:
            raise ValueError("likelihood must be a 2-D matrix")
        k, m = lik.shape
        if k < 2 or m < 1:
            raise ValueError(f"need K >= 2 parameters and M >= 1 observations, got {k}x{m}")
        if len(self.omega) != k:
            raise ValueError(f"omega has {len(self.omega)} labels for {k} likelihood rows")
        if not np.all(np.isfinite(lik)) or np.any(lik < 0.0):
            raise ValueError("likelihood entries must be finite and non-negative")
        row_sums = lik.sum(axis=1)
        if np.any(np.abs(row_sums - 1.0) > SUM_TOL):
            raise ValueError("likelihood rows must each sum to 1 within 1e-12")
        lik.setflags(write=False)
        object.__setattr__(self, "likelihood", lik)
        object.__setattr__(self, "omega", tuple(str(t) for t in self.omega))

    @property
    def k(self) -> int:
        return self.likelihood.shape[0]

    @property
    def m(self) -> int:
        return self.likelihood.shape[1]


@dataclass(frozen=True)
class RiskProfile:
    """Per-parameter frequentist risks of a rule, their sup, and a Bayes average."""

    per_theta: np.ndarray
    sup: float
    bayes: float


@dataclass(frozen=True)
class Decomposition:
    """Minimum Bayes risk split into prior entropy minus expected information."""

    h: float  # prior generalized entropy
    i: float  # expected posterior-vs-prior divergence (>= 0)
    r: float  # independently computed minimum Bayes risk; r = h - i up to rounding


@dataclass(frozen=True)
class TruthTellingReport:
    """Outcome of randomized dominance checks against the truthful report."""

    trials: int
    violations: int
    ties: int
    worst_margin: float
    tolerance: float
    injectivity_suspect: bool = field(default=False)

    @property
    def passed(self) -> bool:
        return self.violations == 0


@dataclass(frozen=True)
class LeastFavorableReport:
    """Whether the truthful Bayes rule's worst-case risk stays at the Bayes value."""

    profile: RiskProfile
    min_bayes_risk: float
    gap: float
    tol: float
    passed: bool


def _validate_prior(game: DiscreteGame, prior) -> np.ndarray:
    p = validate_distribution(prior, "prior")
    if p.size != game.k:
        raise ValueError(f"prior has size {p.size}, game has {game.k} parameters")
    return p


def _validate_rule(game: DiscreteGame, reports) -> np.ndarray:
    r = np.asarray(reports, dtype=float)
    if r.ndim != 2 or r.shape != (game.m, game.k):
        raise ValueError(f"rule must be an ({game.m}, {game.k}) array of reports")
    for x in range(game.m):
        validate_distribution(r[x], f"reports[{x}]")
    return r


def posterior(game: DiscreteGame, prior, x: int) -> np.ndarray:
    """Posterior over parameters after observing x under the given prior."""
    p = _validate_prior(game, prior)
    w = p * game.likelihood[:, x]
    s = w.sum()
    if s <= 0.0:
        raise ZeroMarginalError(f"observation {x} has zero marginal mass under this prior")
    return w / s


def marginal(game: DiscreteGame, prior) -> np.ndarray:
    """Prior-predictive distribution over observations."""
    p = _validate_prior(game, prior)
    return p @ game.likelihood


def loss(game: DiscreteGame, theta: int, x: int, report) -> float:
    """Negative score of the report-induced posterior at the true parameter.

    +inf when the report assigns zero marginal mass to x (degenerate report).
    """
    q = _validate_prior(game, report)
    if not 0 <= theta < game.k:
        raise IndexError(f"theta index {theta} out of range")
    if not 0 <= x < game.m:
        raise IndexError(f"observation index {x} out of range")
    w = q * game.likelihood[:, x]
    s = w.sum()
    if s <= 0.0:
        return math.inf
    return -score_fn(game.score, w / s, theta)


def truth_telling_rule(game: DiscreteGame, prior) -> np.ndarray:
    """The Bayes rule of the disclosure game: report the prior at every x."""
    p = _validate_prior(game, prior)
    return np.tile(p, (game.m, 1))


def frequentist_risk(game: DiscreteGame, reports, theta: int) -> float:
    """Expected loss of a rule under P_theta; zero-probability observations are skipped."""
    r = _validate_rule(game, reports)
    if not 0 <= theta < game.k:
        raise IndexError(f"theta index {theta} out of range")
    total = 0.0
    for x in range(game.m):
        w = game.likelihood[theta, x]
        if w == 0.0:
            continue
        term = loss(game, theta, x, r[x])
        if math.isinf(term):
            return math.inf
        total += w * term
    return total


def bayes_risk(game: DiscreteGame, reports, prior) -> float:
    """Prior-weighted frequentist risk of a rule."""
    p = _validate_prior(game, prior)
    total = 0.0
    for theta in range(game.k):
        if p[theta] == 0.0:
            continue
        term = frequentist_risk(game, reports, theta)
        if math.isinf(term):
            return math.inf
        total += p[theta] * term
    return total


def min_bayes_risk(game: DiscreteGame, prior) -> float:
    """Minimum Bayes risk of the prior: expected posterior generalized entropy.

    Observations with zero marginal mass contribute nothing (they occur
    with probability zero under the prior predictive).
    """
    p = _validate_prior(game, prior)
    m = p @ game.likelihood
    total = 0.0
    for x in range(game.m):
        if m[x] == 0.0:
            continue
        post = (p * game.likelihood[:, x]) / m[x]
        total += m[x] * entropy(game.score, post)
    return total


def decomposition(game: DiscreteGame, prior) -> Decomposition:
    """Prior entropy h, expected information i, and the minimum Bayes risk r.

    r is computed independently through the posterior-entropy route so the
    identity r = h - i is a genuine cross-check rather than a tautology.
    """
    p = _validate_prior(game, prior)
    h = entropy(game.score, p)
    m = p @ game.likelihood
    info = 0.0
    for x in range(game.m):
        if m[x] == 0.0:
            continue
        post = (p * game.likelihood[:, x]) / m[x]
        info += m[x] * divergence(game.score, post, p)
    return Decomposition(h=h, i=info, r=min_bayes_risk(game, p))


def risk_profile(game: DiscreteGame, reports, prior) -> RiskProfile:
    """Frequentist risk at every parameter plus sup and Bayes aggregates."""
    p = _validate_prior(game, prior)
    per_theta = np.array([frequentist_risk(game, reports, t) for t in range(game.k)])
    supported = p > 0.0
    return RiskProfile(
        per_theta=per_theta,
        sup=float(per_theta.max()),
        bayes=float(np.dot(p[supported], per_theta[supported])),
    )


def _constant_rule_bayes_risks(game: DiscreteGame, prior: np.ndarray,
                               reports: np.ndarray) -> np.ndarray:
    """Bayes risks of constant rules delta(x) == q for a batch of reports q.

    reports has shape (T, K); rows must have full support.  Vectorized over
    the batch; observation columns with zero likelihood weight are masked
    out of the sums (their loss terms carry zero probability).
    """
    lik = game.likelihood
    joint = reports[:, :, None] * lik[None, :, :]          # (T, K, M)
    marg = joint.sum(axis=1, keepdims=True)                # (T, 1, M)
    with np.errstate(divide="ignore", invalid="ignore"):
        post = joint / marg                                # (T, K, M)
    weights = prior[:, None] * lik                         # (K, M): pi_theta P_theta(x)
    active = weights > 0.0
    if game.score is ScoreKind.LOGARITHMIC:
        with np.errstate(divide="ignore", invalid="ignore"):
            neg_score = -np.log(post)
    elif game.score is ScoreKind.QUADRATIC:
        sq = np.einsum("tkm,tkm->tm", post, post)          # (T, M)
        neg_score = -(2.0 * post - sq[:, None, :])
    elif game.score is ScoreKind.SPHERICAL:
        norm = np.sqrt(np.einsum("tkm,tkm->tm", post, post))
        neg_score = -post / norm[:, None, :]
    else:  # pragma: no cover - enum is closed
        raise TypeError(f"unknown score kind {game.score!r}")
    with np.errstate(invalid="ignore"):
        terms = np.where(active[None, :, :], neg_score * weights[None, :, :], 0.0)
    return terms.sum(axis=(1, 2))


def verify_truth_telling(game: DiscreteGame, prior, trials: int,
                         seed: int) -> TruthTellingReport:
    """Check that no random alternative report beats the truthful one.

    Alternatives are drawn uniformly from the simplex.  A violation is a
    strictly lower Bayes risk (margin < -1e-12).  Alternatives whose induced
    posteriors coincide with the truthful ones at every observable x are
    counted as ties: they witness failure of report-to-posterior injectivity,
    under which the truthful report is optimal but not unique.
    """
    p = _validate_prior(game, prior)
    if np.any(p == 0.0):
        raise ValueError("prior must have full support")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tol = 1e-12
    rng = as_generator(seed)
    alts = rng.dirichlet(np.ones(game.k), size=trials)
    truth_risk = _constant_rule_bayes_risks(game, p, p[None, :])[0]
    alt_risks = _constant_rule_bayes_risks(game, p, alts)
    margins = alt_risks - truth_risk
    violations = int(np.sum(margins < -tol))

    # Posterior-equivalence ties, examined only where a tie is numerically plausible.
    m = p @ game.likelihood
    observable = m > 0.0
    lik_obs = game.likelihood[:, observable]
    truth_post = (p[:, None] * lik_obs) / (p @ lik_obs)[None, :]
    ties = 0
    for t in np.nonzero(margins <= tol)[0]:
        joint = alts[t][:, None] * lik_obs
        alt_post = joint / joint.sum(axis=0, keepdims=True)
        if np.max(np.abs(alt_post - truth_post)) <= 1e-9:
            ties += 1
    return TruthTellingReport(
        trials=trials,
        violations=violations,
        ties=ties,
        worst_margin=float(margins.min()),
        tolerance=tol,
        injectivity_suspect=ties > 0,
    )


def find_bayesimax(game: DiscreteGame, resolution: int = 12,
                   refine_iters: int = 2000, *, starts: int = 8,
                   tol: float = 1e-10, k_cap: int = 6) -> opt.OptResult:
    """Maximize the minimum Bayes risk over the probability simplex.

    Coarse simplex-lattice scan at the given resolution, then multi-start
    Nelder-Mead refinement in softmax coordinates anchored at the last
    component.  The winner is chosen by best value, ties broken by lowest
    start index, so the result does not depend on evaluation order.
    """
    if game.k > k_cap:
        raise ValueError(f"grid phase supports at most {k_cap} parameters, got {game.k}")

    def objective(weights: np.ndarray) -> float:
        return min_bayes_risk(game, weights)

    result = opt.maximize_over_simplex(
        objective, game.k, resolution=resolution, starts=starts,
        max_evals=refine_iters, tol=tol,
    )
    return opt.OptResult(
        argmax=result.argmax,
        value=result.value,
        evaluations=result.evaluations,
        trace=result.trace,
        status=result.status,
        names=game.omega,
    )


def check_least_favorable(game: DiscreteGame, prior,
                          tol: float = 1e-6) -> LeastFavorableReport:
    """Test least favorability: sup-risk of the truthful Bayes rule vs its Bayes risk."""
    p = _validate_prior(game, prior)
    rule = truth_telling_rule(game, p)
    profile = risk_profile(game, rule, p)
    r = min_bayes_risk(game, p)
    gap = profile.sup - r
    return LeastFavorableReport(
        profile=profile,
        min_bayes_risk=r,
        gap=float(gap),
        tol=tol,
        passed=bool(gap <= tol),
    )
