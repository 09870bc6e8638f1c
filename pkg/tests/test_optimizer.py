"""Grid + Nelder-Mead maximizers, targeted searches, and growth sequences."""

import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import optimize as sciopt

from bayesimax.conjugate import (
    BetaBernoulliSpec,
    GammaPoissonSpec,
    NormalNormalSpec,
    bb_conditional_entropy,
    gp_conditional_entropy,
    nn_conditional_entropy,
)
from bayesimax.game import DiscreteGame
from bayesimax.mcent import McConfig
from bayesimax.optimizer import (
    Box,
    OptStatus,
    evaluate_sequence,
    grid_search,
    maximize_conditional_entropy,
    nearly_bayesimax_sequence,
    nelder_mead,
)
from bayesimax.scores import ScoreKind


def box1(lo, hi):
    return Box(np.array([lo]), np.array([hi]))


class TestBox:
    def test_rejects_crossed_bounds(self):
        with pytest.raises(ValueError):
            Box(np.array([1.0]), np.array([1.0]))

    def test_rejects_infinite_bounds(self):
        with pytest.raises(ValueError):
            Box(np.array([0.0]), np.array([math.inf]))


class TestGridSearch:
    def test_lattice_contains_quadratic_optimum(self):
        result = grid_search(lambda x: -(x[0] - 0.3) ** 2, box1(0.0, 1.0), 11)
        assert result.argmax[0] == pytest.approx(0.3, abs=1e-12)
        assert result.evaluations == 11

    def test_two_dimensional_bowl(self):
        box = Box(np.array([-1.0, -1.0]), np.array([1.0, 1.0]))
        result = grid_search(lambda x: -(x[0] ** 2 + x[1] ** 2), box, 21)
        np.testing.assert_allclose(result.argmax, [0.0, 0.0], atol=1e-12)

    def test_matches_finer_grid_within_one_cell(self):
        spec = BetaBernoulliSpec(1.0, 1.0, 4)

        def objective(x):
            return bb_conditional_entropy(replace(spec, alpha=x[0], beta=x[0]))

        coarse = grid_search(objective, box1(0.2, 5.0), 25)
        fine = grid_search(objective, box1(0.2, 5.0), 481)
        cell = (5.0 - 0.2) / 24
        assert abs(coarse.argmax[0] - fine.argmax[0]) <= cell

    def test_cap_enforced(self):
        box = Box(np.zeros(4), np.ones(4))
        with pytest.raises(ValueError):
            grid_search(lambda x: 0.0, box, 50, cap=10_000)

    def test_boundary_status(self):
        result = grid_search(lambda x: x[0], box1(0.0, 1.0), 5)
        assert result.status is OptStatus.BOUNDARY_HIT


class TestNelderMead:
    def test_quadratic_from_far_start(self):
        result = nelder_mead(lambda x: -(x[0] - 0.3) ** 2, box1(0.0, 1.0),
                             np.array([0.9]), tol=1e-10)
        assert result.argmax[0] == pytest.approx(0.3, abs=1e-6)
        assert result.status is OptStatus.CONVERGED

    def test_gamma_poisson_rate_search_hits_lower_boundary(self):
        # With the shape held fixed, the conditional entropy strictly grows
        # as the rate shrinks, so the search must stop at the box's lower edge.
        def objective(x):
            return gp_conditional_entropy(GammaPoissonSpec(2.0, x[0], 2))

        result = nelder_mead(objective, box1(0.1, 10.0), np.array([5.0]), tol=1e-9)
        assert result.argmax[0] == pytest.approx(0.1, abs=1e-6)
        assert result.status is OptStatus.BOUNDARY_HIT

    def test_curved_ridge(self):
        def neg_rosenbrock(x):
            return -((1.0 - x[0]) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2)

        box = Box(np.array([-2.0, -2.0]), np.array([2.0, 2.0]))
        result = nelder_mead(neg_rosenbrock, box, np.array([-1.2, 1.0]),
                             max_evals=4000, tol=1e-12)
        reference = sciopt.minimize(lambda x: -neg_rosenbrock(x), [-1.2, 1.0],
                                    method="Nelder-Mead",
                                    options={"xatol": 1e-12, "fatol": 1e-12,
                                             "maxfev": 4000})
        np.testing.assert_allclose(result.argmax, [1.0, 1.0], atol=1e-3)
        np.testing.assert_allclose(result.argmax, reference.x, atol=1e-3)

    def test_init_must_be_interior(self):
        with pytest.raises(ValueError):
            nelder_mead(lambda x: 0.0, box1(0.0, 1.0), np.array([0.0]))

    def test_trace_is_monotone_and_value_is_reevaluated(self):
        def objective(x):
            return -(x[0] - 0.7) ** 2

        result = nelder_mead(objective, box1(0.0, 1.0), np.array([0.2]))
        values = [v for _, v in result.trace]
        assert all(b >= a for a, b in zip(values, values[1:]))
        assert result.value == pytest.approx(objective(result.argmax), abs=1e-12)

    def test_deterministic(self):
        def objective(x):
            return math.sin(3 * x[0]) * math.cos(2 * x[1])

        box = Box(np.array([-2.0, -2.0]), np.array([2.0, 2.0]))
        a = nelder_mead(objective, box, np.array([0.5, -0.5]))
        b = nelder_mead(objective, box, np.array([0.5, -0.5]))
        np.testing.assert_array_equal(a.argmax, b.argmax)
        assert a.evaluations == b.evaluations


class TestMaximizeConditionalEntropy:
    def test_normal_normal_pushes_prior_variance_to_the_cap(self):
        spec = NormalNormalSpec(mu=0.0, tau2=1.0, sigma2=1.0, n=1)
        result = maximize_conditional_entropy(spec, {"tau2": (0.1, 100.0)})
        assert result.status is OptStatus.BOUNDARY_HIT
        assert result.argmax[0] == pytest.approx(100.0, abs=1e-6)
        assert result.value == pytest.approx(
            nn_conditional_entropy(replace(spec, tau2=100.0)), abs=1e-12)

    def test_symmetric_game_target(self):
        g = DiscreteGame(("a", "b"), np.array([[0.7, 0.3], [0.3, 0.7]]),
                         ScoreKind.LOGARITHMIC)
        result = maximize_conditional_entropy(g)
        np.testing.assert_allclose(result.argmax, [0.5, 0.5], atol=1e-4)

    def test_beta_bernoulli_argmax_is_symmetric(self):
        spec = BetaBernoulliSpec(1.0, 1.0, 4)
        result = maximize_conditional_entropy(spec, {"alpha": (0.2, 20.0),
                                                     "beta": (0.2, 20.0)})
        alpha, beta = result.argmax
        assert abs(alpha - beta) <= 0.05
        dense = max(
            bb_conditional_entropy(replace(spec, alpha=a, beta=a))
            for a in np.linspace(0.2, 5.0, 2000)
        )
        assert result.value >= dense - 1e-6

    def test_unknown_hyperparameter_rejected(self):
        with pytest.raises(ValueError):
            maximize_conditional_entropy(BetaBernoulliSpec(1, 1, 2),
                                         {"gamma": (0.1, 1.0)})

    def test_mc_backed_objective_is_deterministic(self):
        # Common random numbers: the stochastic objective is frozen by the
        # config seed, so two searches take identical paths.
        spec = NormalNormalSpec(0.0, 1.0, 1.0, 1)
        mc = McConfig(outer_reps=20, inner_draws=60, knn_k=3, seed=77)
        kwargs = dict(resolution=3, starts=2, max_evals=60, tol=1e-6)
        a = maximize_conditional_entropy(spec, {"tau2": (0.5, 4.0)}, mc=mc, **kwargs)
        b = maximize_conditional_entropy(spec, {"tau2": (0.5, 4.0)}, mc=mc, **kwargs)
        np.testing.assert_array_equal(a.argmax, b.argmax)
        assert a.value == b.value
        assert a.evaluations == b.evaluations


class TestSequences:
    def test_normal_normal_sequence_climbs_to_supremum(self):
        spec = NormalNormalSpec(mu=0.0, tau2=1.0, sigma2=1.0, n=1)
        result = nearly_bayesimax_sequence(spec, "tau2", factor=10.0, steps=6)
        assert result.strictly_increasing
        sup = 0.5 * math.log(2.0 * math.pi * math.e * spec.sigma2 / spec.n)
        assert sup - result.values[-1] <= 0.05
        assert result.values[-1] <= sup + 1e-9

    def test_gamma_poisson_shape_growth(self):
        spec = GammaPoissonSpec(2.0, 1.0, 3)
        result = nearly_bayesimax_sequence(spec, "alpha", factor=2.0, steps=6)
        assert result.strictly_increasing
        assert result.param_values == tuple(2.0 * 2.0 ** i for i in range(6))

    def test_flat_objective_is_flagged(self):
        result = evaluate_sequence(lambda v: 1.25, [1.0, 2.0, 4.0])
        assert result.non_decreasing
        assert not result.strictly_increasing

    def test_decreasing_objective_is_flagged(self):
        result = evaluate_sequence(lambda v: -v, [1.0, 2.0, 4.0])
        assert not result.non_decreasing

    def test_rejects_shrinking_factor(self):
        with pytest.raises(ValueError):
            nearly_bayesimax_sequence(NormalNormalSpec(0, 1, 1, 1), "tau2",
                                      factor=0.5)
