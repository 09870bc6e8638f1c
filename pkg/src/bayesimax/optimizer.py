"""Derivative-free maximization over boxes and the probability simplex.

The objectives here (conditional entropies of conjugate families, minimum
Bayes risks of finite games) are cheap, smooth, low-dimensional, and not
guaranteed concave, so the workhorse is a coarse lattice scan that seeds a
multi-start Nelder-Mead refinement.  Everything is deterministic: no
internal randomness, ties broken by lattice/start index, and
stochastic (Monte Carlo) objectives are made deterministic by freezing
their seed, turning the search into sample average approximation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from . import conjugate

__all__ = [
    "Box",
    "OptStatus",
    "OptResult",
    "SequenceResult",
    "grid_search",
    "nelder_mead",
    "maximize_over_simplex",
    "maximize_conditional_entropy",
    "evaluate_sequence",
    "nearly_bayesimax_sequence",
]


class OptStatus(Enum):
    CONVERGED = "converged"
    MAX_EVALS = "max_evals"
    BOUNDARY_HIT = "boundary_hit"


@dataclass(frozen=True)
class Box:
    """Axis-aligned search region with finite per-dimension bounds."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lower and upper must be 1-D arrays of equal length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("box bounds must be finite")
        if np.any(lo >= hi):
            raise ValueError("need lower < upper in every dimension")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.size

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def on_boundary(self, x: np.ndarray, tol: float) -> bool:
        return bool(np.any(x - self.lower <= tol) or np.any(self.upper - x <= tol))


@dataclass(frozen=True)
class OptResult:
    """Maximization outcome with a best-so-far trace for diagnostics."""

    argmax: np.ndarray
    value: float
    evaluations: int
    trace: tuple[tuple[np.ndarray, float], ...]
    status: OptStatus
    names: tuple[str, ...] | None = None


class _Tracker:
    """Counts evaluations and records strict improvements of the incumbent."""

    def __init__(self, objective: Callable[[np.ndarray], float]):
        self._objective = objective
        self.evaluations = 0
        self.trace: list[tuple[np.ndarray, float]] = []
        self.best_value = -math.inf
        self.best_point: np.ndarray | None = None

    def __call__(self, x: np.ndarray) -> float:
        value = float(self._objective(np.asarray(x, dtype=float)))
        self.evaluations += 1
        if value > self.best_value:
            self.best_value = value
            self.best_point = np.array(x, dtype=float)
            self.trace.append((self.best_point.copy(), value))
        return value


def grid_search(objective: Callable[[np.ndarray], float], box: Box,
                resolution: int, *, cap: int = 200_000) -> OptResult:
    """Evaluate a full lattice over the box and return the best point.

    Ties keep the earliest lattice point in row-major order.
    """
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    total = resolution ** box.dim
    if total > cap:
        raise ValueError(f"grid of {total} points exceeds cap {cap}")
    axes = [np.linspace(box.lower[i], box.upper[i], resolution) for i in range(box.dim)]
    tracked = _Tracker(objective)
    for point in itertools.product(*axes):
        tracked(np.array(point))
    best = tracked.best_point
    status = OptStatus.BOUNDARY_HIT if box.on_boundary(best, 0.0) else OptStatus.CONVERGED
    return OptResult(
        argmax=best,
        value=tracked.best_value,
        evaluations=tracked.evaluations,
        trace=tuple(tracked.trace),
        status=status,
    )


def nelder_mead(objective: Callable[[np.ndarray], float], box: Box, init,
                max_evals: int = 2000, tol: float = 1e-8) -> OptResult:
    """Maximize with a reflect/expand/contract/shrink simplex, projected onto the box.

    Stops when the simplex diameter drops below tol or the evaluation budget
    runs out.  Reports BOUNDARY_HIT when the maximizer sits within tol of
    the box boundary.
    """
    init = np.atleast_1d(np.asarray(init, dtype=float))
    if init.shape != box.lower.shape:
        raise ValueError("init has wrong dimension for box")
    if np.any(init <= box.lower) or np.any(init >= box.upper):
        raise ValueError("init must lie strictly inside the box")
    n = box.dim
    tracked = _Tracker(objective)

    simplex = [init.copy()]
    for i in range(n):
        step = 0.05 * (box.upper[i] - box.lower[i])
        vertex = init.copy()
        vertex[i] = vertex[i] + step if vertex[i] + step <= box.upper[i] else vertex[i] - step
        simplex.append(vertex)
    values = [tracked(v) for v in simplex]

    alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5
    status = OptStatus.MAX_EVALS
    while tracked.evaluations < max_evals:
        order = np.argsort(values)[::-1]  # descending: best first
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        diameter = max(np.max(np.abs(v - simplex[0])) for v in simplex[1:])
        if diameter < tol:
            status = OptStatus.CONVERGED
            break
        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        reflected = box.clip(centroid + alpha * (centroid - worst))
        f_reflected = tracked(reflected)
        if f_reflected > values[0]:
            expanded = box.clip(centroid + gamma * (reflected - centroid))
            f_expanded = tracked(expanded)
            if f_expanded > f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
        elif f_reflected > values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
        else:
            contracted = box.clip(centroid + rho * (worst - centroid))
            f_contracted = tracked(contracted)
            if f_contracted > values[-1]:
                simplex[-1], values[-1] = contracted, f_contracted
            else:
                for i in range(1, n + 1):
                    simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0])
                    values[i] = tracked(simplex[i])

    best = tracked.best_point
    value = tracked.best_value
    if status is OptStatus.CONVERGED and box.on_boundary(best, tol):
        status = OptStatus.BOUNDARY_HIT
    return OptResult(
        argmax=best,
        value=value,
        evaluations=tracked.evaluations,
        trace=tuple(tracked.trace),
        status=status,
    )


def _softmax(free: np.ndarray) -> np.ndarray:
    z = np.append(free, 0.0)
    z -= z.max()
    e = np.exp(z)
    return e / e.sum()


def _simplex_lattice(k: int, resolution: int):
    """All compositions of `resolution` into k parts, as simplex points."""
    for comp in itertools.combinations(range(resolution + k - 1), k - 1):
        parts = np.diff(np.concatenate(([-1], np.asarray(comp, dtype=int),
                                        [resolution + k - 1]))) - 1
        yield parts / resolution


def maximize_over_simplex(objective: Callable[[np.ndarray], float], k: int, *,
                          resolution: int = 12, starts: int = 8,
                          max_evals: int = 2000, tol: float = 1e-10) -> OptResult:
    """Lattice scan of the k-simplex, then Nelder-Mead in softmax coordinates.

    The refinement runs from the `starts` best lattice points; degenerate
    lattice weights are floored at 1e-9 before the log transform so every
    start is strictly interior.
    """
    if k < 2:
        raise ValueError("need a simplex of dimension k >= 2")
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    evaluations = 0
    trace: list[tuple[np.ndarray, float]] = []
    best_value = -math.inf
    lattice: list[tuple[float, int, np.ndarray]] = []
    for idx, w in enumerate(_simplex_lattice(k, resolution)):
        value = float(objective(w))
        evaluations += 1
        lattice.append((value, idx, w))
        if value > best_value:
            best_value = value
            trace.append((w.copy(), value))
    lattice.sort(key=lambda item: (-item[0], item[1]))

    span = 30.0
    free_box = Box(np.full(k - 1, -span), np.full(k - 1, span))
    winner: OptResult | None = None
    for _, _, w in lattice[:starts]:
        z = np.log(np.maximum(w, 1e-9))
        free = np.clip(z[:-1] - z[-1], -span + 1.0, span - 1.0)
        run = nelder_mead(lambda f: objective(_softmax(f)), free_box, free,
                          max_evals=max_evals, tol=tol)
        evaluations += run.evaluations
        for f, value in run.trace:
            if value > best_value:
                best_value = value
                trace.append((_softmax(f), value))
        if winner is None or run.value > winner.value:
            winner = run
    weights = _softmax(winner.argmax)
    return OptResult(
        argmax=weights,
        value=float(objective(weights)),
        evaluations=evaluations,
        trace=tuple(trace),
        status=winner.status,
    )


def _spec_objective(template, names: Sequence[str], mc=None, workers: int = 1,
                    tail_tol: float = 1e-10) -> Callable[[np.ndarray], float]:
    def objective(x: np.ndarray) -> float:
        spec = replace(template, **{name: float(v) for name, v in zip(names, x)})
        if mc is not None:
            from . import mcent

            return mcent.nested_mc_entropy(spec, mc, workers=workers).value
        return conjugate.conditional_entropy(spec, tail_tol)

    return objective


def maximize_conditional_entropy(target, box: dict[str, tuple[float, float]] | None = None,
                                 *, resolution: int = 9, starts: int = 8,
                                 max_evals: int = 2000, tol: float = 1e-10,
                                 mc=None, workers: int = 1,
                                 tail_tol: float = 1e-10) -> OptResult:
    """Search for a prior maximizing conditional entropy.

    For a conjugate family spec, `box` maps hyperparameter names to bounds
    and the remaining fields are held at the template's values; the
    objective is the exact evaluator unless an `mc` config is supplied, in
    which case every evaluation reuses that config's seed (common random
    numbers).  For a finite game the search runs over the simplex.
    """
    from . import game as game_mod

    if isinstance(target, game_mod.DiscreteGame):
        return game_mod.find_bayesimax(target, resolution=max(resolution, 2),
                                       refine_iters=max_evals, starts=starts, tol=tol)
    if not box:
        raise ValueError("conjugate-family search needs a box of hyperparameter bounds")
    names = tuple(box.keys())
    for name in names:
        if not hasattr(target, name):
            raise ValueError(f"{type(target).__name__} has no hyperparameter {name!r}")
    bounds = Box(np.array([box[name][0] for name in names]),
                 np.array([box[name][1] for name in names]))
    objective = _spec_objective(target, names, mc=mc, workers=workers, tail_tol=tail_tol)

    axes = [np.linspace(bounds.lower[i], bounds.upper[i], resolution)
            for i in range(bounds.dim)]
    lattice = [(float(objective(np.array(pt))), idx, np.array(pt))
               for idx, pt in enumerate(itertools.product(*axes))]
    evaluations = len(lattice)
    trace: list[tuple[np.ndarray, float]] = []
    best_value = -math.inf
    for value, _, pt in lattice:
        if value > best_value:
            best_value = value
            trace.append((pt.copy(), value))
    lattice.sort(key=lambda item: (-item[0], item[1]))

    margin = 1e-9 * (bounds.upper - bounds.lower)
    winner: OptResult | None = None
    for _, _, pt in lattice[:starts]:
        init = np.clip(pt, bounds.lower + margin, bounds.upper - margin)
        run = nelder_mead(objective, bounds, init, max_evals=max_evals, tol=tol)
        evaluations += run.evaluations
        for p, value in run.trace:
            if value > best_value:
                best_value = value
                trace.append((p.copy(), value))
        if winner is None or run.value > winner.value:
            winner = run
    return OptResult(
        argmax=winner.argmax,
        value=winner.value,
        evaluations=evaluations,
        trace=tuple(trace),
        status=winner.status,
        names=names,
    )


@dataclass(frozen=True)
class SequenceResult:
    """Objective values along a growing-hyperparameter path."""

    param: str | None
    param_values: tuple[float, ...]
    values: tuple[float, ...]
    non_decreasing: bool
    strictly_increasing: bool


def evaluate_sequence(objective: Callable[[float], float],
                      param_values: Sequence[float], *,
                      param: str | None = None, tol: float = 1e-12) -> SequenceResult:
    """Evaluate the objective along the given path and flag monotonicity."""
    values = tuple(float(objective(v)) for v in param_values)
    diffs = [b - a for a, b in zip(values, values[1:])]
    return SequenceResult(
        param=param,
        param_values=tuple(float(v) for v in param_values),
        values=values,
        non_decreasing=all(d >= -tol for d in diffs),
        strictly_increasing=all(d > tol for d in diffs),
    )


def nearly_bayesimax_sequence(spec, param: str, *, factor: float = 10.0,
                              steps: int = 6, tail_tol: float = 1e-10) -> SequenceResult:
    """Conditional entropy along geometric growth of one hyperparameter.

    Used when the supremum is not attained inside any box: the sequence of
    values should climb toward it, and a flat or decreasing stretch is
    flagged through the monotonicity fields.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    if factor <= 1.0:
        raise ValueError("factor must exceed 1")
    base = float(getattr(spec, param))
    values = [base * factor ** i for i in range(steps)]

    def objective(v: float) -> float:
        return conjugate.conditional_entropy(replace(spec, **{param: v}), tail_tol)

    return evaluate_sequence(objective, values, param=param)
