"""Strictly proper scoring rules on finite discrete distributions.

Each rule S(q, y) rewards a forecast distribution q when outcome y
realizes, and is uniquely maximized in expectation by reporting the true
distribution.  The associated generalized entropy is H(p) = -E_{Y~p} S(p, Y)
and the divergence is D(p || q) = E_{Y~p}[S(p, Y) - S(q, Y)] >= 0.

Distributions are plain 1-D numpy arrays of non-negative weights summing
to one (within 1e-12).
"""

from __future__ import annotations

from enum import Enum

import numpy as np

__all__ = ["ScoreKind", "validate_distribution", "score", "entropy", "divergence"]

SUM_TOL = 1e-12


class ScoreKind(Enum):
    LOGARITHMIC = "log"
    QUADRATIC = "quadratic"
    SPHERICAL = "spherical"


def validate_distribution(weights, name: str = "weights") -> np.ndarray:
    """Validate and return a finite discrete distribution as a float array."""
    w = np.asarray(weights, dtype=float)
    if w.ndim != 1 or w.size < 1:
        raise ValueError(f"{name} must be a non-empty 1-D array")
    if not np.all(np.isfinite(w)):
        raise ValueError(f"{name} must be finite")
    if np.any(w < 0.0):
        raise ValueError(f"{name} must be non-negative")
    if abs(w.sum() - 1.0) > SUM_TOL:
        raise ValueError(f"{name} must sum to 1 within {SUM_TOL}, got {w.sum()!r}")
    return w


def score(kind: ScoreKind, q, y: int) -> float:
    """Score of forecast q at realized support index y.

    Logarithmic: ln q_y (-inf when q_y = 0).
    Quadratic (Brier): 2 q_y - sum_z q_z^2.
    Spherical: q_y / ||q||_2.
    """
    q = validate_distribution(q, "q")
    y = int(y)
    if not 0 <= y < q.size:
        raise IndexError(f"outcome index {y} out of range for support of size {q.size}")
    if kind is ScoreKind.LOGARITHMIC:
        return float(np.log(q[y])) if q[y] > 0.0 else -np.inf
    if kind is ScoreKind.QUADRATIC:
        return float(2.0 * q[y] - np.dot(q, q))
    if kind is ScoreKind.SPHERICAL:
        return float(q[y] / np.linalg.norm(q))
    raise TypeError(f"unknown score kind {kind!r}")


def entropy(kind: ScoreKind, p) -> float:
    """Generalized entropy H(p) = -E_{Y~p} S(p, Y).

    Shannon entropy for the log score; -sum p^2 for quadratic;
    -||p||_2 for spherical.  Zero-weight terms contribute nothing.
    """
    p = validate_distribution(p, "p")
    if kind is ScoreKind.LOGARITHMIC:
        pos = p[p > 0.0]
        return float(-np.dot(pos, np.log(pos)))
    if kind is ScoreKind.QUADRATIC:
        return float(-np.dot(p, p))
    if kind is ScoreKind.SPHERICAL:
        return float(-np.linalg.norm(p))
    raise TypeError(f"unknown score kind {kind!r}")


def divergence(kind: ScoreKind, p, q) -> float:
    """Score divergence D(p || q) >= 0, zero iff p = q.

    Kullback-Leibler for the log score (+inf when q_y = 0 < p_y);
    squared L2 distance for quadratic; ||p|| - <p, q>/||q|| for spherical.
    """
    p = validate_distribution(p, "p")
    q = validate_distribution(q, "q")
    if p.size != q.size:
        raise ValueError(f"support mismatch: {p.size} vs {q.size}")
    if np.array_equal(p, q):
        return 0.0
    if kind is ScoreKind.LOGARITHMIC:
        mask = p > 0.0
        if np.any(q[mask] == 0.0):
            return np.inf
        val = float(np.dot(p[mask], np.log(p[mask] / q[mask])))
    elif kind is ScoreKind.QUADRATIC:
        d = p - q
        val = float(np.dot(d, d))
    elif kind is ScoreKind.SPHERICAL:
        val = float(np.linalg.norm(p) - np.dot(p, q) / np.linalg.norm(q))
    else:
        raise TypeError(f"unknown score kind {kind!r}")
    # Mathematically >= 0; guard the last-ulp rounding of near-equal inputs.
    return max(val, 0.0)
