"""Deterministic random-stream plumbing shared by samplers and estimators.

Replicate i of a run seeded with s always draws from the stream spawned at
index i of SeedSequence(s), so results are a pure function of (inputs, seed)
no matter how work is scheduled across threads.
"""

from __future__ import annotations

import numpy as np

__all__ = ["as_generator", "replicate_streams"]


def as_generator(seed) -> np.random.Generator:
    """Return a Generator; ints/SeedSequences seed a fresh PCG64, Generators pass through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def replicate_streams(seed: int, count: int) -> list[np.random.SeedSequence]:
    """Spawn `count` independent child streams of `seed`, indexed by replicate."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return np.random.SeedSequence(seed).spawn(count)
