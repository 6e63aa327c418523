"""Seeded, counter-based random streams.

Every stream is a Philox generator keyed by a SeedSequence hash of an integer
tuple, e.g. ``(base_seed, N, trial)``.  Streams with distinct tuples are
statistically independent, so trials can run in any order or in parallel.
"""

from __future__ import annotations

from typing import Sequence, Union

import numpy as np

SeedLike = Union[int, Sequence[int], np.random.Generator]


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (int, np.integer)):
        key = [int(seed)]
    else:
        key = [int(s) for s in seed]
    if any(k < 0 for k in key):
        raise ValueError(f"seeds must be nonnegative integers, got {key}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def substream(base_seed: int, *indices: int) -> np.random.Generator:
    """Independent stream for one (base_seed, *indices) cell, e.g. a trial."""
    return make_rng((base_seed, *indices))
