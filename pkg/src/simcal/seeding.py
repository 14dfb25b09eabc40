"""Deterministic seed derivation.

Every stochastic routine derives its generator from a master seed plus an
integer key path, so results are reproducible and independent of execution
order or worker count.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

# stream tags for derived seeds
REAL_STREAM = 1
SIM_STREAM = 2
CANDIDATE_STREAM = 3
REP_STREAM = 4
MC_STREAM = 5


def child_seed(master_seed: int, *key: int) -> np.random.SeedSequence:
    if master_seed < 0 or any(k < 0 for k in key):
        raise InvalidInputError("seeds and key components must be nonnegative")
    return np.random.SeedSequence((int(master_seed),) + tuple(int(k) for k in key))


def derived_rng(master_seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(child_seed(master_seed, *key))
