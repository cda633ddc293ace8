"""Deterministic independent random streams keyed by (master seed, stream key)."""

import numpy as np


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """PCG64 generator for ``key`` (e.g. a worker index) under ``master_seed``.

    Distinct keys give statistically independent streams via SeedSequence spawn keys.
    """
    ss = np.random.SeedSequence(entropy=int(master_seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))
