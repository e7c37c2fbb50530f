"""Counter-based random streams: one independent Philox stream per (seed, trial)."""

import numpy as np

SEED_MAX = 2**64 - 1


def trial_rng(seed, trial):
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be in [0, 2^64), got {seed}")
    if trial < 0:
        raise ValueError(f"trial index must be non-negative, got {trial}")
    key = np.array([seed, trial], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def log_uniform(rng, lo, hi):
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
