"""
Counter-Based Seed Derivation

Every trial gets its own generator seeded from (root seed, trial index)
through the SplitMix64 finalizer, so trials can run in any order or in
parallel and still reproduce bit-for-bit.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> int:
    """One SplitMix64 output for the given 64-bit state."""
    z = (state + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(root: int, *path: int) -> int:
    """Mix a root seed with a path of counters, e.g. derive_seed(seed, trial)."""
    seed = int(root) & MASK64
    for counter in path:
        seed = splitmix64(seed ^ ((int(counter) * GOLDEN_GAMMA) & MASK64))
    return seed


def trial_rng(root: int, *path: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(root, *path))
