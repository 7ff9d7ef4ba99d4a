"""
Balls and Bins

Throw 2^k balls into two bins with the 4-wise independent sign hash and
record the normalized maximum load max(L, 2^k - L) / 2^k. Its excess over
1/2 shrinks like 2^{-k/2}, so a sign hash tells 2^k-point sets from
2^{k'}-point sets. The display formula

    0.5 + sqrt(2/pi) * 2^{-k/2}

is kept as ``predicted``; the exact binomial expectation
``expected_max_load`` is the reference the simulation is compared against.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from src.errors import UsageError
from src.hashing import derive_seed, evaluate_batch, sample_coefficients

logger = logging.getLogger(__name__)

MAX_BALL_BITS = 26

# Cap on hash evaluations held in memory at once.
_BATCH_CELLS = 1 << 22


def predicted_max_load(k: int) -> float:
    return 0.5 + math.sqrt(2 / math.pi) * 2.0 ** (-k / 2)


def expected_max_load(k: int) -> float:
    """1/2 + 2^-k * E|L - 2^{k-1}| for L ~ Bin(2^k, 1/2)."""
    balls = 1 << k
    if balls == 1:
        return 1.0
    # For an even number of fair trials E|L - N/2| = (N/2) * P(L = N/2).
    deviation = (balls / 2) * float(binom.pmf(balls // 2, balls, 0.5))
    return 0.5 + deviation / balls


@dataclass(frozen=True)
class BallsBinsResult:
    k: int
    trials: int
    average_max_load: float
    predicted: float
    expected: float

    @property
    def offset(self) -> float:
        return self.average_max_load - 0.5

    @property
    def expected_offset(self) -> float:
        return self.expected - 0.5

    @property
    def relative_offset_error(self) -> float:
        return abs(self.offset - self.expected_offset) / self.expected_offset

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "trials": self.trials,
            "average_max_load": self.average_max_load,
            "predicted": self.predicted,
            "expected": self.expected,
            "relative_offset_error": self.relative_offset_error,
        }


def simulate_max_load(k: int, trials: int, seed: int) -> BallsBinsResult:
    """Average normalized max load of 2^k balls over ``trials`` sign hashes."""
    if not 0 <= k <= MAX_BALL_BITS:
        raise UsageError(f"Ball count exponent must be in [0, {MAX_BALL_BITS}], got {k}")
    if trials < 1:
        raise UsageError(f"Need at least one trial, got {trials}")

    balls = np.arange(1 << k, dtype=np.uint64)
    batch = max(1, _BATCH_CELLS >> k)
    loads = []
    for chunk, start in enumerate(range(0, trials, batch)):
        count = min(batch, trials - start)
        rng = np.random.default_rng(derive_seed(seed, k, chunk))
        heads = (evaluate_batch(sample_coefficients(rng, count), balls) & np.uint64(1)).sum(axis=1)
        loads.append(np.maximum(heads, balls.size - heads) / balls.size)
    average = float(np.mean(np.concatenate(loads)))

    return BallsBinsResult(
        k=k,
        trials=trials,
        average_max_load=average,
        predicted=predicted_max_load(k),
        expected=expected_max_load(k),
    )


def balls_bins(k: int, k_prime: int, trials: int, seed: int = 0) -> tuple[BallsBinsResult, BallsBinsResult, float]:
    """
    Compare 2^k and 2^{k'} balls.

    Returns:
        (result for 2^k balls, result for 2^{k'} balls, gap in average max load)
    """
    if not 0 <= k < k_prime <= MAX_BALL_BITS:
        raise UsageError(f"Need 0 <= k < k' <= {MAX_BALL_BITS}, got k={k}, k'={k_prime}")
    low = simulate_max_load(k, trials, seed)
    high = simulate_max_load(k_prime, trials, seed)
    gap = low.average_max_load - high.average_max_load
    logger.info(
        f"Balls and bins k={k}: {low.average_max_load:.5f}, k'={k_prime}: {high.average_max_load:.5f}, "
        f"gap {gap:.5f}"
    )
    return low, high, gap
