"""
Sliced Distinguisher

The attack distinguisher is built in two layers:

1. a random 4-wise independent sign function D: {0,1}^n -> {-1,+1}
2. a random slicing h: {0,1}^n -> [0, T) with one advice sign per slice

    D_hat(x) = beta_{h(x)} * D(x)

where beta_i is the sign of D's advantage restricted to slice i. The advice
is computed from the exact distributions X and Y at build time; it is the
non-uniform part of the attack and is carried as data.

All advantages use the +/-1 convention:

    Adv^D(X; Y) = | sum_x D(x) * (P_X(x) - P_Y(x)) |
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from src.distributions import Distribution, euclidean_distance
from src.errors import DimensionError, UsageError
from src.hashing import SignHash, SliceHash, eval_sign, eval_slice

# Advice is stored as one int8 per slice.
MAX_ADVICE_BITS = 24

SignFunction = Union[Callable[[np.ndarray], np.ndarray], Sequence[int], np.ndarray]


# =============================================================================
# Helpers
# =============================================================================

def difference_on_support(X: Distribution, Y: Distribution) -> tuple[np.ndarray, np.ndarray]:
    """Union of both supports (ascending) and P_X - P_Y on it."""
    if X.n != Y.n:
        raise DimensionError(f"Distributions live on different domains (n={X.n} vs n={Y.n})")
    points = np.union1d(X.support()[0], Y.support()[0]).astype(np.uint64)
    return points, X.probabilities(points) - Y.probabilities(points)


def apply_sign(D: SignFunction, points: np.ndarray) -> np.ndarray:
    """Evaluate a distinguisher on points. Tables are indexed by point."""
    if callable(D):
        return np.asarray(D(points), dtype=np.float64)
    table = np.asarray(D, dtype=np.float64)
    return table[points.astype(np.int64)]


def _subset_mask(points: np.ndarray, subset: Optional[Iterable[int]]) -> np.ndarray:
    if subset is None:
        return np.ones(points.shape, dtype=bool)
    wanted = np.unique(np.asarray(list(subset), dtype=np.uint64))
    return np.isin(points, wanted)


# =============================================================================
# Advantages
# =============================================================================

def advantage_signed(
    D: SignFunction,
    X: Distribution,
    Y: Distribution,
    S: Optional[Iterable[int]] = None,
) -> float:
    """
    sum_{x in S} D(x) * (P_X(x) - P_Y(x)), before taking the absolute value.

    Args:
        D: Callable on a uint64 point array, or a table of length 2^n
        X, Y: Distributions on the same domain
        S: Optional restriction set; defaults to the whole domain

    Returns:
        The signed advantage, in [-2, 2]
    """
    points, delta = difference_on_support(X, Y)
    mask = _subset_mask(points, S)
    values = apply_sign(D, points[mask])
    return math.fsum(values * delta[mask])


def bias_mass(X: Distribution, Y: Distribution, S: Optional[Iterable[int]] = None) -> float:
    """sum_{x in S} (P_X(x) - P_Y(x)); the advantage of the constant +1 test on S."""
    points, delta = difference_on_support(X, Y)
    return math.fsum(delta[_subset_mask(points, S)])


def expected_squared_advantage(X: Distribution, Y: Distribution) -> float:
    """Mean squared advantage of a pairwise independent random sign: d_2(X; Y)^2."""
    return euclidean_distance(X, Y) ** 2


def euclidean_lower_bound(k: float, delta: float) -> float:
    """Euclidean distance guaranteed between X and every Y of min-entropy k."""
    return 2.0 ** (-float(k) / 2) * float(delta)


def distance_certificate(X: Distribution, Y: Distribution, k: float) -> float:
    """
    sum over the floor(2^k) heaviest points of X of max(P_X(x) - max_y P_Y(y), 0).

    A certificate of at least delta proves d_2(X; Y) >= 2^{-k/2} * delta by
    Cauchy-Schwarz over at most 2^k points. It is at least the mass of X above
    2^-k whenever Y has min-entropy k, so low smooth min-entropy implies it.
    """
    if X.n != Y.n:
        raise DimensionError(f"Distributions live on different domains (n={X.n} vs n={Y.n})")
    _, probs = X.support()
    heaviest = np.sort(probs)[::-1][: int(math.floor(2.0 ** float(k)))]
    return math.fsum(np.maximum(heaviest - Y.max_probability(), 0.0))


# =============================================================================
# Sliced Distinguisher
# =============================================================================

@dataclass(frozen=True, eq=False)
class SlicedDistinguisher:
    """D_hat(x) = advice[slicer(x)] * sign(x)."""

    sign: SignHash
    slicer: SliceHash
    advice: np.ndarray

    def __post_init__(self):
        advice = np.array(self.advice, dtype=np.int8).reshape(-1)
        if advice.size != self.slicer.slice_count:
            raise UsageError(f"Advice needs {self.slicer.slice_count} signs, got {advice.size}")
        if not np.all(np.abs(advice) == 1):
            raise UsageError("Advice signs must be -1 or +1")
        advice.setflags(write=False)
        object.__setattr__(self, "advice", advice)

    @property
    def slice_count(self) -> int:
        return self.slicer.slice_count

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.uint64)
        return self.advice[self.slicer(points)].astype(np.int64) * self.sign(points)


def evaluate(dhat: SlicedDistinguisher, x: int) -> int:
    return int(dhat.advice[eval_slice(dhat.slicer, x)]) * eval_sign(dhat.sign, x)


def slice_advantages(sign: SignHash, slicer: SliceHash, X: Distribution, Y: Distribution) -> np.ndarray:
    """Signed advantage of ``sign`` restricted to each slice, length T."""
    if slicer.t > MAX_ADVICE_BITS:
        raise UsageError(f"At most 2^{MAX_ADVICE_BITS} slices are supported, got T=2^{slicer.t}")
    points, delta = difference_on_support(X, Y)
    weighted = sign(points) * delta
    return np.bincount(slicer(points), weights=weighted, minlength=slicer.slice_count)


def advice_signs(per_slice: np.ndarray) -> np.ndarray:
    """Sign of each slice advantage; zero (including empty slices) maps to +1."""
    return np.where(np.asarray(per_slice) < 0, -1, 1).astype(np.int8)


def build_sliced(sign: SignHash, slicer: SliceHash, X: Distribution, Y: Distribution) -> SlicedDistinguisher:
    """Choose each slice's advice as the sign of its advantage on that slice."""
    advice = advice_signs(slice_advantages(sign, slicer, X, Y))
    return SlicedDistinguisher(sign=sign, slicer=slicer, advice=advice)


# =============================================================================
# Boolean View
# =============================================================================

def as_boolean(D: SignFunction) -> Callable[[np.ndarray], np.ndarray]:
    """D'(x) = (1 + D(x)) / 2, a {0,1}-valued test."""

    def boolean(points: np.ndarray) -> np.ndarray:
        return (1.0 + apply_sign(D, np.asarray(points, dtype=np.uint64))) / 2.0

    return boolean


def boolean_advantage(D: SignFunction, X: Distribution, Y: Distribution) -> float:
    """|E_X D' - E_Y D'| for D' = as_boolean(D); exactly half the +/-1 advantage."""
    return abs(advantage_signed(as_boolean(D), X, Y))
