"""
Distributions and Entropy Measures

Exact probability distributions over {0,1}^n together with the entropy
measures the attack is built on:

- min-entropy H_inf(X) = -log2 max_x P_X(x)
- statistical distance = HALF the L1 distance of the probability vectors
- Euclidean distance d_2 of the probability vectors
- smooth min-entropy, computed through the mass-above-threshold
  characterization: H^delta_inf(X) >= k  <=>  sum_x max(P_X(x) - 2^-k, 0) <= delta

Smooth min-entropy is never computed by searching over nearby distributions.
The sorted probability vector gives a piecewise-linear mass curve whose
breakpoints are solved directly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from src.errors import DimensionError, ValidationError

logger = logging.getLogger(__name__)

MAX_BITS = 30
TOLERANCE = 1e-9
EXACT_MAX_BITS = 8

DENSE = "dense"
SPARSE = "sparse"

# Block size used when walking the domain in ascending point order.
_WALK_BLOCK = 1 << 16


# =============================================================================
# Data Structures
# =============================================================================

@dataclass(frozen=True, eq=False)
class Distribution:
    """
    A probability distribution over the domain {0,1}^n.

    Dense distributions hold all 2^n probabilities. Sparse distributions hold
    strictly increasing ``points`` with matching ``probs``; absent points have
    probability 0. Arrays are copied and made read-only on construction.
    """

    n: int
    probs: np.ndarray
    points: Optional[np.ndarray] = None

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or not 1 <= int(self.n) <= MAX_BITS:
            raise ValidationError(f"Domain bit-width must be in [1, {MAX_BITS}], got {self.n}")
        object.__setattr__(self, "n", int(self.n))

        probs = np.array(self.probs, dtype=np.float64).reshape(-1)
        if self.points is None:
            if probs.size != self.domain_size:
                raise ValidationError(
                    f"Dense distribution needs {self.domain_size} probabilities, got {probs.size}"
                )
        else:
            points = np.array(self.points, dtype=np.uint64).reshape(-1)
            if points.size != probs.size:
                raise ValidationError("Sparse points and probabilities differ in length")
            if points.size and int(points[-1]) >= self.domain_size:
                raise ValidationError(f"Point {int(points[-1]):#x} outside {{0,1}}^{self.n}")
            if points.size > 1 and not np.all(points[1:] > points[:-1]):
                raise ValidationError("Sparse points must be strictly increasing without duplicates")
            points.setflags(write=False)
            object.__setattr__(self, "points", points)

        if not np.all(np.isfinite(probs)):
            raise ValidationError("Probabilities must be finite")
        if probs.size and probs.min() < 0:
            raise ValidationError("Probabilities must be non-negative")
        total = math.fsum(probs)
        if abs(total - 1.0) > TOLERANCE:
            raise ValidationError(f"Probabilities sum to {total!r}, expected 1")

        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    # -------------------------------------------------------------------------
    # Construction
    # -------------------------------------------------------------------------

    @classmethod
    def dense(cls, n: int, probs: Iterable[float]) -> Distribution:
        return cls(n=n, probs=np.asarray(probs, dtype=np.float64))

    @classmethod
    def sparse(cls, n: int, points: Iterable[int], probs: Iterable[float]) -> Distribution:
        points = np.asarray(points, dtype=np.uint64)
        probs = np.asarray(probs, dtype=np.float64)
        order = np.argsort(points, kind="stable")
        return cls(n=n, probs=probs[order], points=points[order])

    @classmethod
    def from_arrays(cls, n: int, points: np.ndarray, probs: np.ndarray) -> Distribution:
        """
        Build a distribution choosing the representation automatically.

        Dense when the support exceeds 2^n / 8, sparse otherwise. Zero entries
        are dropped from sparse results.
        """
        points = np.asarray(points, dtype=np.uint64)
        probs = np.asarray(probs, dtype=np.float64)
        keep = probs > 0
        points, probs = points[keep], probs[keep]
        if points.size > (1 << n) / 8:
            vector = np.zeros(1 << n, dtype=np.float64)
            vector[points.astype(np.int64)] = probs
            return cls(n=n, probs=vector)
        return cls.sparse(n, points, probs)

    @classmethod
    def from_mapping(cls, n: int, mapping: dict[int, float]) -> Distribution:
        points = np.fromiter(mapping.keys(), dtype=np.uint64, count=len(mapping))
        probs = np.fromiter(mapping.values(), dtype=np.float64, count=len(mapping))
        order = np.argsort(points)
        return cls.from_arrays(n, points[order], probs[order])

    # -------------------------------------------------------------------------
    # Views
    # -------------------------------------------------------------------------

    @property
    def domain_size(self) -> int:
        return 1 << self.n

    @property
    def representation(self) -> str:
        return DENSE if self.points is None else SPARSE

    def support(self) -> tuple[np.ndarray, np.ndarray]:
        """Points with positive probability (ascending) and their probabilities."""
        if self.points is None:
            points = np.flatnonzero(self.probs > 0).astype(np.uint64)
            return points, self.probs[points.astype(np.int64)]
        keep = self.probs > 0
        return self.points[keep], self.probs[keep]

    @property
    def support_size(self) -> int:
        return int(np.count_nonzero(self.probs > 0))

    def probabilities(self, points: np.ndarray) -> np.ndarray:
        """Probabilities of arbitrary domain points (0 for points outside the support)."""
        points = np.asarray(points, dtype=np.uint64)
        if self.points is None:
            return self.probs[points.astype(np.int64)]
        return _lookup(self.points, self.probs, points)

    def probability(self, x: int) -> float:
        return float(self.probabilities(np.array([x], dtype=np.uint64))[0])

    def to_dense(self) -> Distribution:
        if self.points is None:
            return self
        vector = np.zeros(self.domain_size, dtype=np.float64)
        vector[self.points.astype(np.int64)] = self.probs
        return Distribution(n=self.n, probs=vector)

    def to_sparse(self) -> Distribution:
        points, probs = self.support()
        return Distribution(n=self.n, probs=probs, points=points)

    def max_probability(self) -> float:
        return float(self.probs.max()) if self.probs.size else 0.0

    def __repr__(self) -> str:
        return f"Distribution(n={self.n}, {self.representation}, support={self.support_size})"


@dataclass(frozen=True)
class EntropyReport:
    """Entropy summary of one distribution at a given smoothing level."""

    min_entropy: float
    smooth_min_entropy: float
    delta: float
    k: float
    mass_above_threshold: float
    biased_set_size: int

    def to_dict(self) -> dict:
        return {
            "min_entropy": self.min_entropy,
            "smooth_min_entropy": self.smooth_min_entropy,
            "delta": self.delta,
            "k": self.k,
            "mass_above_threshold": self.mass_above_threshold,
            "biased_set_size": self.biased_set_size,
        }


# =============================================================================
# Helpers
# =============================================================================

def _check_same_domain(a: Distribution, b: Distribution) -> None:
    if a.n != b.n:
        raise DimensionError(f"Distributions live on different domains (n={a.n} vs n={b.n})")


def _aligned(a: Distribution, b: Distribution) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Probabilities of a and b on the union of their supports."""
    _check_same_domain(a, b)
    if a.points is None and b.points is None:
        points = np.arange(a.domain_size, dtype=np.uint64)
        return points, a.probs, b.probs
    points = np.union1d(a.support()[0], b.support()[0]).astype(np.uint64)
    return points, a.probabilities(points), b.probabilities(points)


def _restrict(points: np.ndarray, subset: Optional[Iterable[int]]) -> np.ndarray:
    if subset is None:
        return np.ones(points.shape, dtype=bool)
    subset = np.asarray(sorted(set(int(x) for x in subset)), dtype=np.uint64)
    return np.isin(points, subset)


def _check_k(k: float) -> float:
    k = float(k)
    if not math.isfinite(k) or k < 0:
        raise ValidationError(f"Entropy level k must be a finite value >= 0, got {k}")
    return k


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if not 0.0 <= delta <= 1.0:
        raise ValidationError(f"Smoothing parameter delta must be in [0, 1], got {delta}")
    return delta


def _check_exact(d: Distribution) -> None:
    if d.n > EXACT_MAX_BITS:
        raise ValidationError(f"Exact rational mode supports n <= {EXACT_MAX_BITS}, got n={d.n}")


# =============================================================================
# Entropy Measures
# =============================================================================

def min_entropy(d: Distribution) -> float:
    """-log2 of the largest point probability, in bits."""
    top = d.max_probability()
    if top <= 0:
        raise ValidationError("Distribution has no mass")
    return min(float(d.n), max(0.0, -math.log2(top)))


def statistical_distance(a: Distribution, b: Distribution, exact: bool = False) -> float | Fraction:
    """
    Statistical distance (1/2) * sum_x |P_a(x) - P_b(x)|.

    With ``exact=True`` (n <= 8) the sum is carried out over rationals and a
    Fraction is returned.
    """
    _, pa, pb = _aligned(a, b)
    if exact:
        _check_exact(a)
        return sum((abs(Fraction(float(x)) - Fraction(float(y))) for x, y in zip(pa, pb)), Fraction(0)) / 2
    return 0.5 * math.fsum(np.abs(pa - pb))


def euclidean_distance(a: Distribution, b: Distribution) -> float:
    """Exact L2 distance of the two probability vectors."""
    _, pa, pb = _aligned(a, b)
    return math.sqrt(math.fsum((pa - pb) ** 2))


def restricted_l1(a: Distribution, b: Distribution, subset: Optional[Iterable[int]] = None) -> float:
    """sum_{x in S} |P_a(x) - P_b(x)| (full L1, no halving)."""
    points, pa, pb = _aligned(a, b)
    mask = _restrict(points, subset)
    return math.fsum(np.abs(pa - pb)[mask])


def restricted_l2(a: Distribution, b: Distribution, subset: Optional[Iterable[int]] = None) -> float:
    """sqrt(sum_{x in S} (P_a(x) - P_b(x))^2)."""
    points, pa, pb = _aligned(a, b)
    mask = _restrict(points, subset)
    return math.sqrt(math.fsum(((pa - pb) ** 2)[mask]))


def mass_above_threshold(d: Distribution, k: float, exact: bool = False) -> float | Fraction:
    """
    sum_x max(P(x) - 2^-k, 0).

    Nondecreasing and continuous in k. ``exact=True`` (n <= 8) evaluates the
    sum over rationals using the exact binary value of each probability.
    """
    k = _check_k(k)
    _, probs = d.support()
    threshold = 2.0 ** -k
    if exact:
        _check_exact(d)
        t = Fraction(threshold)
        return sum((max(Fraction(float(p)) - t, Fraction(0)) for p in probs), Fraction(0))
    return math.fsum(np.maximum(probs - threshold, 0.0))


def smooth_min_entropy(d: Distribution, delta: float) -> float:
    """
    Largest k (capped at n) with mass_above_threshold(d, k) <= delta.

    With probabilities sorted p_1 >= p_2 >= ..., the mass above a threshold t
    in [p_{j+1}, p_j] is S_j - j*t where S_j is the sum of the j largest
    probabilities. The breakpoint values g_j = S_j - j*p_j are nondecreasing,
    so the last j with g_j <= delta fixes the segment and t = (S_j - delta)/j.
    """
    delta = _check_delta(delta)
    if delta == 0:
        return min_entropy(d)
    if delta >= 1:
        return float(d.n)

    _, probs = d.support()
    p = np.sort(probs)[::-1]
    top = np.cumsum(p)
    j = np.arange(1, p.size + 1, dtype=np.float64)
    at_breakpoints = np.maximum.accumulate(top - j * p)
    last = int(np.searchsorted(at_breakpoints, delta, side="right"))
    last = max(last, 1)

    threshold = (top[last - 1] - delta) / last
    if threshold <= 0:
        return float(d.n)
    return min(float(d.n), max(0.0, -math.log2(threshold)))


def biased_set(d: Distribution, k: float) -> np.ndarray:
    """Points whose probability exceeds 2^-k, ascending."""
    k = _check_k(k)
    points, probs = d.support()
    return points[probs > 2.0 ** -k]


def smoothing_witness(d: Distribution, k: float) -> Distribution:
    """
    A distribution Y with H_inf(Y) >= k at statistical distance exactly
    mass_above_threshold(d, k) from d.

    Every probability is capped at 2^-k and the removed excess is poured onto
    points below the cap in ascending point order, never exceeding the cap.
    """
    k = _check_k(k)
    if k > d.n:
        raise ValidationError(f"No distribution on {{0,1}}^{d.n} has min-entropy {k} > n")

    cap = 2.0 ** -k
    points, probs = d.support()
    excess = math.fsum(np.maximum(probs - cap, 0.0))
    if excess <= 0:
        return d

    capped = np.minimum(probs, cap)
    capacity = d.domain_size * cap - math.fsum(capped)
    if excess > capacity + TOLERANCE:
        raise ValidationError(f"Excess mass {excess} exceeds available capacity {capacity}")

    fill_points: list[np.ndarray] = []
    fill_amounts: list[np.ndarray] = []
    remaining = excess
    start = 0
    while remaining > 0 and start < d.domain_size:
        stop = min(d.domain_size, start + _WALK_BLOCK)
        block = np.arange(start, stop, dtype=np.uint64)
        current = _lookup(points, capped, block)
        room = np.maximum(cap - current, 0.0)
        cumulative = np.cumsum(room)
        if cumulative[-1] < remaining:
            take = room
            remaining -= math.fsum(room)
        else:
            last = int(np.searchsorted(cumulative, remaining, side="left"))
            take = np.zeros_like(room)
            take[:last] = room[:last]
            take[last] = remaining - (cumulative[last - 1] if last else 0.0)
            remaining = 0.0
        used = take > 0
        fill_points.append(block[used])
        fill_amounts.append(take[used])
        start = stop

    if remaining > TOLERANCE:
        raise ValidationError(f"Could not place {remaining} of excess mass")

    all_points = np.concatenate([points] + fill_points)
    all_probs = np.concatenate([capped] + fill_amounts)
    order = np.argsort(all_points, kind="stable")
    all_points, all_probs = all_points[order], all_probs[order]
    unique_points, first = np.unique(all_points, return_index=True)
    merged = np.add.reduceat(all_probs, first) if all_points.size else all_probs

    logger.debug(f"Witness for k={k}: moved {excess:.6g} mass onto {sum(p.size for p in fill_points)} points")
    return Distribution.from_arrays(d.n, unique_points, merged)


def _lookup(points: np.ndarray, probs: np.ndarray, query: np.ndarray) -> np.ndarray:
    if points.size == 0:
        return np.zeros(query.shape, dtype=np.float64)
    idx = np.searchsorted(points, query)
    idx_clipped = np.minimum(idx, points.size - 1)
    found = points[idx_clipped] == query
    return np.where(found, probs[idx_clipped], 0.0)


def entropy_report(d: Distribution, delta: float, k: Optional[float] = None) -> EntropyReport:
    """
    Summarize d at smoothing level delta.

    ``k`` selects the threshold for the biased set and defaults to the
    smooth min-entropy itself.
    """
    smooth = smooth_min_entropy(d, delta)
    level = smooth if k is None else _check_k(k)
    return EntropyReport(
        min_entropy=min_entropy(d),
        smooth_min_entropy=smooth,
        delta=float(delta),
        k=level,
        mass_above_threshold=mass_above_threshold(d, level),
        biased_set_size=int(biased_set(d, level).size),
    )
