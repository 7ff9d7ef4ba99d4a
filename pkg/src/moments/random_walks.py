"""
Random Walk Moments

The attack's total advantage is a random walk

    Z = sum_x xi(x),   xi(x) = Delta(x) * 1[h(x) = 0] * D(x)

over a 4-wise independent sign D and (optionally) an independent slice hash
h with T slices. With sigma^2 = sum_x Var(xi(x)) = sum_x Delta(x)^2 / T the
fourth-moment machinery gives

    m2 = sigma^2
    m4 = sum_x E xi^4 + 3 * (sigma^4 - sum_x (E xi^2)^2)
    E|Z| >= m2^{3/2} / m4^{1/2}
    Pr[|Z| > sigma/3] > 1/17                      (Paley-Zygmund)

Two ways of averaging over the hash family are provided:

- exhaustive:   every member of the family over GF(2^m), m small; all
                moments are exact rationals
- monte-carlo:  independent draws from the GF(2^64) family

slice_advantage_moments also enumerates the per-slice advantages
Adv_i = sum_{h(x)=i} D(x) Delta(x) and their cross moments E[Adv_i Adv_j].
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from src.confidence import ProportionEstimate, wilson_interval
from src.distributions import Distribution
from src.errors import UsageError, ValidationError
from src.hashing import (
    FULL_FIELD_BITS,
    derive_seed,
    enumerate_family,
    evaluate_batch,
    sample_coefficients,
)

logger = logging.getLogger(__name__)

EXHAUSTIVE = "exhaustive"
MONTE_CARLO = "monte-carlo"
INDEPENDENCE_MODES = (EXHAUSTIVE, MONTE_CARLO)

ANTICONCENTRATION_FLOOR = 1 / 17
MIN_MONTE_CARLO_TRIALS = 1000

# Monte-Carlo draws are generated in fixed chunks, each from its own derived seed.
_CHUNK = 1024
_INT64_SAFE = 1 << 62
# (sign pattern, slice assignment) pairs enumerated by slice_advantage_moments.
_MAX_SLICE_PAIRS = 1 << 22


# =============================================================================
# Data Structures
# =============================================================================

@dataclass(frozen=True)
class WalkSpec:
    """
    Increment magnitudes Delta(x) of the walk, placed on points 0..len-1.

    Attributes:
        weights: Delta(x) values; finite, at least one nonzero
        independence: "exhaustive" (scaled-down family) or "monte-carlo"
        T: Slice count; T > 1 multiplies every increment by 1[h(x) = 0]
        field_bits: m for the exhaustive family GF(2^m)
    """

    weights: tuple[float, ...]
    independence: str = EXHAUSTIVE
    T: int = 1
    field_bits: int = 4

    def __post_init__(self):
        weights = tuple(float(w) for w in self.weights)
        if not weights:
            raise ValidationError("A walk needs at least one increment")
        if not all(math.isfinite(w) for w in weights):
            raise ValidationError("Walk weights must be finite")
        if not any(w != 0 for w in weights):
            raise ValidationError("At least one walk weight must be nonzero")
        if self.independence not in INDEPENDENCE_MODES:
            raise UsageError(f"Unknown independence mode '{self.independence}'")
        if self.T < 1 or self.T & (self.T - 1):
            raise ValidationError(f"Slice count T must be a power of 2, got {self.T}")
        if self.independence == EXHAUSTIVE:
            if len(weights) > 1 << self.field_bits:
                raise UsageError(f"{len(weights)} points do not fit in GF(2^{self.field_bits})")
            if self.t > self.field_bits:
                raise UsageError(f"T={self.T} needs more than {self.field_bits} output bits")
        object.__setattr__(self, "weights", weights)

    @property
    def t(self) -> int:
        return self.T.bit_length() - 1

    @property
    def points(self) -> np.ndarray:
        return np.arange(len(self.weights), dtype=np.uint64)

    @property
    def field_width(self) -> int:
        return self.field_bits if self.independence == EXHAUSTIVE else FULL_FIELD_BITS

    def sigma2(self) -> float:
        return math.fsum(w * w for w in self.weights) / self.T


@dataclass(frozen=True)
class MomentReport:
    """Moments of |Z| and the sandwich checks against sigma."""

    m1: float
    m2: float
    m4: float
    sigma2: float
    tail_prob: float
    bounds_ok: dict[str, bool]
    mode: str
    samples: int
    exact: Optional[dict[str, Fraction]] = field(default=None)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def all_ok(self) -> bool:
        return all(self.bounds_ok.values())

    def to_dict(self) -> dict:
        data = {
            "mode": self.mode,
            "samples": self.samples,
            "m1": self.m1,
            "m2": self.m2,
            "m4": self.m4,
            "sigma2": self.sigma2,
            "tail_prob": self.tail_prob,
            "bounds_ok": dict(self.bounds_ok),
        }
        if self.exact is not None:
            data["exact"] = {name: str(value) for name, value in self.exact.items()}
        return data


@dataclass(frozen=True)
class AnticoncentrationResult:
    """Pr[|Z| > sigma/3] against the 1/17 floor."""

    probability: float
    passed: bool
    mode: str
    estimate: Optional[ProportionEstimate] = None

    def to_dict(self) -> dict:
        return {
            "probability": self.probability,
            "passed": self.passed,
            "mode": self.mode,
            "floor": ANTICONCENTRATION_FLOOR,
            "estimate": self.estimate.to_dict() if self.estimate else None,
        }


@dataclass(frozen=True)
class SliceMomentReport:
    """
    Exact moments of the per-slice advantages Adv_i = sum_{h(x)=i} D(x) Delta(x).

    ``cross[i][j]`` is E[Adv_i * Adv_j] and ``total_abs`` is E sum_i |Adv_i|,
    both averaged over every (sign hash, slice hash) pair of the family.
    """

    T: int
    cross: tuple[tuple[Fraction, ...], ...]
    total_abs: Fraction
    d2_squared: Fraction
    checks: dict[str, bool]
    samples: int

    @property
    def all_ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "samples": self.samples,
            "cross": [[float(v) for v in row] for row in self.cross],
            "total_abs": float(self.total_abs),
            "d2_squared": float(self.d2_squared),
            "checks": dict(self.checks),
            "exact": {
                "total_abs": str(self.total_abs),
                "d2_squared": str(self.d2_squared),
                "diagonal": [str(self.cross[i][i]) for i in range(self.T)],
            },
        }


# =============================================================================
# Inequalities
# =============================================================================

def first_moment_lower_bound(m2: float, m4: float) -> float:
    """E|Z| >= m2^{3/2} / m4^{1/2}."""
    if not (m2 > 0 and m4 > 0):
        raise ValidationError(f"Moments must be positive, got m2={m2}, m4={m4}")
    if m4 < m2 * m2 * (1 - 1e-12):
        raise ValidationError(f"Moment ordering violated: m4={m4} < m2^2={m2 * m2}")
    return float(m2) ** 1.5 / math.sqrt(float(m4))


def paley_zygmund_lower(theta: float, m1: float, m2: float) -> float:
    """Pr[Z > theta * E Z] >= (1 - theta)^2 * m1^2 / m2 for Z >= 0."""
    if not 0 < theta < 1:
        raise ValidationError(f"theta must be in (0, 1), got {theta}")
    if m2 <= 0:
        raise ValidationError("Second moment must be positive")
    return (1 - theta) ** 2 * m1 * m1 / m2


def predicted_fourth_moment(spec: WalkSpec) -> Fraction:
    """sum E xi^4 + 3 (sigma^4 - sum (E xi^2)^2), exact for 4-wise independent increments."""
    T = Fraction(spec.T)
    second = [Fraction(w) ** 2 / T for w in spec.weights]
    fourth = [Fraction(w) ** 4 / T for w in spec.weights]
    sigma2 = sum(second, Fraction(0))
    return sum(fourth, Fraction(0)) + 3 * (sigma2 * sigma2 - sum((s * s for s in second), Fraction(0)))


def _sandwich(m1: float, m2: float, m4: float, sigma2: float) -> dict[str, bool]:
    slack = 1e-9
    sigma = math.sqrt(sigma2)
    return {
        "m1_lower": m1 >= sigma / math.sqrt(3) - slack,
        "m1_upper": m1 <= sigma + slack,
        "m4_lower": m4 >= sigma2 * sigma2 * (1 - slack),
        "m4_upper": m4 <= 3 * sigma2 * sigma2 * (1 + slack),
        "interpolation": first_moment_lower_bound(m2, m4) <= m1 * (1 + slack),
    }


# =============================================================================
# Exhaustive Family Averages
# =============================================================================

def _scaled_weights(weights: Sequence[float]) -> tuple[list[int], int]:
    """Integers W and a power of two s with weights == W / s exactly."""
    fractions = [Fraction(w) for w in weights]
    scale = max(f.denominator for f in fractions)
    return [int(f * scale) for f in fractions], scale


def _sign_patterns(outputs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    bits = (outputs & np.uint64(1)).astype(np.int64)
    patterns, counts = np.unique(bits, axis=0, return_counts=True)
    return 1 - 2 * patterns, counts


def _slice_masks(outputs: np.ndarray, t: int) -> tuple[np.ndarray, np.ndarray]:
    if t == 0:
        return np.ones((1, outputs.shape[1]), dtype=np.int64), np.ones(1, dtype=np.int64)
    inside = ((outputs & np.uint64((1 << t) - 1)) == 0).astype(np.int64)
    return np.unique(inside, axis=0, return_counts=True)


def _exhaustive_moments(spec: WalkSpec) -> MomentReport:
    W, scale = _scaled_weights(spec.weights)
    points = spec.points.tolist()
    signs, sign_counts = _sign_patterns(enumerate_family(spec.field_bits, points))
    family_size = int(sign_counts.sum())
    if spec.T > 1:
        masks, mask_counts = _slice_masks(enumerate_family(spec.field_bits, points), spec.t)
        total = family_size * family_size
    else:
        masks, mask_counts = _slice_masks(np.zeros((1, len(points)), dtype=np.uint64), 0)
        total = family_size

    use_int64 = sum(abs(w) for w in W) < _INT64_SAFE
    weight_vector = np.array(W, dtype=np.int64 if use_int64 else object)
    sigma2 = Fraction(sum(w * w for w in W), scale * scale * spec.T)
    # |Z| > sigma/3  <=>  9 * z^2 > sigma^2 * scale^2 in scaled units
    threshold = sigma2 * scale * scale

    s1 = s2 = s4 = tail = 0
    for mask, mask_count in zip(masks, mask_counts):
        walk = (signs if use_int64 else signs.astype(object)) @ (weight_vector * mask)
        values, inverse = np.unique(walk, return_inverse=True)
        # family members per walk value; counts stay below 2^53
        members = np.bincount(inverse.reshape(-1), weights=sign_counts)
        for z, count in zip(values.tolist(), members.tolist()):
            weight = int(count) * int(mask_count)
            z2 = z * z
            s1 += weight * abs(z)
            s2 += weight * z2
            s4 += weight * z2 * z2
            if 9 * z2 > threshold:
                tail += weight

    m1 = Fraction(s1, total * scale)
    m2 = Fraction(s2, total * scale ** 2)
    m4 = Fraction(s4, total * scale ** 4)
    exact = {"m1": m1, "m2": m2, "m4": m4, "sigma2": sigma2, "tail_prob": Fraction(tail, total)}

    bounds_ok = {
        "m1_lower": 3 * m1 * m1 >= sigma2,
        "m1_upper": m1 * m1 <= sigma2,
        "m2_equals_sigma2": m2 == sigma2,
        "m4_lower": m4 >= sigma2 * sigma2,
        "m4_upper": m4 <= 3 * sigma2 * sigma2,
        "interpolation": m2 ** 3 <= m1 * m1 * m4,
    }
    logger.info(
        f"Exhaustive moments over {total} hash choices "
        f"(GF(2^{spec.field_bits}), {len(points)} points, T={spec.T})"
    )
    return MomentReport(
        m1=float(m1),
        m2=float(m2),
        m4=float(m4),
        sigma2=float(sigma2),
        tail_prob=float(exact["tail_prob"]),
        bounds_ok=bounds_ok,
        mode=EXHAUSTIVE,
        samples=total,
        exact=exact,
    )


def family_squared_advantage(X: Distribution, Y: Distribution, field_bits: int) -> float:
    """Mean of (sum_x D(x) (P_X - P_Y))^2 over every sign hash of GF(2^field_bits)."""
    if X.n != Y.n:
        raise ValidationError(f"Distributions live on different domains (n={X.n} vs n={Y.n})")
    if X.n > field_bits:
        raise UsageError(f"Domain {{0,1}}^{X.n} does not embed in GF(2^{field_bits})")
    points = np.union1d(X.support()[0], Y.support()[0]).astype(np.uint64)
    delta = X.probabilities(points) - Y.probabilities(points)
    signs, counts = _sign_patterns(enumerate_family(field_bits, points.tolist()))
    advantages = signs.astype(np.float64) @ delta
    return math.fsum(counts * advantages ** 2) / int(counts.sum())


def slice_advantage_moments(spec: WalkSpec) -> SliceMomentReport:
    """
    Exact cross moments of the T per-slice advantages over the whole family.

    Pairwise independence of the sign gives E[Adv_i Adv_j] = 0 for i != j
    and E[Adv_i^2] = d2^2 / T. The total E sum_i |Adv_i| is compared with
    3^{-1/2} T^{1/2} d2, which the fourth-moment bound only guarantees while
    every slice walk has m4 <= 3 sigma^4 (always for T <= 2).

    Raises:
        UsageError: For Monte-Carlo specs or families too large to enumerate
    """
    if spec.independence != EXHAUSTIVE:
        raise UsageError("Slice advantage moments are only computed over the exhaustive family")
    W, scale = _scaled_weights(spec.weights)
    points = spec.points.tolist()
    signs, sign_counts = _sign_patterns(enumerate_family(spec.field_bits, points))
    family_size = int(sign_counts.sum())
    if spec.T > 1:
        outputs = enumerate_family(spec.field_bits, points) & np.uint64(spec.T - 1)
        assignments, assignment_counts = np.unique(outputs.astype(np.int64), axis=0, return_counts=True)
        total = family_size * family_size
    else:
        assignments = np.zeros((1, len(points)), dtype=np.int64)
        assignment_counts = np.ones(1, dtype=np.int64)
        total = family_size
    if len(signs) * len(assignments) > _MAX_SLICE_PAIRS:
        raise UsageError(
            f"{len(signs)} sign patterns x {len(assignments)} slice assignments exceed {_MAX_SLICE_PAIRS}"
        )

    use_int64 = sum(abs(w) for w in W) < _INT64_SAFE
    weight_column = np.array(W, dtype=np.int64 if use_int64 else object)[:, None]
    pattern_counts = sign_counts.astype(object)
    slices = np.arange(spec.T)

    cross = np.zeros((spec.T, spec.T), dtype=object)
    abs_sum = 0
    for assignment, assignment_count in zip(assignments, assignment_counts.tolist()):
        onehot = (assignment[:, None] == slices).astype(np.int64)
        # advantages[p, i]: slice i's advantage under sign pattern p
        advantages = (signs if use_int64 else signs.astype(object)) @ (weight_column * onehot)
        advantages = advantages.astype(object)
        cross += assignment_count * (advantages.T @ (advantages * pattern_counts[:, None]))
        abs_sum += assignment_count * int(np.abs(advantages).sum(axis=1) @ pattern_counts)

    exact_cross = tuple(
        tuple(Fraction(int(v), total * scale * scale) for v in row) for row in cross.tolist()
    )
    total_abs = Fraction(abs_sum, total * scale)
    d2_squared = Fraction(sum(w * w for w in W), scale * scale)
    per_slice = d2_squared / spec.T
    checks = {
        "second_moment": all(exact_cross[i][i] == per_slice for i in range(spec.T)),
        "cross_upper": all(v <= per_slice for row in exact_cross for v in row),
        "total_lower": 3 * total_abs * total_abs >= spec.T * d2_squared,
    }
    logger.info(
        f"Slice advantage moments over {total} hash pairs "
        f"(GF(2^{spec.field_bits}), {len(points)} points, T={spec.T})"
    )
    return SliceMomentReport(
        T=spec.T,
        cross=exact_cross,
        total_abs=total_abs,
        d2_squared=d2_squared,
        checks=checks,
        samples=total,
    )


# =============================================================================
# Monte-Carlo Averages
# =============================================================================

def _walk_samples(spec: WalkSpec, trials: int, seed: int) -> np.ndarray:
    weights = np.asarray(spec.weights, dtype=np.float64)
    points = spec.points
    chunks = []
    for chunk, start in enumerate(range(0, trials, _CHUNK)):
        count = min(_CHUNK, trials - start)
        rng = np.random.default_rng(derive_seed(seed, chunk))
        signs = 1.0 - 2.0 * (evaluate_batch(sample_coefficients(rng, count), points) & np.uint64(1))
        increments = signs * weights
        if spec.T > 1:
            slices = evaluate_batch(sample_coefficients(rng, count), points) & np.uint64(spec.T - 1)
            increments = increments * (slices == 0)
        chunks.append(increments.sum(axis=1))
    return np.concatenate(chunks)


def _monte_carlo_moments(spec: WalkSpec, trials: int, seed: int) -> MomentReport:
    if trials < 1:
        raise UsageError(f"Monte-Carlo moments need at least one trial, got {trials}")
    walk = np.abs(_walk_samples(spec, trials, seed))
    sigma2 = spec.sigma2()
    m1 = float(np.mean(walk))
    m2 = float(np.mean(walk ** 2))
    m4 = float(np.mean(walk ** 4))
    tail = float(np.mean(walk > math.sqrt(sigma2) / 3))
    logger.info(f"Monte-Carlo moments over {trials} draws (seed={seed}, {len(spec.weights)} points, T={spec.T})")
    return MomentReport(
        m1=m1,
        m2=m2,
        m4=m4,
        sigma2=sigma2,
        tail_prob=tail,
        bounds_ok=_sandwich(m1, m2, m4, sigma2),
        mode=MONTE_CARLO,
        samples=trials,
    )


# =============================================================================
# Public Operations
# =============================================================================

def walk_moments(spec: WalkSpec, trials: Optional[int] = None, seed: int = 0) -> MomentReport:
    """
    Moments of |Z| over the hash family.

    Args:
        spec: Walk description; its ``independence`` selects the averaging mode
        trials: Number of Monte-Carlo draws (ignored when exhaustive)
        seed: Root seed for Monte-Carlo draws

    Returns:
        MomentReport; exhaustive reports carry exact rational moments
    """
    if spec.independence == EXHAUSTIVE:
        return _exhaustive_moments(spec)
    return _monte_carlo_moments(spec, trials if trials is not None else 10_000, seed)


def anticoncentration_check(spec: WalkSpec, trials: int = 10_000, seed: int = 0) -> AnticoncentrationResult:
    """Pr[|Z| > sigma/3] compared against 1/17 (Wilson lower bound for Monte-Carlo)."""
    if spec.independence == EXHAUSTIVE:
        report = _exhaustive_moments(spec)
        probability = report.exact["tail_prob"]
        return AnticoncentrationResult(
            probability=float(probability),
            passed=probability > Fraction(1, 17),
            mode=EXHAUSTIVE,
        )

    if trials < MIN_MONTE_CARLO_TRIALS:
        raise UsageError(f"Anticoncentration needs at least {MIN_MONTE_CARLO_TRIALS} trials, got {trials}")
    walk = np.abs(_walk_samples(spec, trials, seed))
    hits = int(np.count_nonzero(walk > math.sqrt(spec.sigma2()) / 3))
    estimate = wilson_interval(hits, trials)
    passed = estimate.lower >= ANTICONCENTRATION_FLOOR
    if not passed:
        logger.warning(f"Anticoncentration floor missed: Wilson lower {estimate.lower:.4f} < 1/17")
    return AnticoncentrationResult(
        probability=estimate.fraction,
        passed=passed,
        mode=MONTE_CARLO,
        estimate=estimate,
    )
