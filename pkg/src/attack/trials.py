"""
Attack Trials

One trial samples a fresh sign hash D and slice hash h, builds the sliced
distinguisher with exact advice and measures its total advantage against
the bound

    bound = (1/3) * sqrt(T) * 2^{-k/2} * delta

which a trial reaches with probability at least 1/17 whenever X is far
from every distribution of min-entropy k. Many trials give a success
fraction with a Wilson confidence interval.

Trial i draws its hashes from a generator seeded by derive_seed(seed, i),
so results do not depend on execution order or worker count.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.confidence import ProportionEstimate, wilson_interval
from src.distributions import (
    MAX_BITS,
    TOLERANCE,
    Distribution,
    euclidean_distance,
    min_entropy,
    smooth_min_entropy,
)
from src.errors import PreconditionError, RangeError, UsageError, ValidationError
from src.hashing import MAX_SLICE_BITS, SignHash, SliceHash, derive_seed, sample_polyhash

from .sliced_distinguisher import (
    SlicedDistinguisher,
    advice_signs,
    difference_on_support,
    distance_certificate,
    slice_advantages,
)

logger = logging.getLogger(__name__)

MIN_TRIALS = 30
SUCCESS_FLOOR = 1 / 17

# Relative slack when comparing bounds that are exact in real arithmetic.
_BOUND_SLACK = 1e-12

TRIAL_CSV_HEADER = [
    "trial", "seed", "T", "advantage", "bound", "success", "guarantee", "size_units",
    "sign_c3", "sign_c2", "sign_c1", "sign_c0",
    "slice_c3", "slice_c2", "slice_c1", "slice_c0",
]


# =============================================================================
# Parameters and Size Model
# =============================================================================

def bound(T: int, k: float, delta: float) -> float:
    """(1/3) * T^{1/2} * 2^{-k/2} * delta."""
    return math.sqrt(T) * 2.0 ** (-float(k) / 2) * float(delta) / 3.0


def choose_T(epsilon: float, k: float, delta: float, n: Optional[int] = None) -> int:
    """
    Smallest power of two T with bound(T, k, delta) >= epsilon.

    Raises RangeError when T would exceed 2^n (or 2^32 without n).
    """
    if not epsilon > 0:
        raise ValidationError(f"Target advantage epsilon must be positive, got {epsilon}")
    if not 0 < delta <= 1:
        raise ValidationError(f"Smoothing parameter delta must be in (0, 1], got {delta}")
    limit = min(n, MAX_SLICE_BITS) if n is not None else MAX_SLICE_BITS
    for t in range(limit + 1):
        if bound(1 << t, k, delta) >= epsilon * (1 - _BOUND_SLACK):
            return 1 << t
    raise RangeError(
        f"epsilon={epsilon} needs more than 2^{limit} slices at k={k}, delta={delta}"
    )


def hash_size(n: int) -> int:
    """Gate-equivalent cost of one hash evaluation: n^2."""
    return n * n


def size_budget(epsilon: float, k: float, delta: float, n: int) -> float:
    """
    Upper envelope max(1, 18 * 2^k * epsilon^2 / delta^2) + 2 n^2 for choose_T-sized attacks.

    The slice term never drops below one slice.
    """
    return max(1.0, 18.0 * 2.0 ** float(k) * epsilon ** 2 / delta ** 2) + 2 * hash_size(n)


@dataclass(frozen=True)
class AttackParams:
    """
    Attack parameters.

    Attributes:
        n: Domain bit-width
        k: Target entropy level in bits (k <= n)
        delta: Smoothness in (0, 1]
        T: Slice count, a power of two
        epsilon: Target advantage T was derived from, if any
    """

    n: int
    k: float
    delta: float
    T: int = 1
    epsilon: Optional[float] = None

    def __post_init__(self):
        if not 1 <= int(self.n) <= MAX_BITS:
            raise ValidationError(f"Domain bit-width must be in [1, {MAX_BITS}], got {self.n}")
        if not 0 <= float(self.k) <= self.n:
            raise ValidationError(f"Entropy level k must be in [0, n={self.n}], got {self.k}")
        if not 0 < float(self.delta) <= 1:
            raise ValidationError(f"Smoothing parameter delta must be in (0, 1], got {self.delta}")
        T = int(self.T)
        if T < 1 or T & (T - 1):
            raise ValidationError(f"Slice count T must be a power of 2, got {self.T}")
        if T.bit_length() - 1 > MAX_SLICE_BITS:
            raise ValidationError(f"Slice count T must be at most 2^{MAX_SLICE_BITS}, got {self.T}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "k", float(self.k))
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "T", T)

    @classmethod
    def from_epsilon(cls, n: int, k: float, delta: float, epsilon: float) -> AttackParams:
        return cls(n=n, k=k, delta=delta, T=choose_T(epsilon, k, delta, n=n), epsilon=epsilon)

    @property
    def t(self) -> int:
        return self.T.bit_length() - 1

    @property
    def bound(self) -> float:
        return bound(self.T, self.k, self.delta)

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "delta": self.delta, "T": self.T, "epsilon": self.epsilon}


def circuit_size_estimate(params: AttackParams) -> int:
    """T advice gates plus two hash evaluations of n^2 gates each."""
    return params.T + 2 * hash_size(params.n)


# =============================================================================
# Reports
# =============================================================================

@dataclass(frozen=True)
class AttackReport:
    """Result of one trial. ``per_slice`` holds |slice advantage| per slice."""

    advantage: float
    bound: float
    success: bool
    size_units: int
    per_slice: list[float]
    seeds: dict
    guarantee: bool
    trial: Optional[int] = None
    smooth_entropy_below_k: bool = False

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "advantage": self.advantage,
            "bound": self.bound,
            "success": self.success,
            "guarantee": self.guarantee,
            "smooth_entropy_below_k": self.smooth_entropy_below_k,
            "size_units": self.size_units,
            "per_slice": list(self.per_slice),
            "seeds": self.seeds,
        }

    def to_csv_row(self) -> list:
        sign, slicer = self.seeds["sign"], self.seeds["slice"]
        return [
            self.trial,
            self.seeds.get("trial_seed"),
            len(self.per_slice),
            self.advantage,
            self.bound,
            int(self.success),
            int(self.guarantee),
            self.size_units,
            sign["c3"], sign["c2"], sign["c1"], sign["c0"],
            slicer["c3"], slicer["c2"], slicer["c1"], slicer["c0"],
        ]


@dataclass(frozen=True)
class TrialContext:
    """
    Per-(X, Y) quantities shared by every trial.

    ``smooth_entropy_below_k`` records whether H_inf^delta(X) < k. The
    certificate can hold without it, since it only needs X to be far from
    this particular Y.
    """

    X: Distribution
    Y: Distribution
    params: AttackParams
    certificate: float
    euclidean_distance: float
    smooth_entropy_below_k: bool = False

    @property
    def guarantee(self) -> bool:
        return self.certificate >= self.params.delta * (1 - _BOUND_SLACK)


@dataclass(frozen=True)
class SuccessEstimate:
    """Success statistics over independent trials."""

    estimate: ProportionEstimate
    params: AttackParams
    guarantee: bool
    certificate: float
    euclidean_distance: float
    seed: int
    smooth_entropy_below_k: bool = False
    reports: list[AttackReport] = field(default_factory=list)

    @property
    def fraction(self) -> float:
        return self.estimate.fraction

    @property
    def lower(self) -> float:
        return self.estimate.lower

    @property
    def meets_floor(self) -> bool:
        return self.estimate.lower >= SUCCESS_FLOOR

    @property
    def mean_advantage(self) -> float:
        return math.fsum(r.advantage for r in self.reports) / len(self.reports) if self.reports else 0.0

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "seed": self.seed,
            "guarantee": self.guarantee,
            "smooth_entropy_below_k": self.smooth_entropy_below_k,
            "certificate": self.certificate,
            "euclidean_distance": self.euclidean_distance,
            "bound": self.params.bound,
            "mean_advantage": self.mean_advantage,
            "success": self.estimate.to_dict(),
            "meets_floor": self.meets_floor,
        }

    def trials_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(TRIAL_CSV_HEADER)
        for report in self.reports:
            writer.writerow(report.to_csv_row())
        return buffer.getvalue()


# =============================================================================
# Trials
# =============================================================================

def prepare(X: Distribution, Y: Distribution, params: AttackParams) -> TrialContext:
    """Check preconditions once and compute the guarantee certificate."""
    points, _ = difference_on_support(X, Y)
    if X.n != params.n:
        raise UsageError(f"Attack parameters are for n={params.n}, distributions have n={X.n}")
    y_entropy = min_entropy(Y)
    if y_entropy < params.k - TOLERANCE:
        raise PreconditionError(f"Y has min-entropy {y_entropy:.6g} < k={params.k}")

    context = TrialContext(
        X=X,
        Y=Y,
        params=params,
        certificate=distance_certificate(X, Y, params.k),
        euclidean_distance=euclidean_distance(X, Y),
        smooth_entropy_below_k=smooth_min_entropy(X, params.delta) < params.k,
    )
    if not context.guarantee:
        logger.warning(
            f"No guarantee: certificate {context.certificate:.6g} < delta={params.delta}; "
            f"trials will be reported as vacuous"
        )
    logger.debug(f"Prepared attack on {points.size} support points, d2={context.euclidean_distance:.6g}")
    return context


def _run_prepared(
    context: TrialContext,
    rng: np.random.Generator,
    trial: Optional[int] = None,
    trial_seed: Optional[int] = None,
) -> AttackReport:
    params = context.params
    sign = SignHash(sample_polyhash(rng))
    slicer = SliceHash(sample_polyhash(rng), params.t)
    signed = slice_advantages(sign, slicer, context.X, context.Y)
    dhat = SlicedDistinguisher(sign=sign, slicer=slicer, advice=advice_signs(signed))
    per_slice = signed * dhat.advice
    advantage = math.fsum(per_slice)

    seeds = {"sign": sign.base.to_dict(), "slice": slicer.base.to_dict()}
    if trial_seed is not None:
        seeds["trial_seed"] = trial_seed

    report = AttackReport(
        advantage=advantage,
        bound=params.bound,
        success=advantage >= params.bound,
        size_units=circuit_size_estimate(params),
        per_slice=[float(v) for v in per_slice],
        seeds=seeds,
        guarantee=context.guarantee,
        trial=trial,
        smooth_entropy_below_k=context.smooth_entropy_below_k,
    )
    logger.debug(f"Trial {trial}: advantage={advantage:.6g} bound={params.bound:.6g} success={report.success}")
    return report


def run_trial(
    X: Distribution,
    Y: Distribution,
    params: AttackParams,
    rng: np.random.Generator,
) -> AttackReport:
    """
    Sample fresh hashes, build the sliced distinguisher and measure it.

    Args:
        X: The low-entropy distribution under attack
        Y: Any distribution of min-entropy at least k
        params: Attack parameters
        rng: Generator the two hashes are drawn from

    Returns:
        AttackReport; ``guarantee`` is False when X is not provably far from Y

    Raises:
        PreconditionError: If Y has min-entropy below k
    """
    return _run_prepared(prepare(X, Y, params), rng)


def estimate_success_probability(
    X: Distribution,
    Y: Distribution,
    params: AttackParams,
    trials: int,
    seed: int = 0,
    workers: int = 1,
    confidence: float = 0.95,
) -> SuccessEstimate:
    """
    Run independent trials and summarize the success fraction.

    Trial i uses derive_seed(seed, i). With workers > 1 trials run in a
    thread pool; reports are always returned in trial order.
    """
    if trials < MIN_TRIALS:
        raise UsageError(f"Success estimation needs at least {MIN_TRIALS} trials, got {trials}")
    context = prepare(X, Y, params)

    def one(index: int) -> AttackReport:
        trial_seed = derive_seed(seed, index)
        return _run_prepared(context, np.random.default_rng(trial_seed), trial=index, trial_seed=trial_seed)

    logger.info(f"Running {trials} trials (n={params.n}, k={params.k}, T={params.T}, seed={seed})")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(one, range(trials)))
    else:
        reports = [one(i) for i in range(trials)]

    successes = sum(1 for r in reports if r.success)
    estimate = wilson_interval(successes, trials, confidence)
    logger.info(
        f"Success fraction {estimate.fraction:.4f} "
        f"(Wilson lower {estimate.lower:.4f}, floor {SUCCESS_FLOOR:.4f})"
    )
    return SuccessEstimate(
        estimate=estimate,
        params=params,
        guarantee=context.guarantee,
        certificate=context.certificate,
        euclidean_distance=context.euclidean_distance,
        seed=seed,
        smooth_entropy_below_k=context.smooth_entropy_below_k,
        reports=reports,
    )
