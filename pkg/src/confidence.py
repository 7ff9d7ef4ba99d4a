"""Wilson score intervals for Monte-Carlo success fractions."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.stats import norm

from src.errors import UsageError


@dataclass(frozen=True)
class ProportionEstimate:
    """Observed successes out of trials, with a two-sided Wilson interval."""

    successes: int
    trials: int
    lower: float
    upper: float
    confidence: float = 0.95

    @property
    def fraction(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    def to_dict(self) -> dict:
        return {
            "successes": self.successes,
            "trials": self.trials,
            "fraction": self.fraction,
            "wilson_lower": self.lower,
            "wilson_upper": self.upper,
            "confidence": self.confidence,
        }


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> ProportionEstimate:
    if trials <= 0:
        raise UsageError(f"Need at least one trial, got {trials}")
    if not 0 <= successes <= trials:
        raise UsageError(f"Successes {successes} outside [0, {trials}]")
    z = float(norm.ppf(0.5 + confidence / 2))
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2.0 * trials)) / denom
    margin = (z / denom) * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4.0 * trials * trials))
    return ProportionEstimate(
        successes=int(successes),
        trials=int(trials),
        lower=max(0.0, center - margin),
        upper=min(1.0, center + margin),
        confidence=confidence,
    )
