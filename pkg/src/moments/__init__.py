"""Moment inequalities for the random walks behind the attack's advantage."""

from .random_walks import (
    ANTICONCENTRATION_FLOOR,
    EXHAUSTIVE,
    INDEPENDENCE_MODES,
    MIN_MONTE_CARLO_TRIALS,
    MONTE_CARLO,
    AnticoncentrationResult,
    MomentReport,
    SliceMomentReport,
    WalkSpec,
    anticoncentration_check,
    family_squared_advantage,
    first_moment_lower_bound,
    paley_zygmund_lower,
    predicted_fourth_moment,
    slice_advantage_moments,
    walk_moments,
)

__all__ = [
    "ANTICONCENTRATION_FLOOR",
    "EXHAUSTIVE",
    "INDEPENDENCE_MODES",
    "MIN_MONTE_CARLO_TRIALS",
    "MONTE_CARLO",
    "AnticoncentrationResult",
    "MomentReport",
    "SliceMomentReport",
    "WalkSpec",
    "anticoncentration_check",
    "family_squared_advantage",
    "first_moment_lower_bound",
    "paley_zygmund_lower",
    "predicted_fourth_moment",
    "slice_advantage_moments",
    "walk_moments",
]
