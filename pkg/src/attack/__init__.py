"""Non-uniform distinguishers against low smooth min-entropy and their trials."""

from .sliced_distinguisher import (
    SlicedDistinguisher,
    advantage_signed,
    advice_signs,
    as_boolean,
    bias_mass,
    boolean_advantage,
    build_sliced,
    difference_on_support,
    distance_certificate,
    euclidean_lower_bound,
    evaluate,
    expected_squared_advantage,
    slice_advantages,
)
from .trials import (
    MIN_TRIALS,
    SUCCESS_FLOOR,
    TRIAL_CSV_HEADER,
    AttackParams,
    AttackReport,
    SuccessEstimate,
    bound,
    choose_T,
    circuit_size_estimate,
    estimate_success_probability,
    prepare,
    run_trial,
    size_budget,
)
from .worst_case import worst_case_advantage

__all__ = [
    "SlicedDistinguisher",
    "advantage_signed",
    "advice_signs",
    "as_boolean",
    "bias_mass",
    "boolean_advantage",
    "build_sliced",
    "difference_on_support",
    "distance_certificate",
    "euclidean_lower_bound",
    "evaluate",
    "expected_squared_advantage",
    "slice_advantages",
    "MIN_TRIALS",
    "SUCCESS_FLOOR",
    "TRIAL_CSV_HEADER",
    "AttackParams",
    "AttackReport",
    "SuccessEstimate",
    "bound",
    "choose_T",
    "circuit_size_estimate",
    "estimate_success_probability",
    "prepare",
    "run_trial",
    "size_budget",
    "worst_case_advantage",
]
