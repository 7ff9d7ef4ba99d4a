"""Experiment orchestration: configs, scenarios, sweeps and balls-and-bins."""

from .balls_bins import (
    MAX_BALL_BITS,
    BallsBinsResult,
    balls_bins,
    expected_max_load,
    predicted_max_load,
    simulate_max_load,
)
from .config import SCENARIOS, ExperimentConfig, parse_config, parse_config_data
from .experiments import (
    FAILED,
    PASSED,
    SWEEP_CSV_HEADER,
    VACUOUS,
    ExperimentResult,
    SweepResult,
    SweepRow,
    attack_params,
    build_scenario,
    run_experiment,
    sweep_tradeoff,
    verdict,
)

__all__ = [
    "MAX_BALL_BITS",
    "BallsBinsResult",
    "balls_bins",
    "expected_max_load",
    "predicted_max_load",
    "simulate_max_load",
    "SCENARIOS",
    "ExperimentConfig",
    "parse_config",
    "parse_config_data",
    "FAILED",
    "PASSED",
    "SWEEP_CSV_HEADER",
    "VACUOUS",
    "ExperimentResult",
    "SweepResult",
    "SweepRow",
    "attack_params",
    "build_scenario",
    "run_experiment",
    "sweep_tradeoff",
    "verdict",
]
