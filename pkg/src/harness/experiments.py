"""
Experiments

Scenario fixtures and the two end-to-end runs:

- run_experiment:  build (X, Y) from a scenario, run attack trials, write
                   report.json and trials.csv
- sweep_tradeoff:  for each target epsilon pick T with choose_T, run the
                   trials and write one sweep.csv row per epsilon

Scenarios (k must be an integer for the flat constructions):

    pushforward     X = f(U_k), f injective into {0,1}^n; Y flat on
                    2^{k + y_extra_bits} points disjoint from X
    identical       X = Y flat on 2^k points (no guarantee)
    spiked-uniform  X uniform with one point of mass ``spike``; Y uniform
    prg             n = k + 1, X = f(U_k) for a random f; Y uniform
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

from src import __version__
from src.attack import (
    AttackParams,
    SuccessEstimate,
    choose_T,
    circuit_size_estimate,
    estimate_success_probability,
    size_budget,
)
from src.distributions import Distribution, entropy_report, make
from src.errors import RangeError, UsageError
from src.hashing import derive_seed

from .config import ExperimentConfig

logger = logging.getLogger(__name__)

# Seed streams for fixtures and sweep rows, above any trial index.
FIXTURE_STREAM = 1 << 40
SWEEP_STREAM = 1 << 41

SWEEP_CSV_HEADER = [
    "epsilon", "T", "feasible", "size_units", "size_budget", "bound",
    "mean_advantage", "success_fraction", "wilson_lower", "meets_floor",
]

PASSED = "passed"
FAILED = "failed"
VACUOUS = "vacuous"

CSV_SCHEMA_VERSION = 1


# =============================================================================
# Scenarios
# =============================================================================

def _integer_k(config: ExperimentConfig) -> int:
    if config.k != int(config.k):
        raise UsageError(f"Scenario '{config.scenario}' needs an integer k, got {config.k}")
    return int(config.k)


def build_scenario(config: ExperimentConfig) -> tuple[Distribution, Distribution]:
    """Deterministic (X, Y) for the configured scenario and seed."""
    x_seed = derive_seed(config.seed, FIXTURE_STREAM)
    y_seed = derive_seed(config.seed, FIXTURE_STREAM + 1)
    n = config.n

    if config.scenario == "pushforward":
        k = _integer_k(config)
        X = make("pushforward", {"n": n, "k": k, "injective": True}, seed=x_seed)
        Y = make(
            "flat",
            {"n": n, "k": k + config.y_extra_bits, "exclude": X.support()[0].tolist()},
            seed=y_seed,
        )
        return X, Y

    if config.scenario == "identical":
        X = make("flat", {"n": n, "k": _integer_k(config)}, seed=x_seed)
        return X, X

    if config.scenario == "spiked-uniform":
        return make("spiked-uniform", {"n": n, "spike": config.spike}, seed=x_seed), make("uniform", {"n": n})

    # prg
    k = _integer_k(config)
    if n != k + 1:
        raise UsageError(f"Scenario 'prg' stretches k bits by one: needs n = k + 1, got n={n}, k={k}")
    return make("pushforward", {"n": n, "k": k}, seed=x_seed), make("uniform", {"n": n})


def attack_params(config: ExperimentConfig, epsilon: Optional[float] = None) -> AttackParams:
    epsilon = epsilon if epsilon is not None else config.epsilon
    if epsilon is not None:
        return AttackParams.from_epsilon(config.n, config.k, config.delta, epsilon)
    return AttackParams(n=config.n, k=config.k, delta=config.delta, T=config.T)


def verdict(estimate: SuccessEstimate) -> str:
    """Acceptance thresholds apply only when the guarantee holds."""
    if not estimate.guarantee:
        return VACUOUS
    return PASSED if estimate.meets_floor else FAILED


# =============================================================================
# Runs
# =============================================================================

@dataclass
class ExperimentResult:
    config: ExperimentConfig
    estimate: SuccessEstimate
    x_entropy: dict
    y_entropy: dict
    artifacts: dict[str, str] = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return verdict(self.estimate)

    def report(self) -> dict:
        """The report.json document; no timestamps, so equal seeds give equal bytes."""
        params = self.estimate.params
        return {
            "version": __version__,
            "csv_schema": CSV_SCHEMA_VERSION,
            "scenario": self.config.scenario,
            "seed": self.config.seed,
            "config": self.config.to_dict(),
            "params": params.to_dict(),
            "size_units": circuit_size_estimate(params),
            "size_model": "T + 2 * n^2 gate-equivalents",
            "X": self.x_entropy,
            "Y": self.y_entropy,
            "summary": self.estimate.to_dict(),
            "verdict": self.verdict,
            "trials": [report.to_dict() for report in self.estimate.reports],
        }


@dataclass
class SweepRow:
    epsilon: float
    T: Optional[int]
    feasible: bool
    size_units: Optional[int] = None
    size_budget: Optional[float] = None
    bound: Optional[float] = None
    estimate: Optional[SuccessEstimate] = None

    def to_dict(self) -> dict:
        estimate = self.estimate
        return {
            "epsilon": self.epsilon,
            "T": self.T,
            "feasible": self.feasible,
            "size_units": self.size_units,
            "size_budget": self.size_budget,
            "bound": self.bound,
            "mean_advantage": estimate.mean_advantage if estimate else None,
            "success_fraction": estimate.fraction if estimate else None,
            "wilson_lower": estimate.lower if estimate else None,
            "meets_floor": estimate.meets_floor if estimate else None,
        }

    def to_csv_row(self) -> list:
        data = self.to_dict()
        return ["" if data[key] is None else _csv_value(data[key]) for key in SWEEP_CSV_HEADER]


def _csv_value(value):
    if isinstance(value, bool):
        return int(value)
    return value


@dataclass
class SweepResult:
    config: ExperimentConfig
    rows: list[SweepRow]
    artifacts: dict[str, str] = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        judged = [verdict(row.estimate) for row in self.rows if row.estimate is not None]
        if FAILED in judged:
            return FAILED
        return PASSED if PASSED in judged else VACUOUS

    def report(self) -> dict:
        return {
            "version": __version__,
            "csv_schema": CSV_SCHEMA_VERSION,
            "scenario": self.config.scenario,
            "seed": self.config.seed,
            "config": self.config.to_dict(),
            "rows": [row.to_dict() for row in self.rows],
            "verdict": self.verdict,
        }


def _estimate(config: ExperimentConfig, X: Distribution, Y: Distribution, params: AttackParams, seed: int):
    return estimate_success_probability(X, Y, params, config.trials, seed=seed, workers=config.workers)


def run_experiment(config: ExperimentConfig, write: bool = True) -> ExperimentResult:
    """
    Build the scenario, run the trials and (optionally) write the artifacts.

    Returns:
        ExperimentResult whose ``verdict`` is passed, failed or vacuous
    """
    from src.exports import ReportWriter

    logger.info(f"Experiment '{config.scenario}' n={config.n} k={config.k} delta={config.delta} seed={config.seed}")
    X, Y = build_scenario(config)
    params = attack_params(config)
    estimate = _estimate(config, X, Y, params, config.seed)

    result = ExperimentResult(
        config=config,
        estimate=estimate,
        x_entropy=entropy_report(X, config.delta, config.k).to_dict(),
        y_entropy=entropy_report(Y, config.delta, config.k).to_dict(),
    )
    if write:
        result.artifacts = ReportWriter(config.output_dir).write_run(result)
    logger.info(f"Experiment verdict: {result.verdict}")
    return result


def sweep_tradeoff(config: ExperimentConfig, write: bool = True) -> SweepResult:
    """One row per epsilon in config.epsilons; infeasible epsilons are marked and skipped."""
    from src.exports import ReportWriter

    if not config.epsilons:
        raise UsageError("Sweep needs a non-empty 'epsilons' list")
    X, Y = build_scenario(config)

    rows = []
    for index, epsilon in enumerate(config.epsilons):
        try:
            T = choose_T(epsilon, config.k, config.delta, n=config.n)
        except RangeError as e:
            logger.warning(f"Skipping epsilon={epsilon}: {e}")
            rows.append(SweepRow(epsilon=epsilon, T=None, feasible=False))
            continue
        params = AttackParams(n=config.n, k=config.k, delta=config.delta, T=T, epsilon=epsilon)
        estimate = _estimate(config, X, Y, params, derive_seed(config.seed, SWEEP_STREAM + index))
        rows.append(SweepRow(
            epsilon=epsilon,
            T=T,
            feasible=True,
            size_units=circuit_size_estimate(params),
            size_budget=size_budget(epsilon, config.k, config.delta, config.n),
            bound=params.bound,
            estimate=estimate,
        ))

    result = SweepResult(config=config, rows=rows)
    if write:
        result.artifacts = ReportWriter(config.output_dir).write_sweep(result)
    logger.info(f"Sweep over {len(rows)} epsilon values: {result.verdict}")
    return result
