"""
Experiment Configuration

A run is described by a small JSON document:

    {"scenario": "pushforward", "n": 16, "k": 8, "delta": 0.5, "T": 16,
     "trials": 200, "seed": 0}

Missing optional keys take defaults; unknown keys are rejected. Every
violation is collected and reported together in one ConfigError.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional

from src.distributions import MAX_BITS
from src.errors import ConfigError

SCENARIOS = ("pushforward", "identical", "spiked-uniform", "prg")

DEFAULTS: dict[str, Any] = {
    "scenario": "pushforward",
    "delta": 0.5,
    "T": None,
    "epsilon": None,
    "epsilons": (),
    "trials": 200,
    "seed": 0,
    "y_extra_bits": 1,
    "spike": 2.0 ** -4,
    "out_dir": "runs",
    "workers": 1,
    "xlsx": False,
    "pdf": False,
}
REQUIRED = ("n", "k")
DEFAULT_T = 16


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment parameters. ``T`` is None when ``epsilon`` sets it."""

    n: int
    k: float
    scenario: str = "pushforward"
    delta: float = 0.5
    T: Optional[int] = DEFAULT_T
    epsilon: Optional[float] = None
    epsilons: tuple[float, ...] = field(default_factory=tuple)
    trials: int = 200
    seed: int = 0
    y_extra_bits: int = 1
    spike: float = 2.0 ** -4
    out_dir: str = "runs"
    workers: int = 1
    xlsx: bool = False
    pdf: bool = False

    @property
    def output_dir(self) -> Path:
        return Path(self.out_dir)

    def with_overrides(self, **changes: Any) -> ExperimentConfig:
        """Copy with non-None overrides applied and re-validated."""
        data = self.to_dict()
        data.update({key: value for key, value in changes.items() if value is not None})
        if changes.get("epsilon") is not None and changes.get("T") is None:
            data["T"] = None
        if changes.get("T") is not None and changes.get("epsilon") is None:
            data["epsilon"] = None
        return parse_config_data(data)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["epsilons"] = list(self.epsilons)
        return data


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return (isinstance(value, (int, float)) and not isinstance(value, bool)) and math.isfinite(value)


def parse_config_data(data: dict[str, Any]) -> ExperimentConfig:
    """Validate a decoded config document and fill defaults."""
    if not isinstance(data, dict):
        raise ConfigError(["config must be a JSON object"])

    errors: list[str] = []
    allowed = set(DEFAULTS) | set(REQUIRED)
    for key in sorted(set(data) - allowed):
        errors.append(f"unknown key '{key}'")
    for key in REQUIRED:
        if key not in data:
            errors.append(f"missing required field '{key}'")

    values = {**DEFAULTS, **data}

    n = values.get("n")
    if "n" in data and not (_is_int(n) and 1 <= n <= MAX_BITS):
        errors.append(f"n must be an integer in [1, {MAX_BITS}], got {n!r}")
    k = values.get("k")
    if "k" in data:
        if not (_is_number(k) and k >= 0):
            errors.append(f"k must be a number >= 0, got {k!r}")
        elif _is_int(n) and k > n:
            errors.append(f"k={k} exceeds n={n}")

    if values["scenario"] not in SCENARIOS:
        errors.append(f"scenario must be one of {', '.join(SCENARIOS)}, got {values['scenario']!r}")
    delta = values["delta"]
    if not (_is_number(delta) and 0 < delta <= 1):
        errors.append(f"delta must be in (0, 1], got {delta!r}")

    T, epsilon = values["T"], values["epsilon"]
    if T is not None and epsilon is not None:
        errors.append("give either T or epsilon, not both")
    if T is not None and not (_is_int(T) and T >= 1 and T & (T - 1) == 0):
        errors.append(f"T must be a power of 2, got {T!r}")
    if epsilon is not None and not (_is_number(epsilon) and epsilon > 0):
        errors.append(f"epsilon must be a positive number, got {epsilon!r}")
    if T is None and epsilon is None:
        T = DEFAULT_T

    epsilons = values["epsilons"]
    if not isinstance(epsilons, (list, tuple)) or not all(_is_number(e) and e > 0 for e in epsilons):
        errors.append(f"epsilons must be a list of positive numbers, got {epsilons!r}")
        epsilons = ()

    for key, minimum in (("trials", 1), ("seed", 0), ("y_extra_bits", 0), ("workers", 1)):
        value = values[key]
        if not (_is_int(value) and value >= minimum):
            errors.append(f"{key} must be an integer >= {minimum}, got {value!r}")

    spike = values["spike"]
    if not (_is_number(spike) and 0 < spike < 1):
        errors.append(f"spike must be in (0, 1), got {spike!r}")
    if not isinstance(values["out_dir"], str) or not values["out_dir"]:
        errors.append(f"out_dir must be a non-empty string, got {values['out_dir']!r}")
    for key in ("xlsx", "pdf"):
        if not isinstance(values[key], bool):
            errors.append(f"{key} must be true or false, got {values[key]!r}")

    if errors:
        raise ConfigError(errors)

    return ExperimentConfig(
        n=int(n),
        k=float(k),
        scenario=values["scenario"],
        delta=float(delta),
        T=T,
        epsilon=None if epsilon is None else float(epsilon),
        epsilons=tuple(float(e) for e in epsilons),
        trials=values["trials"],
        seed=values["seed"],
        y_extra_bits=values["y_extra_bits"],
        spike=float(spike),
        out_dir=values["out_dir"],
        workers=values["workers"],
        xlsx=values["xlsx"],
        pdf=values["pdf"],
    )


def parse_config(path: str | Path) -> ExperimentConfig:
    """
    Load and validate an experiment config file.

    Raises:
        ConfigError: With one message per violated field
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError([f"config file not found: {path}"])
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError([f"invalid JSON in {path}: {e}"]) from e
    return parse_config_data(data)


