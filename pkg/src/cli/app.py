"""
Pseudoentropy Toolkit CLI

Subcommands:
- dist gen|entropy|distance     fixture distributions and their entropy measures
- attack run|sweep|worst-case   sliced distinguisher trials and the epsilon/size tradeoff
- moments check                 moment sandwich and anticoncentration checks
- ballsbins run                 balls-and-bins max load comparison

Exit status: 0 = all thresholds met, 1 = threshold failure, 2 = usage error,
3 = internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Optional

import numpy as np

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from src import __version__
from src.attack import build_sliced, worst_case_advantage
from src.distributions import (
    FIXTURE_KINDS,
    dump_binary,
    dump_json,
    entropy_report,
    euclidean_distance,
    load_distribution,
    make,
    statistical_distance,
)
from src.errors import ConfigError, PseudoentropyError, UsageError
from src.exports import export_to_csv, export_to_json
from src.harness import (
    FAILED,
    SCENARIOS,
    attack_params,
    balls_bins,
    build_scenario,
    parse_config,
    parse_config_data,
    run_experiment,
    sweep_tradeoff,
)
from src.hashing import SignHash, SliceHash, derive_seed, sample_polyhash
from src.moments import (
    EXHAUSTIVE,
    INDEPENDENCE_MODES,
    WalkSpec,
    anticoncentration_check,
    slice_advantage_moments,
    walk_moments,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3

BALLS_BINS_TOLERANCE = 0.2


# =============================================================================
# Output
# =============================================================================

def _flatten(document: dict, prefix: str = "") -> list[list]:
    rows = []
    for key, value in document.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            rows.extend(_flatten(value, f"{name}."))
        elif not isinstance(value, list):
            rows.append([name, value])
    return rows


def emit(document: dict, fmt: str) -> None:
    if fmt == "csv":
        sys.stdout.write(export_to_csv(["key", "value"], _flatten(document)))
    else:
        sys.stdout.write(export_to_json(document))


# =============================================================================
# dist
# =============================================================================

def cmd_dist_gen(args: argparse.Namespace) -> int:
    params: dict[str, Any] = {"n": args.n}
    for name in ("k", "size", "spike", "x"):
        value = getattr(args, name)
        if value is not None:
            params[name] = value
    if args.injective:
        params["injective"] = True
    d = make(args.kind, params, seed=args.seed)

    if args.output and Path(args.output).suffix.lower() != ".json":
        dump_binary(d, Path(args.output))
    elif args.output:
        dump_json(d, Path(args.output))
    else:
        sys.stdout.write(dump_json(d))
        return EXIT_OK
    logger.info(f"Wrote {d!r} to {args.output}")
    return EXIT_OK


def cmd_dist_entropy(args: argparse.Namespace) -> int:
    d = load_distribution(args.path)
    report = entropy_report(d, args.delta, args.k)
    emit({"n": d.n, "support_size": d.support_size, **report.to_dict()}, args.format)
    return EXIT_OK


def cmd_dist_distance(args: argparse.Namespace) -> int:
    a, b = load_distribution(args.first), load_distribution(args.second)
    emit({
        "statistical_distance": statistical_distance(a, b),
        "euclidean_distance": euclidean_distance(a, b),
    }, args.format)
    return EXIT_OK


# =============================================================================
# attack
# =============================================================================

def load_experiment_config(args: argparse.Namespace):
    """Config file (if any) with command-line overrides applied."""
    overrides = {
        "scenario": args.scenario,
        "n": args.n,
        "k": args.k,
        "delta": args.delta,
        "T": args.T,
        "epsilon": args.epsilon,
        "epsilons": args.epsilons,
        "trials": args.trials,
        "seed": args.seed,
        "out_dir": args.out_dir,
        "workers": args.workers,
        "xlsx": True if args.xlsx else None,
        "pdf": True if args.pdf else None,
    }
    if args.config:
        return parse_config(args.config).with_overrides(**overrides)
    data = {key: value for key, value in overrides.items() if value is not None}
    return parse_config_data(data)


def cmd_attack_run(args: argparse.Namespace) -> int:
    result = run_experiment(load_experiment_config(args))
    emit({**result.estimate.to_dict(), "verdict": result.verdict, "artifacts": result.artifacts}, args.format)
    return EXIT_THRESHOLD if result.verdict == FAILED else EXIT_OK


def cmd_attack_sweep(args: argparse.Namespace) -> int:
    result = sweep_tradeoff(load_experiment_config(args))
    if args.format == "csv":
        sys.stdout.write(Path(result.artifacts["sweep"]).read_text(encoding="utf-8"))
    else:
        emit(result.report(), args.format)
    return EXIT_THRESHOLD if result.verdict == FAILED else EXIT_OK


def cmd_attack_worst_case(args: argparse.Namespace) -> int:
    config = load_experiment_config(args)
    X, Y = build_scenario(config)
    params = attack_params(config)
    rng = np.random.default_rng(derive_seed(config.seed, 0))
    dhat = build_sliced(SignHash(sample_polyhash(rng)), SliceHash(sample_polyhash(rng), params.t), X, Y)
    value, witness = worst_case_advantage(dhat, X, config.k)
    emit({
        "scenario": config.scenario,
        "n": config.n,
        "k": config.k,
        "T": params.T,
        "worst_case_advantage": value,
        "witness_support_size": witness.support_size,
    }, args.format)
    return EXIT_OK


# =============================================================================
# moments
# =============================================================================

def cmd_moments_check(args: argparse.Namespace) -> int:
    if args.weights:
        weights = args.weights
    else:
        rng = np.random.default_rng(derive_seed(args.seed, 0))
        weights = (rng.integers(-64, 65, size=args.points) / 64.0).tolist()
        if not any(weights):
            weights[0] = 1.0
    spec = WalkSpec(tuple(weights), independence=args.mode, T=args.T, field_bits=args.field_bits)
    report = walk_moments(spec, trials=args.trials, seed=args.seed)
    tail = anticoncentration_check(spec, trials=args.trials, seed=args.seed)

    checks = {**report.bounds_ok, "anticoncentration": tail.passed}
    payload = {"moments": report.to_dict(), "anticoncentration": tail.to_dict()}
    if spec.independence == EXHAUSTIVE:
        try:
            slices = slice_advantage_moments(spec)
        except UsageError as e:
            logger.warning(f"Skipping slice advantage moments: {e}")
        else:
            payload["slices"] = slices.to_dict()
            checks.update({f"slice_{name}": ok for name, ok in slices.checks.items()})
    if args.format == "csv":
        sys.stdout.write(export_to_csv(["check", "passed"], [[name, int(ok)] for name, ok in checks.items()]))
    else:
        emit({**payload, "checks": checks}, args.format)
    for name, ok in checks.items():
        logger.info(f"{name:<20} {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if all(checks.values()) else EXIT_THRESHOLD


# =============================================================================
# ballsbins
# =============================================================================

def cmd_ballsbins_run(args: argparse.Namespace) -> int:
    low, high, gap = balls_bins(args.k, args.k_prime, args.trials, seed=args.seed)
    emit({"X": low.to_dict(), "Y": high.to_dict(), "gap": gap}, args.format)
    ok = all(r.relative_offset_error <= BALLS_BINS_TOLERANCE for r in (low, high)) and gap > 0
    return EXIT_OK if ok else EXIT_THRESHOLD


# =============================================================================
# Parser
# =============================================================================

def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scenario", choices=SCENARIOS, help="Scenario fixture")
    parser.add_argument("--n", type=int, help="Domain bits")
    parser.add_argument("--k", type=float, help="Entropy level in bits")
    parser.add_argument("--delta", type=float, help="Smoothness (default 0.5)")
    parser.add_argument("--T", type=int, help="Slice count (power of 2)")
    parser.add_argument("--epsilon", type=float, help="Target advantage; sets T")
    parser.add_argument("--epsilons", type=float, nargs="+", help="Sweep targets")
    parser.add_argument("--trials", type=int, help="Number of trials (default 200)")
    parser.add_argument("--workers", type=int, help="Worker threads for trials")
    parser.add_argument("--xlsx", action="store_true", help="Also write an XLSX report")
    parser.add_argument("--pdf", action="store_true", help="Also write a PDF summary")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Pseudoentropy toolkit - non-uniform attacks on low smooth min-entropy")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=None, help="Root seed (default 0)")
    parser.add_argument("--config", help="Experiment config JSON")
    parser.add_argument("--out-dir", dest="out_dir", help="Directory for run artifacts")
    parser.add_argument("--format", choices=("json", "csv"), default="json", help="Output format")
    parser.add_argument("--log-level", default="INFO", help="Logging level")
    parser.add_argument("--quiet", action="store_true", help="Only log warnings and errors")
    commands = parser.add_subparsers(dest="command", required=True)

    dist = commands.add_parser("dist", help="Distributions").add_subparsers(dest="action", required=True)
    gen = dist.add_parser("gen", help="Generate a fixture distribution")
    gen.add_argument("--kind", choices=FIXTURE_KINDS, required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--k", type=int)
    gen.add_argument("--size", type=int)
    gen.add_argument("--spike", type=float)
    gen.add_argument("--x", type=int, help="Point for the 'point' kind")
    gen.add_argument("--injective", action="store_true", help="Injective pushforward")
    gen.add_argument("--output", help="Output file (.json or binary)")
    gen.set_defaults(handler=cmd_dist_gen)

    entropy = dist.add_parser("entropy", help="Entropy measures of a distribution file")
    entropy.add_argument("path")
    entropy.add_argument("--delta", type=float, default=0.5)
    entropy.add_argument("--k", type=float)
    entropy.set_defaults(handler=cmd_dist_entropy)

    distance = dist.add_parser("distance", help="Distances between two distribution files")
    distance.add_argument("first")
    distance.add_argument("second")
    distance.set_defaults(handler=cmd_dist_distance)

    attack = commands.add_parser("attack", help="Attack trials").add_subparsers(dest="action", required=True)
    for name, handler, help_text in (
        ("run", cmd_attack_run, "Run trials on a scenario"),
        ("sweep", cmd_attack_sweep, "Sweep target epsilons"),
        ("worst-case", cmd_attack_worst_case, "Worst-case advantage of one distinguisher"),
    ):
        sub = attack.add_parser(name, help=help_text)
        _add_experiment_flags(sub)
        sub.set_defaults(handler=handler)

    moments = commands.add_parser("moments", help="Moment checks").add_subparsers(dest="action", required=True)
    check = moments.add_parser("check", help="Check the moment bounds on one walk")
    check.add_argument("--weights", type=float, nargs="+", help="Increment magnitudes")
    check.add_argument("--points", type=int, default=8, help="Random weights when --weights is absent")
    check.add_argument("--mode", choices=INDEPENDENCE_MODES, default=EXHAUSTIVE)
    check.add_argument("--T", type=int, default=1)
    check.add_argument("--field-bits", dest="field_bits", type=int, default=4)
    check.add_argument("--trials", type=int, default=10_000)
    check.set_defaults(handler=cmd_moments_check)

    balls = commands.add_parser("ballsbins", help="Balls and bins").add_subparsers(dest="action", required=True)
    run = balls.add_parser("run", help="Compare 2^k and 2^k' balls")
    run.add_argument("--k", type=int, default=10)
    run.add_argument("--k-prime", dest="k_prime", type=int, default=14)
    run.add_argument("--trials", type=int, default=2000)
    run.set_defaults(handler=cmd_ballsbins_run)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.WARNING if args.quiet else getattr(logging, str(args.log_level).upper(), logging.INFO)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    # Commands that never read a config still need a concrete seed.
    if args.command != "attack" and args.seed is None:
        args.seed = 0

    try:
        return args.handler(args)
    except ConfigError as e:
        for message in e.errors:
            print(f"error: {message}", file=sys.stderr)
        return EXIT_USAGE
    except PseudoentropyError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except Exception:
        logger.exception("Command failed")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
