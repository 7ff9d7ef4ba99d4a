"""
Distribution Fixtures

Deterministic constructors for the distributions used by tests and
experiments:

- uniform:         U_n
- point:           all mass on one point
- flat:            uniform on 2^k (or ``size``) random points, optionally
                   avoiding an excluded set
- pushforward:     f(U_k) for an explicit or random f: {0,1}^k -> {0,1}^n,
                   P(y) = |f^-1(y)| * 2^-k
- spiked-uniform:  mass ``spike`` on one point, the rest spread uniformly
"""

from __future__ import annotations

import logging
from typing import Any, Iterable, Optional

import numpy as np

from src.errors import UsageError, ValidationError

from .distribution import Distribution

logger = logging.getLogger(__name__)

FIXTURE_KINDS = ("uniform", "point", "flat", "pushforward", "spiked-uniform")

# Domains up to this width are sampled by enumerating candidates.
_ENUMERATE_MAX_BITS = 20


def sample_distinct_points(
    rng: np.random.Generator,
    n: int,
    count: int,
    exclude: Optional[Iterable[int]] = None,
) -> np.ndarray:
    """Draw ``count`` distinct points of {0,1}^n outside ``exclude``, ascending."""
    size = 1 << n
    excluded = np.unique(np.asarray(list(exclude) if exclude is not None else [], dtype=np.uint64))
    if count > size - excluded.size:
        raise UsageError(f"Cannot draw {count} distinct points from {size - excluded.size} available")

    if n <= _ENUMERATE_MAX_BITS:
        candidates = np.setdiff1d(np.arange(size, dtype=np.uint64), excluded, assume_unique=True)
        chosen = rng.choice(candidates, size=count, replace=False)
        return np.sort(chosen.astype(np.uint64))

    banned = set(excluded.tolist())
    chosen: set[int] = set()
    while len(chosen) < count:
        for x in rng.integers(0, size, size=count - len(chosen), dtype=np.uint64).tolist():
            if x not in banned:
                chosen.add(x)
    return np.array(sorted(chosen), dtype=np.uint64)


def _require(params: dict[str, Any], *names: str) -> None:
    missing = [name for name in names if name not in params]
    if missing:
        raise UsageError(f"Missing fixture parameter(s): {', '.join(missing)}")


def _domain_point(params: dict[str, Any], name: str, n: int) -> int:
    point = int(params.get(name, 0))
    if not 0 <= point < 1 << n:
        raise UsageError(f"Fixture parameter '{name}'={point} outside {{0,1}}^{n}")
    return point


def pushforward(n: int, k: int, mapping: Iterable[int]) -> Distribution:
    """Distribution of f(U_k) for the table ``mapping`` of length 2^k."""
    images = np.asarray(list(mapping), dtype=np.uint64)
    if images.size != 1 << k:
        raise ValidationError(f"Function table needs {1 << k} entries, got {images.size}")
    if images.size and int(images.max()) >= 1 << n:
        raise ValidationError(f"Function value outside {{0,1}}^{n}")
    points, counts = np.unique(images, return_counts=True)
    return Distribution.from_arrays(n, points, counts * 2.0 ** -k)


def make(kind: str, params: dict[str, Any], seed: int = 0) -> Distribution:
    """
    Build a fixture distribution.

    Args:
        kind: One of FIXTURE_KINDS
        params: Kind-specific parameters (always includes ``n``)
        seed: Seed for the random choices; equal seeds give equal results

    Returns:
        The requested Distribution
    """
    if kind not in FIXTURE_KINDS:
        raise UsageError(f"Unknown distribution kind '{kind}' (expected one of {', '.join(FIXTURE_KINDS)})")
    _require(params, "n")
    n = int(params["n"])
    rng = np.random.default_rng(seed)

    if kind == "uniform":
        return Distribution.dense(n, np.full(1 << n, 2.0 ** -n))

    if kind == "point":
        return Distribution.sparse(n, [_domain_point(params, "x", n)], [1.0])

    if kind == "flat":
        if "size" in params:
            size = int(params["size"])
        else:
            _require(params, "k")
            size = 1 << int(params["k"])
        points = sample_distinct_points(rng, n, size, params.get("exclude"))
        return Distribution.from_arrays(n, points, np.full(size, 1.0 / size))

    if kind == "pushforward":
        _require(params, "k")
        k = int(params["k"])
        if "mapping" in params:
            mapping = np.asarray(params["mapping"], dtype=np.uint64)
        elif params.get("injective", False):
            mapping = sample_distinct_points(rng, n, 1 << k, params.get("exclude"))
        else:
            mapping = rng.integers(0, 1 << n, size=1 << k, dtype=np.uint64)
        return pushforward(n, k, mapping)

    # spiked-uniform
    _require(params, "spike")
    spike = float(params["spike"])
    if not 0.0 <= spike <= 1.0:
        raise ValidationError(f"Spike mass must be in [0, 1], got {spike}")
    point = _domain_point(params, "point", n)
    probs = np.full(1 << n, (1.0 - spike) / ((1 << n) - 1))
    probs[point] = spike
    logger.debug(f"Spiked-uniform fixture n={n} spike={spike} at {point:#x}")
    return Distribution.dense(n, probs)
