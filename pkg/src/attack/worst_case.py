"""
Worst-Case Adversary

For a fixed distinguisher D_hat the achievable values of E_Y[D_hat] over all
Y with every probability at most 2^-k form an interval [lo, hi]. Its
endpoints are reached greedily: put mass 2^-k on the points with the
largest (resp. smallest) D_hat values, ties broken by ascending point, with
the remainder on the next point. The worst-case advantage is the distance
from E_X[D_hat] to that interval.
"""

from __future__ import annotations

import math

import numpy as np

from src.distributions import Distribution
from src.errors import ValidationError

from .sliced_distinguisher import SignFunction, apply_sign


def _greedy_fill(order: np.ndarray, domain_size: int, cap: float) -> np.ndarray:
    probs = np.zeros(domain_size, dtype=np.float64)
    full = min(int(math.floor(1.0 / cap)), domain_size)
    probs[order[:full]] = cap
    remainder = 1.0 - full * cap
    if remainder > 0 and full < domain_size:
        probs[order[full]] = remainder
    return probs


def worst_case_advantage(dhat: SignFunction, X: Distribution, k: float) -> tuple[float, Distribution]:
    """
    min over Y with H_inf(Y) >= k of |E_X[dhat] - E_Y[dhat]|, and a Y achieving it.

    Args:
        dhat: Distinguisher, callable or table of length 2^n
        X: Distribution under attack
        k: Min-entropy level of the adversary's Y (k <= n)

    Returns:
        (value, witness Y)
    """
    k = float(k)
    if not 0 <= k <= X.n:
        raise ValidationError(f"Entropy level k must be in [0, n={X.n}], got {k}")

    points = np.arange(X.domain_size, dtype=np.uint64)
    values = apply_sign(dhat, points)
    x_points, x_probs = X.support()
    expected_x = math.fsum(apply_sign(dhat, x_points) * x_probs)

    cap = 2.0 ** -k
    index = np.arange(X.domain_size)
    y_hi = _greedy_fill(np.lexsort((index, -values)), X.domain_size, cap)
    y_lo = _greedy_fill(np.lexsort((index, values)), X.domain_size, cap)
    hi = math.fsum(values * y_hi)
    lo = math.fsum(values * y_lo)

    if expected_x > hi:
        return expected_x - hi, Distribution.dense(X.n, y_hi)
    if expected_x < lo:
        return lo - expected_x, Distribution.dense(X.n, y_lo)

    weight = 1.0 if hi == lo else (expected_x - lo) / (hi - lo)
    mixture = weight * y_hi + (1.0 - weight) * y_lo
    return 0.0, Distribution.dense(X.n, mixture)
