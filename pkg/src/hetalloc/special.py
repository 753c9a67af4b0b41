"""Scalar special functions backing the closed-form allocation results."""

import math
from functools import lru_cache

import numpy as np

from .errors import DomainError

# Branch point of the Lambert W function, rounded to double precision.
_BRANCH_ARG = -1.0 / math.e
_BRANCH_SNAP = 1e-14

_EULER_GAMMA = 0.5772156649015328606
# Largest n summed term by term; above this the asymptotic expansion is
# already accurate to well under 1e-12.
_DIRECT_LIMIT = 10**7


def lambert_w_minus1(x: float) -> float:
    """Lower real branch of the Lambert W function.

    Solves w * exp(w) = x for the branch w <= -1, defined for
    x in [-1/e, 0).  Values within 1e-14 of the branch point return
    exactly -1.0.  Uses a branch-point square-root series or the
    log-log asymptotic form as the initial guess, refined by Halley
    iteration; the defining-identity residual stays below 1e-12
    relative across the domain.
    """
    x = float(x)
    if x >= 0.0 or x < _BRANCH_ARG - _BRANCH_SNAP:
        raise DomainError(f"lambert_w_minus1 requires -1/e <= x < 0, got {x!r}")
    if abs(x - _BRANCH_ARG) < _BRANCH_SNAP:
        return -1.0

    if x < -0.25:
        # Series around the branch point in p = sqrt(2(1 + e*x)); the
        # lower branch takes every sign negative.
        p = math.sqrt(2.0 * (1.0 + math.e * x))
        w = -1.0 - p - p * p / 3.0 - 11.0 * p**3 / 72.0 - 43.0 * p**4 / 540.0 \
            - 769.0 * p**5 / 17280.0
    else:
        # Asymptotic form for x -> 0-: w ~ log(-x) - log(-log(-x)).
        log_neg_x = math.log(-x)
        log_log = math.log(-log_neg_x)
        w = log_neg_x - log_log + log_log / log_neg_x

    for _ in range(100):
        ew = math.exp(w)
        residual = w * ew - x
        if residual == 0.0:
            break
        w_plus_1 = w + 1.0
        denom = ew * w_plus_1 - 0.5 * (w + 2.0) * residual / w_plus_1
        step = residual / denom
        w -= step
        if abs(step) <= 1e-15 * abs(w):
            break
    return w


@lru_cache(maxsize=4096)
def harmonic(n: int) -> float:
    """n-th harmonic number sum_{i=1}^{n} 1/i, with harmonic(0) = 0.

    Sums directly up to n = 1e7; beyond that switches to the Euler
    asymptotic expansion, whose truncation error there is far below
    double-precision resolution.
    """
    if n != int(n) or n < 0:
        raise ValueError(f"harmonic expects an integer n >= 0, got {n!r}")
    n = int(n)
    if n == 0:
        return 0.0
    if n <= _DIRECT_LIMIT:
        # Ascending magnitudes: summing 1/n .. 1/1 keeps rounding tame.
        return float(np.sum(1.0 / np.arange(n, 0, -1, dtype=np.float64)))
    inv = 1.0 / n
    return math.log(n) + _EULER_GAMMA + 0.5 * inv - inv * inv / 12.0 \
        + inv**4 / 120.0
