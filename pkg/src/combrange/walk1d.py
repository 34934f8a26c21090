"""Exact and asymptotic quantities for the simple random walk on the integers.

These serve double duty: standalone formula evaluation, and ground truth
for the comb simulator (the reduced projections of the comb walk are
distributed as this walk).

Conventions: the walk starts at 0 and steps +/-1 with probability 1/2.
``p_exact(n, i)`` is the n-step point probability, zero off-parity.
``expected_visits_origin(n)`` counts the visit at time 0.  All logs are
natural.
"""

from __future__ import annotations

import math
from fractions import Fraction

from ._kernels import range_dp
from .errors import SizeLimitError
from .rng import RandomSource

EXACT_N_LIMIT = 60      # C(60, 30) still fits comfortably in 64 bits
RANGE_DP_LIMIT = 2000   # the O(n^3) range DP stays under a few seconds

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


def p_exact(n: int, i: int) -> float:
    """P(n-step walk ends at i): C(n, (n+i)/2) / 2^n, zero off-parity.

    Exact integer arithmetic up to n = 60, log-gamma above (relative error
    ~1e-14, far below any Monte Carlo tolerance here).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if abs(i) > n or (n + i) % 2 != 0:
        return 0.0
    k = (n + i) // 2
    if n <= EXACT_N_LIMIT:
        return math.comb(n, k) / 2.0**n
    log_p = (
        math.lgamma(n + 1)
        - math.lgamma(k + 1)
        - math.lgamma(n - k + 1)
        - n * math.log(2.0)
    )
    return math.exp(log_p)


def p_exact_fraction(n: int, i: int) -> Fraction:
    """Exact rational p_{n,i}; limited to n <= 60 like the float fast path."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > EXACT_N_LIMIT:
        raise SizeLimitError(f"exact rational p_exact limited to n <= {EXACT_N_LIMIT}")
    if abs(i) > n or (n + i) % 2 != 0:
        return Fraction(0)
    return Fraction(math.comb(n, (n + i) // 2), 2**n)


def p_asymptotic(n: int) -> float:
    """Leading-order value sqrt(2/pi)/sqrt(n) of p_{n,i} for i << sqrt(n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return SQRT_2_OVER_PI / math.sqrt(n)


def expected_visits_origin(n: int) -> float:
    """E[number of visits to 0 in steps 0..n] = sum_{m<=n} p_{m,0}.

    Uses the stable recurrence p_{m+2,0} = p_{m,0} * (m+1)/(m+2); only even
    m contribute.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    total = 1.0  # m = 0
    p = 1.0
    m = 0
    while m + 2 <= n:
        p *= (m + 1) / (m + 2)
        total += p
        m += 2
    return total


def expected_range_dp(n: int) -> float:
    """Exact E[distinct sites visited in n steps] by dynamic programming.

    State is (position - running min, running max - position).  Cost grows
    as n^3, hence the documented limit.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n > RANGE_DP_LIMIT:
        raise SizeLimitError(f"range DP limited to n <= {RANGE_DP_LIMIT}")
    return float(range_dp(n))


def ruin_probability(j: int) -> float:
    """P(walk from 0 reaches j before returning to 0) = 1/(2j)."""
    if j < 1:
        raise ValueError("j must be >= 1")
    return 1.0 / (2.0 * j)


def simulate_ruin_trial(j: int, rng: RandomSource) -> bool:
    """One trial of the event behind ``ruin_probability``.

    Bit convention matches the kernels: bit 0 means +1, bit 1 means -1.
    A first step to -1 loses immediately: the walk is back below 0 and
    must revisit 0 before it could ever reach j > 0.  Afterwards the trial
    lives on {0, ..., j} and terminates almost surely.
    """
    if j < 1:
        raise ValueError("j must be >= 1")
    if rng.bits(1) != 0:
        return False
    pos = 1
    while True:
        if pos == j:
            return True
        if pos == 0:
            return False
        pos += 1 if rng.bits(1) == 0 else -1


def simulate_range_trial(n: int, rng: RandomSource) -> int:
    """Distinct sites visited by one n-step walk (max - min + 1)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    pos = mn = mx = 0
    for _ in range(n):
        pos += 1 if rng.bits(1) == 0 else -1
        if pos > mx:
            mx = pos
        elif pos < mn:
            mn = pos
    return mx - mn + 1
