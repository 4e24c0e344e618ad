"""Zeta and polylogarithm evaluation.

The heavy-tailed offspring family needs zeta(s) for generic real s (the
tail-sum expansions hit negative arguments) and Li_s(x) on [0, 1] to full
double precision.  Both are small enough to do in-repo: Euler-Maclaurin for
zeta, and for the polylog a direct series away from 1 plus the singular
expansion Li_s(e^-w) = Gamma(1-s) w^(s-1) + sum_k zeta(s-k) (-w)^k / k!
close to 1.
"""

from __future__ import annotations

import math
from functools import lru_cache

# B_2, B_4, ..., B_30
_BERNOULLI = (
    1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6,
    -3617 / 510, 43867 / 798, -174611 / 330, 854513 / 138,
    -236364091 / 2730, 8553103 / 6, -23749461029 / 870,
    8615841276005 / 14322,
)

_SERIES_CUTOFF = 0.75  # switch point between direct series and the w-expansion


@lru_cache(maxsize=None)
def riemann_zeta(s: float) -> float:
    """zeta(s) for real s != 1: Euler-Maclaurin for s > 0, reflection below
    (direct summation cancels catastrophically at negative s)."""
    if s == 1.0:
        raise ValueError("zeta has a pole at s = 1")
    if s < 0.0:
        return (2.0 ** s * math.pi ** (s - 1.0) * math.sin(math.pi * s / 2.0)
                * math.gamma(1.0 - s) * riemann_zeta(1.0 - s))
    n = 24
    total = sum(k ** -s for k in range(1, n))
    total += 0.5 * n ** -s
    total += n ** (1.0 - s) / (s - 1.0)
    # correction terms B_2j/(2j)! * s(s+1)...(s+2j-2) * n^(-s-2j+1)
    rising = s  # (s)_{2j-1}, iteratively updated
    fact = 1.0
    power = n ** -s
    for j, b in enumerate(_BERNOULLI, start=1):
        fact *= (2 * j - 1) * (2 * j)
        power /= n * n
        term = b / fact * rising * power * n
        total += term
        if abs(term) < 1e-18 * max(1.0, abs(total)):
            break
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    return total


def polylog(s: float, x: float) -> float:
    """Li_s(x) for x in [0, 1], real non-integer s (or any s if x is small).

    Accuracy target is ~1e-13 absolute, certified by geometric tail bounds
    in the series branch.
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"polylog argument outside [0, 1]: {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        if s <= 1.0:
            return math.inf
        return riemann_zeta(s)
    if x <= _SERIES_CUTOFF:
        return _polylog_series(s, x)
    return _polylog_near_one(s, x)


def _polylog_series(s: float, x: float) -> float:
    total = 0.0
    term_x = 1.0
    k = 0
    while True:
        k += 1
        term_x *= x
        total += term_x * k ** -s
        # tail <= x^(k+1) (k+1)^-s / (1-x) for s >= 0; harmless overestimate else
        if term_x / (1.0 - x) * (k + 1) ** -min(s, 0.0) < 1e-16:
            return total
        if k > 10_000_000:  # pragma: no cover - series branch is for x <= cutoff
            raise RuntimeError("polylog series failed to converge")


def _polylog_near_one(s: float, x: float) -> float:
    if abs(s - round(s)) < 1e-9:
        raise ValueError("singular expansion requires non-integer order")
    w = -math.log(x)
    total = math.gamma(1.0 - s) * w ** (s - 1.0)
    term = 1.0  # (-w)^k / k!
    k = 0
    while True:
        total += riemann_zeta(s - k) * term
        k += 1
        term *= -w / k
        if abs(term) * (abs(riemann_zeta(s - k)) + 1.0) < 1e-17 and k > 4:
            return total
        if k > 200:  # pragma: no cover
            raise RuntimeError("polylog expansion failed to converge")


def tail_after_one(s: float, w: float) -> float:
    """zeta(s) - Li_s(e^-w), computed without cancellation for small w.

    This is the exact fluctuation of the polylog below its value at 1; the
    constant zeta(s) term of the singular expansion drops out analytically.
    """
    if w < 0.0:
        raise ValueError("w must be nonnegative")
    if w == 0.0:
        return 0.0
    if abs(s - round(s)) < 1e-9:
        raise ValueError("singular expansion requires non-integer order")
    total = -math.gamma(1.0 - s) * w ** (s - 1.0)
    term = 1.0
    k = 0
    while True:
        if k > 0:
            total -= riemann_zeta(s - k) * term
        k += 1
        term *= -w / k
        if abs(term) * (abs(riemann_zeta(s - k)) + 1.0) < 1e-17 and k > 4:
            return total
        if k > 200:  # pragma: no cover
            raise RuntimeError("tail expansion failed to converge")
