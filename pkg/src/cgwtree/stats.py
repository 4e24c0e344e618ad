"""Empirical-distribution machinery and exact analytic checks.

Distances (Kolmogorov-Smirnov, total variation, Wasserstein-1) plus the two
checks with exact finite-n sides: the local limit comparison of an exact
n-fold convolution against the Gaussian density, and the height-tail ratio
ladder computed from iterated generating functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.special import gammaln

from .convdp import block_sum_pmf
from .offspring import OffspringLaw, height_survival, scaling_sequence


@dataclass(frozen=True, eq=False)
class EmpiricalSample:
    """A sorted sample of real values."""

    values: np.ndarray

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=float))
        if v.size == 0:
            raise ValueError("empty sample")
        object.__setattr__(self, "values", v)

    @property
    def count(self) -> int:
        return len(self.values)


def ks_distance(a: EmpiricalSample, b: EmpiricalSample) -> float:
    """sup-norm distance of the two empirical CDFs (ties handled exactly)."""
    grid = np.concatenate([a.values, b.values])
    grid.sort(kind="mergesort")
    fa = np.searchsorted(a.values, grid, side="right") / a.count
    fb = np.searchsorted(b.values, grid, side="right") / b.count
    return float(np.max(np.abs(fa - fb)))


def ks_threshold(m: int, n: int, level: float = 0.01) -> float:
    """Asymptotic two-sample rejection threshold c(level) sqrt((m+n)/(mn));
    c(0.01) = 1.628."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    c = math.sqrt(-0.5 * math.log(level / 2.0))
    return c * math.sqrt((m + n) / (m * n))


def tv_discrete(p: Mapping, q: Mapping) -> float:
    """(1/2) sum |p - q| over the union of the supports."""
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def w1_distance(a: EmpiricalSample, b: EmpiricalSample) -> float:
    """Wasserstein-1 distance: the area between the empirical CDFs."""
    grid = np.concatenate([a.values, b.values])
    grid.sort(kind="mergesort")
    fa = np.searchsorted(a.values, grid[:-1], side="right") / a.count
    fb = np.searchsorted(b.values, grid[:-1], side="right") / b.count
    return float(np.sum(np.abs(fa - fb) * np.diff(grid)))


@dataclass(frozen=True)
class GaussianDensity:
    """Standard normal density; the alpha = 2 limit density under the
    sigma-sqrt(n) scaling convention."""

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)

    def at_zero(self) -> float:
        return 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class LocalLimitResult:
    n: int
    scale: float
    max_deviation: float     # max_x |a_n P(S_n - n = x) - g(x/a_n)|
    density_at_zero: float

    @property
    def relative(self) -> float:
        return self.max_deviation / self.density_at_zero


def exact_centered_sum_pmf(law: OffspringLaw, n: int, xs: np.ndarray) -> np.ndarray:
    """P(xi_1 + ... + xi_n - n = x) for each x, by exact convolution.

    Geometric sums are negative binomial and poisson sums poisson, both in
    closed form; other laws go through the convolution tables.
    """
    ks = xs + n
    out = np.zeros(len(xs))
    valid = ks >= 0
    k = ks[valid].astype(np.int64)
    if law.kind == "geometric":
        logp = gammaln(n + k) - gammaln(k + 1) - gammaln(n) - (n + k) * math.log(2.0)
        out[valid] = np.exp(logp)
    elif law.kind == "poisson":
        logp = k * math.log(n) - n - gammaln(k + 1)
        out[valid] = np.exp(logp)
    else:
        length = int(ks.max()) + 1
        table = block_sum_pmf(law.pmf_vector(length), n, length)
        out[valid] = table[k]
    return out


def local_limit_check(law: OffspringLaw, n: int, window: float = 5.0) -> LocalLimitResult:
    """Deviation of the exact lattice-sum pmf from its Gaussian approximation,
    maximized over |x| <= window * a_n.

    Only meaningful for aperiodic finite-variance laws; periodic supports
    (e.g. the binary law) and heavy tails are rejected.
    """
    if law.kind == "zeta":
        raise ValueError("gaussian local limit check needs a finite-variance law")
    if law.span != 1:
        raise ValueError("local limit check needs an aperiodic support lattice")
    if n < 100:
        raise ValueError("n too small for an asymptotic check")
    a = scaling_sequence(law, n)
    half = int(window * a)
    xs = np.arange(-half, half + 1)
    g = GaussianDensity()
    dev = np.abs(a * exact_centered_sum_pmf(law, n, xs) - g(xs / a))
    return LocalLimitResult(n, a, float(dev.max()), g.at_zero())


@dataclass(frozen=True)
class HeightTailPoint:
    n: int
    generations: int         # k = floor(n / a_n)
    tail: float              # P(height > k), exact via iterated phi
    ratio: float             # a_n * tail, the quantity that stabilizes


def height_tail_check(law: OffspringLaw, n: int) -> HeightTailPoint:
    """Exact height-tail probability at the profile's natural depth scale."""
    a = scaling_sequence(law, n)
    k = int(n / a)
    tail = height_survival(law, k)
    return HeightTailPoint(n, k, tail, a * tail)


def height_tail_ladder(law: OffspringLaw, ns) -> list[HeightTailPoint]:
    return [height_tail_check(law, int(n)) for n in ns]
