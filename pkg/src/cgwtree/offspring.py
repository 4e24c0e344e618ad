"""Critical offspring laws and their derived quantities.

Every law here has mean exactly 1.  The finite-variance kinds (geometric,
poisson, binary, table) sit in the Gaussian domain of attraction (index 2);
the zeta-tail family p_x = x^-(1+alpha) / zeta(alpha), x >= 1, is the
concrete heavy-tailed family with stability index alpha in (1, 2) and
criticality exact by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Union

import numpy as np
from scipy.special import gammaln

from .special import polylog, riemann_zeta, tail_after_one

KINDS = ("geometric", "poisson", "binary", "zeta", "table")

_CRIT_TOL = 1e-12


@dataclass(frozen=True)
class OffspringLaw:
    """A critical offspring distribution.

    kind   one of "geometric", "poisson", "binary", "zeta", "table"
    alpha  stability index in (1, 2]; 2 for every finite-variance kind
    table  the pmf itself, only for kind == "table"
    """

    kind: str
    alpha: float = 2.0
    table: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown offspring kind {self.kind!r}")
        if self.kind == "zeta":
            if not 1.0 < self.alpha < 2.0:
                raise ValueError("zeta tail index must lie in (1, 2)")
        elif self.alpha != 2.0:
            raise ValueError(f"{self.kind} law has index 2, got {self.alpha}")
        if self.kind == "table":
            if self.table is None or len(self.table) < 3:
                raise ValueError("table law needs probabilities up to some x >= 2")
            p = np.asarray(self.table, dtype=float)
            if p.min() < 0.0:
                raise ValueError("negative probability in table")
            if abs(p.sum() - 1.0) > _CRIT_TOL:
                raise ValueError(f"table pmf sums to {p.sum()!r}, not 1")
            mean = float(np.arange(len(p)) @ p)
            if abs(mean - 1.0) > _CRIT_TOL:
                raise ValueError(f"table law has mean {mean!r}, not critical")
            if p[0] <= 0.0 or p[2:].max() <= 0.0:
                raise ValueError("support must include 0 and some x >= 2")
        elif self.table is not None:
            raise ValueError("table only valid for kind == 'table'")

    # -- constructors -------------------------------------------------------

    @classmethod
    def geometric(cls) -> "OffspringLaw":
        """p_x = 2^-(x+1): the Aldous workhorse, sigma^2 = 2."""
        return cls("geometric")

    @classmethod
    def poisson(cls) -> "OffspringLaw":
        """p_x = e^-1 / x!, sigma^2 = 1."""
        return cls("poisson")

    @classmethod
    def binary(cls) -> "OffspringLaw":
        """p_0 = p_2 = 1/2; note the support lattice has span 2."""
        return cls("binary")

    @classmethod
    def zeta_tail(cls, alpha: float) -> "OffspringLaw":
        """p_x = x^-(1+alpha)/zeta(alpha) for x >= 1, rest of the mass at 0."""
        return cls("zeta", alpha=alpha)

    @classmethod
    def from_table(cls, pmf) -> "OffspringLaw":
        return cls("table", table=tuple(float(q) for q in pmf))

    # -- basic descriptors ---------------------------------------------------

    @cached_property
    def zeta_alpha(self) -> float:
        return riemann_zeta(self.alpha)

    @cached_property
    def sigma2(self) -> float | None:
        """Offspring variance; None when infinite (zeta kind)."""
        if self.kind == "geometric":
            return 2.0
        if self.kind == "poisson":
            return 1.0
        if self.kind == "binary":
            return 1.0
        if self.kind == "zeta":
            return None
        p = np.asarray(self.table)
        x = np.arange(len(p))
        return float(x * x @ p - 1.0)

    @cached_property
    def span(self) -> int:
        """gcd of the positive support; 1 except for lattice laws like binary."""
        if self.kind == "binary":
            return 2
        if self.kind == "table":
            xs = [x for x in range(1, len(self.table)) if self.table[x] > 0]
            return math.gcd(*xs) if xs else 0
        return 1

    @property
    def support_bound(self) -> int | None:
        """Largest support point, or None when unbounded."""
        if self.kind == "binary":
            return 2
        if self.kind == "table":
            return len(self.table) - 1
        return None

    def pmf(self, x: int) -> float:
        """P(offspring count = x)."""
        if x < 0:
            raise ValueError("offspring counts are nonnegative")
        if self.kind == "geometric":
            return 0.5 ** (x + 1)
        if self.kind == "poisson":
            return math.exp(-1.0 - math.lgamma(x + 1))
        if self.kind == "binary":
            return 0.5 if x in (0, 2) else 0.0
        if self.kind == "zeta":
            if x == 0:
                return 1.0 - riemann_zeta(1.0 + self.alpha) / self.zeta_alpha
            return x ** -(1.0 + self.alpha) / self.zeta_alpha
        return self.table[x] if x < len(self.table) else 0.0

    def pmf_vector(self, length: int) -> np.ndarray:
        """pmf at 0..length-1 as an array."""
        x = np.arange(length)
        if self.kind == "geometric":
            return 0.5 ** (x + 1.0)
        if self.kind == "poisson":
            return np.exp(-1.0 - gammaln(x + 1.0))
        if self.kind == "binary":
            out = np.zeros(length)
            out[0] = 0.5
            if length > 2:
                out[2] = 0.5
            return out
        if self.kind == "zeta":
            out = np.zeros(length)
            out[0] = self.pmf(0)
            if length > 1:
                out[1:] = x[1:] ** -(1.0 + self.alpha) / self.zeta_alpha
            return out
        out = np.zeros(length)
        m = min(length, len(self.table))
        out[:m] = self.table[:m]
        return out

    # -- generating function -------------------------------------------------

    def gen_fn(self, lam: float) -> float:
        """phi(lam) = sum lam^x p_x on [0, 1]."""
        if not 0.0 <= lam <= 1.0:
            raise ValueError("generating function argument must lie in [0, 1]")
        if self.kind == "geometric":
            return 1.0 / (2.0 - lam)
        if self.kind == "poisson":
            return math.exp(lam - 1.0)
        if self.kind == "binary":
            return 0.5 * (1.0 + lam * lam)
        if self.kind == "zeta":
            return self.pmf(0) + polylog(1.0 + self.alpha, lam) / self.zeta_alpha
        p = np.asarray(self.table)
        return float(np.polynomial.polynomial.polyval(lam, p))

    def gen_fn_deriv(self, lam: float, order: int = 1) -> float:
        """phi'(lam) or phi''(lam); returns +inf for phi''(1) when sigma^2 is."""
        if order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        if not 0.0 <= lam <= 1.0:
            raise ValueError("generating function argument must lie in [0, 1]")
        if self.kind == "geometric":
            d = 2.0 - lam
            return 1.0 / d ** 2 if order == 1 else 2.0 / d ** 3
        if self.kind == "poisson":
            return math.exp(lam - 1.0)
        if self.kind == "binary":
            return lam if order == 1 else 1.0
        if self.kind == "zeta":
            a = self.alpha
            if order == 1:
                if lam == 0.0:
                    return self.pmf(1)
                return polylog(a, lam) / (lam * self.zeta_alpha)
            if lam == 1.0:
                return math.inf  # infinite second moment
            if lam == 0.0:
                return 2.0 * self.pmf(2)
            li = polylog(a - 1.0, lam) - polylog(a, lam)
            return li / (lam * lam * self.zeta_alpha)
        p = np.asarray(self.table)
        x = np.arange(len(p))
        if order == 1:
            return float(np.sum(x[1:] * p[1:] * lam ** (x[1:] - 1.0)))
        return float(np.sum(x[2:] * (x[2:] - 1.0) * p[2:] * lam ** (x[2:] - 2.0)))

    def survival_step(self, u: float) -> float:
        """One generation of the survival iteration: u -> 1 - phi(1 - u).

        Evaluated without cancellation so that P(Z_k > 0) stays accurate deep
        into the iteration (u may be ~1e-6 after a thousand generations).
        """
        if not 0.0 <= u <= 1.0:
            raise ValueError("survival probability must lie in [0, 1]")
        if u == 0.0:
            return 0.0
        if self.kind == "geometric":
            return u / (1.0 + u)
        if self.kind == "poisson":
            return -math.expm1(-u)
        if self.kind == "binary":
            return u * (2.0 - u) / 2.0
        if self.kind == "zeta":
            if u > 0.25:
                return 1.0 - self.gen_fn(1.0 - u)
            w = -math.log1p(-u)
            return tail_after_one(1.0 + self.alpha, w) / self.zeta_alpha
        p = np.asarray(self.table)
        x = np.arange(len(p))
        return float(-np.sum(p[1:] * np.expm1(x[1:] * math.log1p(-u))))

    # -- sampling -------------------------------------------------------------

    def sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        """Draw offspring counts, exactly in distribution."""
        if self.kind == "geometric":
            return rng.geometric(0.5, size=size) - 1
        if self.kind == "poisson":
            return rng.poisson(1.0, size=size)
        if self.kind == "binary":
            return 2 * rng.integers(0, 2, size=size)
        if self.kind == "zeta":
            z = rng.zipf(1.0 + self.alpha, size=size)
            return np.where(rng.random(size=size) < self.pmf(0), 0, z)
        return rng.choice(len(self.table), size=size, p=self.table)

    # -- serialization --------------------------------------------------------

    def to_json(self) -> dict:
        obj = {"kind": self.kind}
        if self.kind == "zeta":
            obj["alpha"] = self.alpha
        if self.kind == "table":
            obj["pmf"] = list(self.table)
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "OffspringLaw":
        kind = obj["kind"]
        if kind == "zeta":
            return cls.zeta_tail(float(obj["alpha"]))
        if kind == "table":
            return cls.from_table(obj["pmf"])
        return cls(kind)


@dataclass(frozen=True)
class TiltedLaw:
    """Exponential tilt q_x = lam^x p_x / phi(lam) of a critical law.

    The tilt leaves the size-conditioned tree law unchanged but makes the
    unconditioned tree finite in mean for lam < 1.
    """

    base: OffspringLaw
    lam: float

    def __post_init__(self):
        if not 0.0 < self.lam <= 1.0:
            raise ValueError("tilt parameter must lie in (0, 1]")

    @cached_property
    def phi(self) -> float:
        return self.base.gen_fn(self.lam)

    @cached_property
    def mu(self) -> float:
        """Mean of the tilted law: lam phi'(lam) / phi(lam); 1 iff lam == 1."""
        return self.lam * self.base.gen_fn_deriv(self.lam, 1) / self.phi

    def pmf(self, x: int) -> float:
        return self.lam ** x * self.base.pmf(x) / self.phi

    def pmf_vector(self, length: int) -> np.ndarray:
        x = np.arange(length)
        return self.lam ** x * self.base.pmf_vector(length) / self.phi

    @property
    def mean(self) -> float:
        return self.mu

    @property
    def support_bound(self) -> int | None:
        return self.base.support_bound

    def sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        if self.base.kind == "geometric":
            # tilted geometric stays geometric with ratio lam/2
            return rng.geometric(1.0 - self.lam / 2.0, size=size) - 1
        if self.base.kind == "poisson":
            return rng.poisson(self.lam, size=size)
        if self.base.kind == "binary":
            q2 = self.pmf(2)
            return 2 * (rng.random(size=size) < q2).astype(np.int64)
        return _table_sampler(self).sample(rng, size)


@dataclass(frozen=True)
class SizeBiasedLaw:
    """Size bias of a law with mean mu <= 1: pmf x -> x p_x / mu.

    For a critical base law this is x p_x; mass at 0 vanishes either way.
    """

    source: Union[OffspringLaw, TiltedLaw]

    @cached_property
    def mu(self) -> float:
        return 1.0 if isinstance(self.source, OffspringLaw) else self.source.mu

    def pmf(self, x: int) -> float:
        return x * self.source.pmf(x) / self.mu

    def pmf_vector(self, length: int) -> np.ndarray:
        return np.arange(length) * self.source.pmf_vector(length) / self.mu

    def sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        src = self.source
        base = src if isinstance(src, OffspringLaw) else src.base
        lam = 1.0 if isinstance(src, OffspringLaw) else src.lam
        if base.kind == "geometric":
            # size-biased geometric(r): 1 + sum of two geometric(r) counts
            p = 1.0 - lam / 2.0
            return rng.geometric(p, size=size) + rng.geometric(p, size=size) - 1
        if base.kind == "poisson":
            return rng.poisson(lam, size=size) + 1
        if base.kind == "binary":
            return np.full_like(np.empty(size, dtype=np.int64), 2) if size is not None \
                else np.int64(2)
        if base.kind == "zeta" and lam == 1.0:
            # x * x^-(1+alpha) / zeta(alpha) is exactly the zipf(alpha) law
            return rng.zipf(base.alpha, size=size)
        return _table_sampler(self).sample(rng, size)


class _LazyCdfSampler:
    """Inverse-cdf sampling from a pmf callable, extending the table on demand.

    Exact for light-tailed laws; refuses to crawl a heavy tail (those kinds
    all have closed-form samplers).
    """

    def __init__(self, pmf):
        self._pmf = pmf
        self._cum = [pmf(0)]

    def _extend(self, target: float):
        cum = self._cum
        while cum[-1] < target:
            x = len(cum)
            if x > 1_000_000:
                raise RuntimeError("cdf table blew up; tail too heavy for table sampling")
            cum.append(cum[-1] + self._pmf(x))

    def sample(self, rng: np.random.Generator, size=None):
        u = rng.random(size=size)
        self._extend(np.max(u))
        cum = np.asarray(self._cum)
        idx = np.searchsorted(cum, u, side="right")
        return np.minimum(idx, len(cum) - 1)


@lru_cache(maxsize=64)
def _table_sampler(law) -> _LazyCdfSampler:
    return _LazyCdfSampler(law.pmf)


# -- derived operations -------------------------------------------------------


def tilt(law: OffspringLaw, lam: float) -> TiltedLaw:
    """Tilted law q_x = lam^x p_x / phi(lam); identity at lam = 1."""
    return TiltedLaw(law, lam)


def size_bias(law: Union[OffspringLaw, TiltedLaw]) -> SizeBiasedLaw:
    """Size-biased law of a critical or tilted offspring law."""
    if isinstance(law, TiltedLaw) and law.mu > 1.0 + _CRIT_TOL:
        raise ValueError("size bias requires mean <= 1")
    return SizeBiasedLaw(law)


def truncated_second_moment(law: OffspringLaw, x) -> float:
    """v(x) = sum_{y <= x} y (y-1) p_y; accepts math.inf for the full sum."""
    if x is math.inf or x == math.inf:
        s2 = law.sigma2
        return math.inf if s2 is None else s2
    if x < 0:
        raise ValueError("truncation point must be nonnegative")
    x = int(x)
    bound = law.support_bound
    if bound is not None:
        x = min(x, bound)
    if law.kind in ("geometric", "poisson"):
        # tail beyond ~400 is below double precision already
        x = min(x, 400)
    if x < 2:
        return 0.0
    y = np.arange(2, x + 1)
    if law.kind == "zeta":
        return float(np.sum((y - 1.0) * y ** -law.alpha)) / law.zeta_alpha
    p = law.pmf_vector(x + 1)
    return float(np.sum(y * (y - 1.0) * p[2:]))


def scaling_sequence(law: OffspringLaw, n: int) -> float:
    """The breadth scale a_n: sigma sqrt(n) for finite variance, and
    (n / (zeta(alpha) (2-alpha)))^(1/alpha) for the zeta family (the
    convention that fixes a_n^2 / v(a_n) ~ n)."""
    if n < 1:
        raise ValueError("n must be positive")
    if law.kind == "zeta":
        a = law.alpha
        return (n / (law.zeta_alpha * (2.0 - a))) ** (1.0 / a)
    return math.sqrt(law.sigma2 * n)


def total_size_pmf(law: Union[OffspringLaw, TiltedLaw], n: int) -> float:
    """P(total progeny = n) = (1/n) P(xi_1 + ... + xi_n = n - 1).

    The n-fold convolution is evaluated by binary-powering with support
    truncated at n-1, which is exact: an increment above n-1 cannot be part
    of any configuration summing to n-1.
    """
    if n < 1:
        raise ValueError("tree size must be positive")
    if n == 1:
        return law.pmf(0)
    from .convdp import block_sum_pmf

    vec = law.pmf_vector(n)
    return float(block_sum_pmf(vec, n, n)[n - 1]) / n


def height_cdf(law: OffspringLaw, k: int) -> float:
    """P(height <= k) = phi iterated k+1 times at 0."""
    return 1.0 - height_survival(law, k)


def height_survival(law: OffspringLaw, k: int) -> float:
    """P(height > k), iterated in survival form for accuracy at large k."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    u = 1.0
    for _ in range(k + 1):
        u = law.survival_step(u)
    return u


def law_from_name(name: str, alpha: float | None = None, pmf=None) -> OffspringLaw:
    """CLI-facing constructor: geometric | poisson | binary | zeta | table."""
    name = name.lower()
    if name == "zeta":
        if alpha is None:
            raise ValueError("zeta law needs --alpha")
        return OffspringLaw.zeta_tail(alpha)
    if name == "table":
        if pmf is None:
            raise ValueError("table law needs --pmf")
        return OffspringLaw.from_table(pmf)
    return OffspringLaw(name)
