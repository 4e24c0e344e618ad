"""Skip-free lattice paths, the tree <-> excursion bijection, and exact
samplers for size-conditioned Galton-Watson trees.

A path S(0..n) with increments >= -1 encodes a tree of size n when it is an
excursion (starts at 1, stays positive, ends at 0): the increment at step i
is xi_i - 1 with xi_i the offspring count of breadth-first label i.  A bridge
(same endpoints, sign-free) becomes an excursion by cutting at its first
suffix minimum and swapping the two pieces; among the n cyclic rotations of
a skip-free bridge exactly one is an excursion, and that rotation is it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .convdp import block_sum_tables
from .lamperti import StepFunction
from .offspring import OffspringLaw, TiltedLaw
from .trees import OrderedTree, tree_from_array

STRATEGIES = ("rejection", "uniform_composition", "multinomial", "dp_sequential")

_REJECTION_BATCH = 65536  # increments per rejection batch, tuned for cache


class NotAnExcursionError(ValueError):
    """Raised by decode_path; `reason` names the first violated condition."""

    def __init__(self, reason: str, index: int):
        super().__init__(f"{reason} at step {index}")
        self.reason = reason
        self.index = index


@dataclass(frozen=True)
class LatticePath:
    """Integer path S(0..n) with all increments >= -1."""

    values: tuple[int, ...]

    def __post_init__(self):
        v = self.values
        if len(v) < 2:
            raise ValueError("a path has at least one step")
        for i in range(1, len(v)):
            if v[i] - v[i - 1] < -1:
                raise ValueError(f"increment below -1 at step {i}")

    @property
    def n(self) -> int:
        return len(self.values) - 1

    @property
    def increments(self) -> tuple[int, ...]:
        v = self.values
        return tuple(v[i] - v[i - 1] for i in range(1, len(v)))

    @property
    def is_bridge(self) -> bool:
        return self.values[0] == 1 and self.values[-1] == 0

    @property
    def is_excursion(self) -> bool:
        return self.is_bridge and all(v > 0 for v in self.values[:-1])

    def excursion_defect(self) -> tuple[str, int] | None:
        """First violated excursion condition as (reason, index), or None."""
        v = self.values
        if v[0] != 1:
            return "does not start at 1", 0
        for i in range(1, len(v) - 1):
            if v[i] <= 0:
                return "hits 0 before the end", i
        if v[-1] != 0:
            return "does not end at 0", len(v) - 1
        return None

    def to_json(self) -> list[int]:
        return list(self.values)

    @classmethod
    def from_json(cls, seq) -> "LatticePath":
        return cls(tuple(int(x) for x in seq))


def path_from_offspring(xi) -> LatticePath:
    """S(0) = 1, S(i) = S(i-1) + xi_i - 1."""
    xi = np.asarray(xi, dtype=np.int64)
    vals = np.empty(len(xi) + 1, dtype=np.int64)
    vals[0] = 1
    np.cumsum(xi - 1, out=vals[1:])
    vals[1:] += 1
    return LatticePath(tuple(int(v) for v in vals))


def encode_tree(tree: OrderedTree) -> LatticePath:
    """The tree's excursion; increments are offspring counts minus one."""
    return path_from_offspring(tree.xi)


def decode_path(path: LatticePath) -> OrderedTree:
    """Inverse of encode_tree; rejects non-excursions with the first defect."""
    defect = path.excursion_defect()
    if defect is not None:
        raise NotAnExcursionError(*defect)
    v = path.values
    xi = tuple(v[i] - v[i - 1] + 1 for i in range(1, len(v)))
    return OrderedTree(xi)


def first_min_index(path: LatticePath) -> int:
    """Smallest i with S(j) >= S(i) for all j >= i (the first suffix minimum)."""
    return int(np.argmin(np.asarray(path.values)))


def rotate_to_excursion(path: LatticePath) -> LatticePath:
    """Vervaat rotation of a bridge at its first minimum.

    Cyclically permutes the increments so that the suffix after the first
    minimum comes first; the result is the unique rotation of the bridge
    that is an excursion.  An excursion rotates to itself.
    """
    if not path.is_bridge:
        raise ValueError("rotation is defined for bridges (S(0)=1, S(n)=0)")
    t = first_min_index(path)
    if t == path.n:
        return path
    inc = np.asarray(path.increments, dtype=np.int64)
    return path_from_offspring(np.roll(inc, -t) + 1)


def rotate_offspring_array(xi: np.ndarray) -> np.ndarray:
    """Array-level rotation: offspring counts of a bridge -> excursion order."""
    walk = np.cumsum(xi - 1)
    t = int(np.argmin(walk)) + 1      # argmin of S(1..n); S(0)=1 is never minimal
    if t == len(xi):
        return xi
    return np.roll(xi, -t)


# -- conditioned increment sampling -----------------------------------------


def sample_conditioned_increments(law, n, strategy="auto", rng=None, return_info=False):
    """One sequence (xi_1, ..., xi_n) i.i.d. from `law` given sum = n - 1.

    Every strategy is exact in distribution; they differ only in cost:

    - "rejection": resample until the sum hits n-1 (expected ~a_n tries).
    - "uniform_composition": geometric laws only; the conditioned product
      measure is uniform on the compositions of n-1 into n parts.
    - "multinomial": poisson laws only; conditioning yields the counts of
      n-1 balls dropped uniformly into n cells.
    - "dp_sequential": any law; splits the required total over a balanced
      binary tree of index blocks using exact block-sum distributions
      (support truncation at n-1 is exact, so the reported truncation
      bound is 0).
    """
    out = sample_conditioned_increments_batch(law, n, 1, strategy, rng,
                                              info=(info := {}))
    return (out[0], info) if return_info else out[0]


def sample_conditioned_increments_batch(law, n, count, strategy="auto",
                                        rng=None, info=None):
    """`count` independent conditioned sequences as a (count, n) int array."""
    if rng is None:
        raise ValueError("an explicit numpy Generator is required")
    if n < 1:
        raise ValueError("n must be positive")
    if strategy == "auto":
        strategy = default_strategy(law, n)
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if info is None:
        info = {}
    info["strategy"] = strategy
    span = law.span if isinstance(law, OffspringLaw) else law.base.span
    if span > 1 and (n - 1) % span != 0:
        raise ValueError(f"law admits no tree of size {n} (support lattice "
                         f"span {span})")
    if n == 1:
        return np.zeros((count, 1), dtype=np.int64)
    if strategy == "uniform_composition":
        if _kind(law) != "geometric" or isinstance(law, TiltedLaw):
            raise ValueError("uniform_composition is exact for the geometric law only")
        return _sample_compositions(n, count, rng)
    if strategy == "multinomial":
        if _kind(law) != "poisson" or isinstance(law, TiltedLaw):
            raise ValueError("multinomial is exact for the poisson law only")
        return rng.multinomial(n - 1, np.full(n, 1.0 / n), size=count).astype(np.int64)
    if strategy == "rejection":
        return _sample_rejection(law, n, count, rng, info)
    return _sample_dp(law, n, count, rng, info)


def default_strategy(law, n) -> str:
    if isinstance(law, OffspringLaw):
        if law.kind == "geometric":
            return "uniform_composition"
        if law.kind == "poisson":
            return "multinomial"
    return "rejection" if n <= 64 else "dp_sequential"


def _kind(law) -> str:
    return law.kind if isinstance(law, OffspringLaw) else law.base.kind


def _sample_compositions(n, count, rng) -> np.ndarray:
    # a uniform composition of n-1 into n parts = gaps between the order
    # statistics of an (n-1)-subset of {1, ..., 2n-2}
    out = np.empty((count, n), dtype=np.int64)
    chunk = max(1, min(count, 1 + (1 << 22) // (2 * n)))
    for lo in range(0, count, chunk):
        hi = min(count, lo + chunk)
        keys = rng.random((hi - lo, 2 * n - 2))
        bars = np.argpartition(keys, n - 1, axis=1)[:, :n - 1]
        bars.sort(axis=1)
        out[lo:hi] = np.diff(bars + 1, prepend=0, append=2 * n - 1, axis=1) - 1
    return out


def _sample_rejection(law, n, count, rng, info) -> np.ndarray:
    out = np.empty((count, n), dtype=np.int64)
    got = 0
    attempts = 0
    rows = max(1, _REJECTION_BATCH // n)
    while got < count:
        draw = law.sample(rng, (rows, n))
        attempts += rows
        hits = draw[draw.sum(axis=1) == n - 1]
        take = min(len(hits), count - got)
        out[got:got + take] = hits[:take]
        got += take
    info["attempts"] = attempts
    return out


@lru_cache(maxsize=8)
def _dp_tables_cached(law, n) -> dict[int, np.ndarray]:
    return block_sum_tables(law.pmf_vector(n), n, n)


def _sample_dp(law, n, count, rng, info) -> np.ndarray:
    tables = _dp_tables_cached(law, n)
    info["truncation_bound"] = 0.0   # support cut at n-1 is exact here
    total = n - 1
    if tables[n][total] <= 0.0:
        raise ValueError(f"law admits no tree of size {n}")
    out = np.zeros((count, n), dtype=np.int64)
    # stack of (block size, first column, sample rows, remaining sums)
    stack = [(n, 0, np.arange(count), np.full(count, total, dtype=np.int64))]
    while stack:
        m, col, rows, rem = stack.pop()
        live = rem > 0
        if not live.any():
            continue
        rows, rem = rows[live], rem[live]
        if m == 1:
            out[rows, col] = rem
            continue
        m1 = m // 2
        w1, w2 = tables[m1], tables[m - m1]
        split = np.empty(len(rows), dtype=np.int64)
        for r in np.unique(rem):
            sel = rem == r
            lo = max(0, r - (len(w2) - 1))
            w = w1[lo:r + 1] * w2[r - lo::-1]
            cum = np.cumsum(w)
            u = rng.random(int(sel.sum())) * cum[-1]
            split[sel] = lo + np.searchsorted(cum, u, side="right")
        stack.append((m - m1, col + m1, rows, rem - split))
        stack.append((m1, col, rows, split))
    return out


# -- the conditioned-tree sampler --------------------------------------------


def sample_cgw_tree(law, n, strategy="auto", rng=None) -> OrderedTree:
    """Exact sample of a Galton-Watson tree conditioned on total size n.

    Conditioned increments are exchangeable, so rotating the resulting
    bridge to its unique excursion rotation leaves each tree with exactly
    its conditional probability.
    """
    xi = sample_conditioned_increments(law, n, strategy, rng)
    return tree_from_array(rotate_offspring_array(xi))


def sample_cgw_offspring_batch(law, n, count, strategy="auto", rng=None) -> np.ndarray:
    """`count` conditioned trees as excursion-ordered offspring rows."""
    xi = sample_conditioned_increments_batch(law, n, count, strategy, rng)
    for i in range(count):
        xi[i] = rotate_offspring_array(xi[i])
    return xi


# -- rescaling ----------------------------------------------------------------


def rescale(path: LatticePath, n: int, a_n: float) -> StepFunction:
    """The rescaled path s -> S([n s]) / a_n as a step function on [0, 1]."""
    if path.n != n:
        raise ValueError("n must equal the path length")
    vals = np.asarray(path.values, dtype=float) / a_n
    return StepFunction(np.arange(n) / n, vals[:-1], 1.0, end_value=vals[-1])
