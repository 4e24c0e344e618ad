"""Rooted ordered trees in breadth-first storage.

A tree of size n is stored as the sequence of offspring counts
(xi_1, ..., xi_n) of its vertices in breadth-first label order: the root is
label 1, generation k is labelled left to right after generation k-1.  Under
this labelling the offspring sequence is also the increment sequence of the
tree's lattice-path encoding, so the structure doubles as the canonical
serialization.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

ENUMERATION_CAP = 12  # combinatorial explosion guard


@dataclass(frozen=True)
class OrderedTree:
    """Ordered rooted tree as its breadth-first offspring-count sequence."""

    xi: tuple[int, ...]

    def __post_init__(self):
        xi = self.xi
        n = len(xi)
        if n == 0:
            raise ValueError("a tree has at least its root")
        walk = 1
        for i, x in enumerate(xi):
            if x < 0:
                raise ValueError("offspring counts are nonnegative")
            walk += x - 1
            if walk <= 0 and i < n - 1:
                raise ValueError("offspring sequence exhausts the tree early")
        if walk != 0:
            raise ValueError(f"offspring counts sum to {sum(xi)}, need size-1={n - 1}")

    @property
    def size(self) -> int:
        return len(self.xi)

    @cached_property
    def generation_sizes(self) -> tuple[int, ...]:
        """(Z_0, Z_1, ..., Z_h), ending at the last nonempty generation."""
        xi = self.xi
        sizes = [1]
        start, width = 0, 1
        while True:
            nxt = sum(xi[start:start + width])
            if nxt == 0:
                return tuple(sizes)
            sizes.append(nxt)
            start += width
            width = nxt

    @property
    def height(self) -> int:
        return len(self.generation_sizes) - 1

    @cached_property
    def parents(self) -> tuple[int, ...]:
        """Parent label of every vertex (0 for the root), BFS labels 1..n."""
        par = [0] * (self.size + 1)
        child = 2
        for label, x in enumerate(self.xi, start=1):
            for _ in range(x):
                par[child] = label
                child += 1
        return tuple(par)

    def children(self, label: int) -> range:
        """Labels of the children of `label`, in birth order."""
        if not 1 <= label <= self.size:
            raise ValueError(f"no vertex {label}")
        first = 2 + sum(self.xi[:label - 1])
        return range(first, first + self.xi[label - 1])

    def generation_of(self, label: int) -> int:
        if not 1 <= label <= self.size:
            raise ValueError(f"no vertex {label}")
        boundary = 0
        for g, z in enumerate(self.generation_sizes):
            boundary += z
            if label <= boundary:
                return g
        raise AssertionError("unreachable")

    def truncate(self, k: int) -> "OrderedTree":
        """Cut off every vertex in a generation beyond k."""
        if k < 0:
            raise ValueError("generation index must be nonnegative")
        zs = self.generation_sizes
        if k >= len(zs) - 1:
            return self
        keep = sum(zs[:k])            # vertices that keep their offspring
        new_leaves = zs[k]
        return OrderedTree(self.xi[:keep] + (0,) * new_leaves)

    def to_json(self) -> list[int]:
        return list(self.xi)

    @classmethod
    def from_json(cls, seq) -> "OrderedTree":
        return cls(tuple(int(x) for x in seq))


def tree_from_array(xi: np.ndarray) -> OrderedTree:
    """Wrap an already-validated offspring array without re-checking."""
    t = object.__new__(OrderedTree)
    object.__setattr__(t, "xi", tuple(int(x) for x in xi))
    return t


def generation_sizes_from_array(xi: np.ndarray) -> list[int]:
    """(Z_0, ..., Z_h) straight from an offspring array; used on hot paths."""
    sizes = [1]
    start, width = 1, 1
    n = len(xi)
    csum = np.concatenate(([0], np.cumsum(xi)))
    while True:
        nxt = int(csum[start + width - 1] - csum[start - 1])
        if nxt == 0:
            return sizes
        sizes.append(nxt)
        start += width
        width = nxt


def enumerate_trees(law, n: int) -> list[tuple[OrderedTree, float]]:
    """All ordered trees of size n with degrees in the law's support, each with
    its exact Galton-Watson probability prod_i p_{d(i)}.

    The oracle behind every distributional test; capped at n = 12.
    """
    if n < 1:
        raise ValueError("tree size must be positive")
    if n > ENUMERATION_CAP:
        raise ValueError(f"enumeration capped at n = {ENUMERATION_CAP}")
    probs = [float(v) for v in law.pmf_vector(n)]
    support = [x for x in range(n) if probs[x] > 0.0]
    out: list[tuple[OrderedTree, float]] = []
    prefix = [0] * n

    def grow(i: int, walk: int, weight: float):
        # walk = S(i) = 1 + sum_{j<=i} (xi_j - 1); excursion needs walk > 0
        # before the last step and walk == 0 exactly at i == n.
        if i == n:
            if walk == 0:
                out.append((OrderedTree(tuple(prefix)), weight))
            return
        for x in support:
            nxt = walk + x - 1
            if i < n - 1 and nxt <= 0:
                continue
            if nxt > n - i - 1:   # cannot come back down to 0 in time
                continue
            prefix[i] = x
            grow(i + 1, nxt, weight * probs[x])

    grow(0, 1, 1.0)
    return out
