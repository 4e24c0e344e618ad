"""Exact distributions of i.i.d. nonnegative integer sums via convolution.

All arrays are truncated to values 0..length-1.  Because increments are
nonnegative, truncation is exact for every retained entry: mass that once
leaves the window can never come back.
"""

from __future__ import annotations

import numpy as np


def split_sizes(n: int) -> list[int]:
    """Block sizes appearing in the balanced binary split of n, smallest first."""
    sizes = set()
    stack = [n]
    while stack:
        m = stack.pop()
        if m >= 2 and m not in sizes:
            sizes.add(m)
            stack.append(m // 2)
            stack.append(m - m // 2)
    return sorted(sizes)


def block_sum_tables(pmf_vec: np.ndarray, n: int, length: int) -> dict[int, np.ndarray]:
    """pmf arrays of S_m (values 0..length-1) for every m in the split tree of n."""
    base = np.asarray(pmf_vec, dtype=float)[:length]
    tables = {1: base}
    for m in split_sizes(n):
        a, b = tables[m // 2], tables[m - m // 2]
        tables[m] = np.convolve(a, b)[:length]
    return tables


def block_sum_pmf(pmf_vec: np.ndarray, n: int, length: int) -> np.ndarray:
    """pmf array of the n-fold sum, values 0..length-1."""
    if n == 1:
        return np.asarray(pmf_vec, dtype=float)[:length]
    return block_sum_tables(pmf_vec, n, length)[n]
