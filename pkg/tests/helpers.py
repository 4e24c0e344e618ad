"""Independent oracles and small statistical helpers for the test suite.

Everything here is deliberately written without reference to the package's
own algorithms: counting recursions, brute-force conditioning, chi-square
machinery.  Tests compare package output against these.
"""

from __future__ import annotations

from collections import Counter
from functools import lru_cache

import numpy as np
from scipy import stats as sps


@lru_cache(maxsize=None)
def motzkin_tree_count(n: int) -> int:
    """Ordered trees with n vertices and at most 2 children per vertex,
    counted by an independent root-decomposition recursion."""
    if n <= 0:
        return 0
    if n == 1:
        return 1
    # root has one child (subtree size n-1) or two (sizes i and n-1-i)
    total = motzkin_tree_count(n - 1)
    for i in range(1, n - 1):
        total += motzkin_tree_count(i) * motzkin_tree_count(n - 1 - i)
    return total


@lru_cache(maxsize=None)
def catalan(n: int) -> int:
    if n == 0:
        return 1
    return sum(catalan(i) * catalan(n - 1 - i) for i in range(n))


def conditional_tree_law(law, n):
    """Exact law of the size-n conditioned tree, as {xi tuple: probability}."""
    from cgwtree.trees import enumerate_trees

    pairs = enumerate_trees(law, n)
    total = sum(p for _, p in pairs)
    return {t.xi: p / total for t, p in pairs}


def empirical_pmf(samples) -> dict:
    counts = Counter(samples)
    total = sum(counts.values())
    return {k: v / total for k, v in counts.items()}


def chi2_two_sample_pvalue(counts_a: Counter, counts_b: Counter,
                           min_expected: float = 5.0) -> float:
    """Two-sample chi-square homogeneity test with small-cell pooling."""
    keys = sorted(set(counts_a) | set(counts_b))
    a = np.array([counts_a.get(k, 0) for k in keys], dtype=float)
    b = np.array([counts_b.get(k, 0) for k in keys], dtype=float)
    a, b = _pool_small_cells(a, b, min_expected)
    if len(a) <= 1:
        return 1.0
    na, nb = a.sum(), b.sum()
    pooled = (a + b) / (na + nb)
    expected_a, expected_b = na * pooled, nb * pooled
    stat = np.sum((a - expected_a) ** 2 / expected_a)
    stat += np.sum((b - expected_b) ** 2 / expected_b)
    dof = len(a) - 1
    return float(sps.chi2.sf(stat, dof))


def chi2_gof_pvalue(counts: Counter, pmf: dict, total: int,
                    min_expected: float = 5.0) -> float:
    """Goodness of fit against an exact finite pmf (mass outside pooled)."""
    keys = sorted(pmf)
    obs = np.array([counts.get(k, 0) for k in keys], dtype=float)
    exp = np.array([pmf[k] * total for k in keys])
    rest_obs = total - obs.sum()
    rest_exp = total - exp.sum()
    if rest_exp > 0.5:
        obs = np.append(obs, rest_obs)
        exp = np.append(exp, rest_exp)
    obs, exp = _pool_small_cells(obs, exp, min_expected)
    if len(obs) <= 1:
        return 1.0
    stat = np.sum((obs - exp) ** 2 / exp)
    return float(sps.chi2.sf(stat, len(obs) - 1))


def _pool_small_cells(a: np.ndarray, b: np.ndarray, min_expected: float):
    order = np.argsort(b)[::-1]
    a, b = a[order], b[order]
    while len(b) > 1 and b[-1] < min_expected:
        a[-2] += a[-1]
        b[-2] += b[-1]
        a, b = a[:-1], b[:-1]
    return a, b


def empirical_tv(samples, exact_pmf: dict) -> float:
    emp = empirical_pmf(samples)
    keys = set(emp) | set(exact_pmf)
    return 0.5 * sum(abs(emp.get(k, 0.0) - exact_pmf.get(k, 0.0)) for k in keys)
