from collections import Counter

import numpy as np
import pytest

from cgwtree.offspring import OffspringLaw, size_bias, tilt, total_size_pmf
from cgwtree.spine import (exact_prob_size_biased, sample_size_biased,
                           sample_spine_truncated)
from cgwtree.trees import OrderedTree, enumerate_trees

from helpers import chi2_gof_pvalue, conditional_tree_law, empirical_tv


def test_trunk_length_distribution(geometric, rng):
    mu = tilt(geometric, 0.5).mu
    m = 40_000
    counts = Counter(sample_size_biased(geometric, 0.5, rng).trunk_length
                     for _ in range(m))
    pmf = {g: (1 - mu) * mu ** g for g in range(12)}
    assert chi2_gof_pvalue(counts, pmf, m) > 1e-3
    assert counts[0] / m == pytest.approx(2.0 / 3.0, abs=0.01)


def test_exact_prob_single_vertex(geometric):
    # empty trunk: (1 - mu) q_0; the lone vertex is the mark, not an ancestor
    t = tilt(geometric, 0.5)
    got = exact_prob_size_biased(geometric, 0.5, OrderedTree((0,)), 1)
    assert got == pytest.approx((1 - t.mu) * t.pmf(0), abs=1e-15)
    assert got == pytest.approx(0.5, abs=1e-15)


def test_exact_prob_leaf_mark(geometric):
    got = exact_prob_size_biased(geometric, 0.5, OrderedTree((1, 0)), 2)
    assert got == pytest.approx(3.0 / 32.0, abs=1e-15)


def test_exact_prob_bad_args(geometric):
    with pytest.raises(ValueError):
        exact_prob_size_biased(geometric, 1.0, OrderedTree((0,)), 1)
    with pytest.raises(ValueError):
        exact_prob_size_biased(geometric, 0.5, OrderedTree((0,)), 2)


@pytest.mark.parametrize("lam", [0.3, 0.5, 0.8])
def test_exact_prob_sums_to_size_biased_mass(geometric, lam):
    # sum over (tree, mark) with s(t) = n of the product form
    # equals (1 - mu) n Q(s = n)
    t = tilt(geometric, lam)
    for n in range(1, 7):
        total = sum(exact_prob_size_biased(geometric, lam, tree, m)
                    for tree, _ in enumerate_trees(geometric, n)
                    for m in range(1, n + 1))
        target = (1 - t.mu) * n * total_size_pmf(t, n)
        assert total == pytest.approx(target, abs=1e-12)


def test_construction_matches_exact_probs(geometric, rng):
    # empirical (tree, mark) distribution restricted to s <= 3
    t = tilt(geometric, 0.5)
    exact = {}
    for n in range(1, 4):
        for tree, _ in enumerate_trees(geometric, n):
            for m in range(1, n + 1):
                exact[tree.xi, m] = exact_prob_size_biased(geometric, 0.5, tree, m)
    m_samples = 100_000
    draws = []
    for _ in range(m_samples):
        s = sample_size_biased(geometric, 0.5, rng)
        key = (s.tree.xi, s.mark) if s.tree.size <= 3 else ("big", 0)
        draws.append(key)
    exact["big", 0] = 1.0 - sum(exact.values())
    assert empirical_tv(draws, exact) < 0.01


def test_mean_tree_size(geometric, rng):
    # E[s] = sum_n n * (1-mu) * n * Q(s = n), truncated far into the tail
    t = tilt(geometric, 0.5)
    exact = sum(n * n * (1 - t.mu) * total_size_pmf(t, n) for n in range(1, 200))
    m = 100_000
    mean = np.mean([sample_size_biased(geometric, 0.5, rng).tree.size
                    for _ in range(m)])
    assert mean == pytest.approx(exact, rel=0.02)


def test_spine_sample_structure(geometric, rng):
    for _ in range(200):
        s = sample_size_biased(geometric, 0.5, rng)
        assert s.tree.generation_of(s.mark) == s.trunk_length
        assert len(s.trunk) == s.trunk_length
        # trunk really is the ancestor line of the mark
        anc = []
        cur = s.mark
        while cur != 1:
            cur = s.tree.parents[cur]
            anc.append(cur)
        assert tuple(sorted(anc)) == tuple(sorted(s.trunk))
        for label, k in zip(s.trunk, s.trunk_offspring):
            assert s.tree.xi[label - 1] == k


def test_spine_truncated_base_cases(geometric, rng):
    assert sample_spine_truncated(geometric, 0, rng).xi == (0,)
    m = 40_000
    counts = Counter(sample_spine_truncated(geometric, 1, rng).generation_sizes[1]
                     for _ in range(m))
    pmf = {z: z * 0.5 ** (z + 1) for z in range(1, 25)}   # size-biased law
    assert chi2_gof_pvalue(counts, pmf, m) > 1e-3


def test_spine_truncated_second_generation_mean(geometric, rng):
    # E[Z_k] = 1 + k sigma^2 for the infinite-spine tree (first-moment
    # recursion: the spine vertex adds sigma^2 + 1, the others mean 1)
    m = 60_000
    z2 = [sample_spine_truncated(geometric, 2, rng).generation_sizes[2]
          for _ in range(m)]
    assert np.mean(z2) == pytest.approx(1 + 2 * geometric.sigma2, rel=0.03)


def test_spine_truncated_never_deeper(zeta15, rng):
    for _ in range(100):
        assert sample_spine_truncated(zeta15, 3, rng).height <= 3


def test_conditioned_spine_reproduces_cgw(geometric, rng):
    # conditioning the size-biased tree on s = n recovers the conditioned
    # Galton-Watson law (tilting invariance); exact check on the full tree law
    n = 6
    exact = conditional_tree_law(geometric, n)
    draws = []
    while len(draws) < 4000:
        s = sample_size_biased(geometric, 0.5, rng)
        if s.tree.size == n:
            draws.append(s.tree.xi)
    assert empirical_tv(draws, exact) < 0.05
    counts = Counter(draws)
    assert chi2_gof_pvalue(counts, exact, len(draws)) > 1e-3


def test_size_bias_slope(geometric, rng):
    # P(s(T-hat) = n) proportional to n Q(s = n), slope (1 - mu)
    t = tilt(geometric, 0.5)
    m = 150_000
    counts = Counter(sample_size_biased(geometric, 0.5, rng).tree.size
                     for _ in range(m))
    pmf = {n: (1 - t.mu) * n * total_size_pmf(t, n) for n in range(1, 9)}
    assert chi2_gof_pvalue(counts, pmf, m) > 1e-3


def test_theorem5_trend_small(geometric, rng):
    # truncated conditioned trees approach the infinite-spine law
    k = 2
    spine_draws = [sample_spine_truncated(geometric, k, rng).generation_sizes
                   for _ in range(6000)]
    spine_pmf = {key: cnt / 6000 for key, cnt in Counter(spine_draws).items()}
    from cgwtree.paths import sample_cgw_tree

    tvs = []
    for n in (30, 400):
        draws = [sample_cgw_tree(geometric, n, "auto", rng)
                 .truncate(k).generation_sizes for _ in range(6000)]
        tvs.append(empirical_tv(draws, spine_pmf))
    assert tvs[1] < tvs[0]


def test_lambda_guard(geometric, rng):
    with pytest.raises(ValueError):
        sample_size_biased(geometric, 1.0, rng)
    with pytest.raises(ValueError):
        sample_spine_truncated(geometric, -1, rng)


def test_generation_vector_tv_conditioned_side_exact(geometric):
    # the DP's conditioned joint must match brute-force tree enumeration
    from cgwtree.spine import generation_vector_tv

    n = 7
    _, dense_p, _ = generation_vector_tv(geometric, n, z_cap=16,
                                         return_joints=True)
    pairs = enumerate_trees(geometric, n)
    total = sum(p for _, p in pairs)
    brute = {}
    for tree, p in pairs:
        zs = list(tree.generation_sizes[1:4]) + [0] * (3 - (len(tree.generation_sizes) - 1))
        key = tuple(zs[:3])
        brute[key] = brute.get(key, 0.0) + p / total
    for key, val in brute.items():
        assert dense_p[key] == pytest.approx(val, abs=1e-12)
    assert dense_p.sum() == pytest.approx(1.0, abs=1e-12)


def test_generation_vector_tv_spine_side_matches_sampler(geometric, rng):
    from cgwtree.spine import generation_vector_tv

    res, _, dense_q = generation_vector_tv(geometric, 200, z_cap=64,
                                           return_joints=True)
    assert res.spine_tail < 1e-4
    m = 30_000
    heavy = np.argwhere(dense_q > 1e-3)
    exact = {tuple(ix): dense_q[tuple(ix)] for ix in heavy}
    exact["rest"] = 1.0 - sum(exact.values())
    draws = []
    for _ in range(m):
        zs = sample_spine_truncated(geometric, 3, rng).generation_sizes
        key = tuple(zs[1:])
        draws.append(key if key in exact else "rest")
    assert empirical_tv(draws, exact) < 0.03


def test_generation_vector_tv_mass_certificate(geometric):
    from cgwtree.spine import generation_vector_tv

    res = generation_vector_tv(geometric, 300, z_cap=128)
    assert res.conditioned_mass_checked == pytest.approx(1.0, abs=1e-4)
    assert 0.0 < res.tv < 1.0
