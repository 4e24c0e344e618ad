"""Size-biased Galton-Watson trees with a distinguished spine.

Sampling follows the trunk construction: a geometric number of spine
vertices reproduce with the size-biased tilted law and pass the spine to a
uniformly chosen child; everything branching off (including the marked
vertex at the end of the spine) grows as an ordinary tilted Galton-Watson
tree.  The joint law of (tree, mark) has the closed product form that
`exact_prob_size_biased` evaluates.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .offspring import OffspringLaw, size_bias, tilt, total_size_pmf
from .trees import OrderedTree

_GROWTH_CAP = 50_000_000  # vertices; subcritical growth never gets close


@dataclass(frozen=True)
class SpineSample:
    """A size-biased tree with its trunk bookkeeping.

    trunk_length    G, the generation of the marked vertex
    trunk           BFS labels of the spine vertices (generations 0..G-1)
    trunk_offspring offspring counts along the trunk (size-biased draws)
    child_choices   1-based birth ranks passing the spine down
    mark            BFS label of the marked vertex (the root when G = 0)
    """

    tree: OrderedTree
    trunk_length: int
    trunk: tuple[int, ...]
    trunk_offspring: tuple[int, ...]
    child_choices: tuple[int, ...]
    mark: int

    def to_json(self) -> dict:
        return {
            "xi": list(self.tree.xi),
            "trunk": list(self.trunk),
            "trunk_offspring": list(self.trunk_offspring),
            "child_choices": list(self.child_choices),
            "mark": self.mark,
        }


class _Node:
    __slots__ = ("children", "tagged")

    def __init__(self):
        self.children: list["_Node"] = []
        self.tagged = False


def _grow_gw_below(node: _Node, law, rng):
    """Sample offspring for `node` and everything below it, breadth first."""
    queue = deque([node])
    grown = 0
    while queue:
        cur = queue.popleft()
        k = int(law.sample(rng))
        cur.children = [_Node() for _ in range(k)]
        queue.extend(cur.children)
        grown += k
        if grown > _GROWTH_CAP:
            raise RuntimeError("subcritical tree grew past the sanity cap")


def _bfs_arrays(root: _Node):
    """BFS offspring sequence plus the labels of tagged vertices (in order)."""
    xi = []
    tagged = []
    queue = deque([root])
    label = 0
    while queue:
        node = queue.popleft()
        label += 1
        xi.append(len(node.children))
        if node.tagged:
            tagged.append(label)
        queue.extend(node.children)
    return tuple(xi), tagged


def sample_size_biased(law: OffspringLaw, lam: float,
                       rng: np.random.Generator) -> SpineSample:
    """One draw of the size-biased tilted tree with its marked vertex.

    Needs lam < 1 so that the trunk length G ~ geometric(mu)
    (P(G = g) = (1-mu) mu^g on g >= 0) is finite; the marked vertex is the
    endpoint of the trunk, i.e. the root itself when G = 0.
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("size-biased sampling requires 0 < lam < 1")
    tilted = tilt(law, lam)
    biased = size_bias(tilted)
    g = int(rng.geometric(1.0 - tilted.mu)) - 1

    root = _Node()
    chain = [root]                 # trunk vertices, then the marked vertex
    trunk_offspring = []
    child_choices = []
    cur = root
    for _ in range(g):
        k = int(biased.sample(rng))
        pick = int(rng.integers(1, k + 1))
        cur.children = [_Node() for _ in range(k)]
        trunk_offspring.append(k)
        child_choices.append(pick)
        cur = cur.children[pick - 1]
        chain.append(cur)

    # everything off the trunk, and the subtree of the mark itself, grows as
    # an ordinary tilted Galton-Watson tree
    for parent, heir in zip(chain[:-1], chain[1:]):
        for child in parent.children:
            if child is not heir:
                _grow_gw_below(child, tilted, rng)
    _grow_gw_below(chain[-1], tilted, rng)

    for node in chain:
        node.tagged = True
    xi, labels = _bfs_arrays(root)
    return SpineSample(OrderedTree(xi), g, tuple(labels[:-1]),
                       tuple(trunk_offspring), tuple(child_choices), labels[-1])


def sample_spine_truncated(law: OffspringLaw, k: int,
                           rng: np.random.Generator) -> OrderedTree:
    """The infinite-spine critical tree cut at generation k.

    Spine vertices in generations 0..k-1 reproduce with the critical
    size-biased law and hand the spine to a uniform child; off-spine
    vertices branch critically.  Nothing below generation k is generated.
    """
    if k < 0:
        raise ValueError("truncation generation must be nonnegative")
    if k == 0:
        return OrderedTree((0,))
    biased = size_bias(law)
    root = _Node()
    root.tagged = True             # tagged = carries the spine here
    queue = deque([(root, 0)])
    while queue:
        node, gen = queue.popleft()
        if gen >= k:
            continue
        if node.tagged:
            n_children = int(biased.sample(rng))
            node.children = [_Node() for _ in range(n_children)]
            node.children[int(rng.integers(0, n_children))].tagged = True
        else:
            node.children = [_Node() for _ in range(int(law.sample(rng)))]
        for child in node.children:
            queue.append((child, gen + 1))
    xi, _ = _bfs_arrays(root)
    return OrderedTree(xi)


@dataclass(frozen=True)
class GenerationVectorDistance:
    """Exact TV between (Z_1, Z_2, Z_3) under the size-n conditioned tree and
    under the infinite-spine tree cut at generation 3."""

    n: int
    tv: float
    conditioned_mass_checked: float   # joint mass / Dwass total-size pmf; ~1
    spine_tail: float                 # spine-law mass beyond the cap


def generation_vector_tv(law: OffspringLaw, n: int, z_cap: int = 320,
                         return_joints: bool = False):
    """Exactly computed truncation distance at depth 3.

    Both joint laws factor over generations: the conditioned side combines
    per-generation offspring-sum pmfs with the forest version of the total-
    size formula, P(z trees hold m vertices) = (z/m) P(S_m = m - z); the
    spine side chains one size-biased draw plus z-1 critical draws per
    level.  Generation sizes are capped at z_cap; `conditioned_mass_checked`
    certifies the neglected mass by comparison with the independent
    total-size pmf.
    """
    if n < 4:
        raise ValueError("depth-3 vectors need n >= 4")
    c = z_cap
    p = law.pmf_vector(c)
    phat = size_bias(law).pmf_vector(c)
    # offspring-sum pmfs W[z] = law^(*z) on 0..c-1
    w = np.zeros((c, c))
    w[0, 0] = 1.0
    for z in range(1, c):
        w[z] = np.convolve(w[z - 1], p)[:c]
    # spine transitions: one size-biased vertex plus z-1 critical ones
    qt = np.zeros((c, c))
    for z in range(1, c):
        qt[z] = np.convolve(w[z - 1], phat)[:c]
    # centered-walk pmfs: walk_neg[m][z] = P(xi_1+...+xi_m - m = -z), z < c
    window = 4 * c
    cur = np.zeros(c + window)
    cur[c] = 1.0
    walk_neg = np.zeros((n, c))
    walk_neg[0][0] = 1.0  # unused row m=0 guard
    for m in range(1, n):
        cur = np.convolve(cur, p)[1:1 + c + window]
        walk_neg[m] = cur[c - np.arange(c)]
    z3_over_m = np.arange(c, dtype=float)

    def forest_pmf(m3: int) -> np.ndarray:
        # P(forest of z3 critical trees holds m3 vertices), as a vector in z3
        if m3 == 0:
            out = np.zeros(c)
            out[0] = 1.0
            return out
        return z3_over_m / m3 * walk_neg[m3]

    norm = total_size_pmf(law, n)     # exact P(s(T) = n), the joint's mass
    tv_sum = 0.0
    joint_mass = 0.0
    w1 = w[1]
    qt_z3_mass = qt.sum(axis=1)
    spine_mass = 0.0
    if return_joints:
        dense_p = np.zeros((c, c, c))
        dense_q = np.zeros((c, c, c))
    for z1 in range(c):
        p_block = None
        if w1[z1] > 0.0:
            p_block = np.zeros((c, c))
            for z2 in range(c):
                m3 = n - 1 - z1 - z2
                if w[z1][z2] == 0.0 or m3 < 0:
                    continue
                p_block[z2] = w[z1][z2] * w[z2] * forest_pmf(m3)
            p_block *= w1[z1] / norm
            joint_mass += p_block.sum()
        q_block = None
        if z1 >= 1:
            q_block = phat[z1] * qt[z1][:, None] * qt
            spine_mass += phat[z1] * float(qt[z1] @ qt_z3_mass)
        if return_joints:
            if p_block is not None:
                dense_p[z1] = p_block
            if q_block is not None:
                dense_q[z1] = q_block
        if p_block is None and q_block is None:
            continue
        if p_block is None:
            tv_sum += q_block.sum()
        elif q_block is None:
            tv_sum += p_block.sum()
        else:
            tv_sum += np.abs(p_block - q_block).sum()
    result = GenerationVectorDistance(n, 0.5 * float(tv_sum),
                                      joint_mass, 1.0 - spine_mass)
    if return_joints:
        return result, dense_p, dense_q
    return result


def exact_prob_size_biased(law: OffspringLaw, lam: float, tree: OrderedTree,
                           mark: int) -> float:
    """P(size-biased tree = tree, marked vertex = mark).

    Evaluates the product form (1-mu) mu^g
    * prod over strict ancestors i of the mark:  qhat_{d(i)} / d(i)
    * prod over every other vertex i:            q_{d(i)}
    with g the generation of the mark.
    """
    if not 0.0 < lam < 1.0:
        raise ValueError("requires 0 < lam < 1")
    if not 1 <= mark <= tree.size:
        raise ValueError(f"mark {mark} is not a vertex")
    tilted = tilt(law, lam)
    biased = size_bias(tilted)
    mu = tilted.mu
    ancestors = set()
    cur = mark
    while cur != 1:
        cur = tree.parents[cur]
        ancestors.add(cur)
    prob = (1.0 - mu) * mu ** len(ancestors)
    for label in range(1, tree.size + 1):
        d = tree.xi[label - 1]
        if label in ancestors:
            prob *= biased.pmf(d) / d
        else:
            prob *= tilted.pmf(d)
    return prob
