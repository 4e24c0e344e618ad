"""Desk-scale approximation of the limiting excursion and profile.

The limit excursion is approximated by the exact lattice machinery itself
(a conditioned, rotated, rescaled walk of mesh N), which inherits the
samplers' correctness guarantees; for the Gaussian domain an independent
cross-check generator builds the normalized Brownian excursion as the
radius of a three-dimensional Brownian bridge, exact at mesh points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lamperti import StepFunction, harmonic_integral, height_transform
from .offspring import OffspringLaw, scaling_sequence
from .paths import rotate_offspring_array, sample_conditioned_increments_batch


@dataclass(frozen=True)
class LimitProfile:
    """Height transform of a sampled excursion; degenerate means the
    harmonic integral already diverges at the origin at working precision."""

    profile: StepFunction
    height: float
    degenerate: bool


@dataclass(frozen=True)
class LimitSample:
    """A mesh-N approximation of the limit objects (Y, H, h)."""

    mesh: int
    law: OffspringLaw | None
    excursion: StepFunction
    profile: StepFunction
    height: float


def sample_limit_excursion(law: OffspringLaw, mesh: int, strategy="auto",
                           rng: np.random.Generator | None = None) -> StepFunction:
    """One rescaled conditioned-walk excursion on [0, 1] (starts at 1/a_N)."""
    if mesh < 100:
        raise ValueError("mesh must be at least 100")
    xi = sample_conditioned_increments_batch(law, mesh, 1, strategy, rng)[0]
    return _excursion_from_offspring(rotate_offspring_array(xi), law, mesh)


def _excursion_from_offspring(xi: np.ndarray, law, mesh: int) -> StepFunction:
    a = scaling_sequence(law, mesh)
    walk = np.empty(mesh, dtype=np.int64)
    walk[0] = 1
    np.cumsum(xi[:-1] - 1, out=walk[1:])
    walk[1:] += 1
    # walk[i] = S(i) for i = 0..mesh-1; S(mesh) = 0 by construction
    return StepFunction(np.arange(mesh) / mesh, walk / a, 1.0, end_value=0.0)


def sample_brownian_excursion(mesh: int, rng: np.random.Generator) -> StepFunction:
    """Normalized Brownian excursion at mesh points, via the radius of three
    independent Brownian bridges (exact joint Gaussian law at the mesh).

    The first mesh cell carries the value at 1/mesh so that the step
    function has no zero piece at the origin; the endpoint value 0 is kept
    at the domain end.
    """
    if mesh < 100:
        raise ValueError("mesh must be at least 100")
    steps = rng.standard_normal((3, mesh)) / math.sqrt(mesh)
    w = np.cumsum(steps, axis=1)
    t = np.arange(1, mesh + 1) / mesh
    bridge = w - t * w[:, -1:]
    radius = np.sqrt(np.sum(bridge * bridge, axis=0))   # values at 1/mesh .. 1
    values = np.concatenate(([radius[0]], radius[:-1]))
    return StepFunction(np.arange(mesh) / mesh, values, 1.0, end_value=0.0)


def sample_limit_profile(source: StepFunction) -> LimitProfile:
    """H = psi(source) and h = int dt/source, with a degeneracy marker."""
    h = harmonic_integral(source, source.domain_end)
    profile = height_transform(source)
    degenerate = source.values[0] == 0.0
    return LimitProfile(profile, h, degenerate)


def sample_limit(law: OffspringLaw, mesh: int, strategy="auto",
                 rng: np.random.Generator | None = None) -> LimitSample:
    """Bundle (Y, H, h) from one lattice excursion draw."""
    y = sample_limit_excursion(law, mesh, strategy, rng)
    lp = sample_limit_profile(y)
    return LimitSample(mesh, law, y, lp.profile, lp.height)
