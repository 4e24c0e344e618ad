"""Time-change transforms on nonnegative piecewise-constant functions.

The two transforms here turn an excursion-like function f on [0, 1] into a
height profile: the time change g(u) = sup{s <= 1 : int_0^s dt/f(t) <= u}
(piecewise linear, here computed exactly piece by piece) and its right
derivative f(g(u)), a step function again.  Applied to the rescaled
generation-block excursion of a conditioned tree they reproduce the tree's
cumulative and plain height profile exactly, which is the sharpest invariant
this package tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .offspring import scaling_sequence


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Right-continuous step function: value[j] on [breakpoints[j], breakpoints[j+1]).

    The final piece extends to `domain_end` (math.inf allowed); `end_value`
    optionally pins a distinct value exactly at a finite domain end, e.g. the
    terminal 0 of a rescaled excursion.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    domain_end: float = 1.0
    end_value: float | None = None

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if bp.ndim != 1 or vals.shape != bp.shape or len(bp) == 0:
            raise ValueError("breakpoints and values must be equal-length 1-d arrays")
        if bp[0] != 0.0:
            raise ValueError("domain starts at 0")
        if np.any(np.diff(bp) <= 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        if bp[-1] >= self.domain_end:
            raise ValueError("last breakpoint must precede domain_end")
        if np.any(vals < 0.0) or not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite and nonnegative")

    def __call__(self, s: float) -> float:
        if s < 0.0 or s > self.domain_end:
            raise ValueError(f"argument {s} outside [0, {self.domain_end}]")
        if s == self.domain_end and self.end_value is not None:
            return self.end_value
        j = int(np.searchsorted(self.breakpoints, s, side="right")) - 1
        return float(self.values[j])

    def piece_lengths(self) -> np.ndarray:
        ends = np.append(self.breakpoints[1:], self.domain_end)
        return ends - self.breakpoints

    def integral(self) -> float:
        """int f over the whole domain (inf-length zero pieces contribute 0)."""
        lengths = self.piece_lengths()
        live = self.values != 0.0
        return float(lengths[live] @ self.values[live])

    def to_json(self) -> dict:
        return {
            "breakpoints": self.breakpoints.tolist(),
            "values": self.values.tolist(),
            "domain_end": None if math.isinf(self.domain_end) else self.domain_end,
            "end_value": self.end_value,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "StepFunction":
        end = obj.get("domain_end")
        return cls(
            np.asarray(obj["breakpoints"], dtype=float),
            np.asarray(obj["values"], dtype=float),
            math.inf if end is None else float(end),
            obj.get("end_value"),
        )

    @classmethod
    def constant(cls, value: float, domain_end: float = 1.0) -> "StepFunction":
        return cls(np.zeros(1), np.array([float(value)]), domain_end)


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """Continuous nondecreasing piecewise-linear function starting at (0, 0);
    constant at the last node value beyond the last breakpoint."""

    breakpoints: np.ndarray
    node_values: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        nv = np.asarray(self.node_values, dtype=float)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "node_values", nv)
        if bp.shape != nv.shape or bp.ndim != 1 or len(bp) == 0:
            raise ValueError("breakpoints and node_values must match")
        if bp[0] != 0.0 or nv[0] != 0.0:
            raise ValueError("must start at (0, 0)")
        if np.any(np.diff(bp) <= 0.0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(np.diff(nv) < 0.0):
            raise ValueError("must be nondecreasing")

    def __call__(self, u: float) -> float:
        if u < 0.0:
            raise ValueError("argument must be nonnegative")
        if u >= self.breakpoints[-1]:
            return float(self.node_values[-1])
        return float(np.interp(u, self.breakpoints, self.node_values))

    def to_json(self) -> dict:
        return {"breakpoints": self.breakpoints.tolist(),
                "node_values": self.node_values.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "PiecewiseLinear":
        return cls(np.asarray(obj["breakpoints"], dtype=float),
                   np.asarray(obj["node_values"], dtype=float))


def harmonic_integral(f: StepFunction, s: float) -> float:
    """int_0^s dt / f(t); +inf as soon as a zero piece overlaps [0, s)."""
    if s < 0.0 or s > f.domain_end:
        raise ValueError("integration endpoint outside the domain")
    if s == 0.0:
        return 0.0
    k = int(np.searchsorted(f.breakpoints, s, side="left"))  # pieces with lo < s
    ends = np.minimum(np.append(f.breakpoints[1:k], [s] if k else []), s)
    vals = f.values[:k]
    if np.any(vals == 0.0):
        return math.inf
    return float(np.sum((ends - f.breakpoints[:k]) / vals))


def _transform_pieces(f: StepFunction):
    """Shared scan for the two transforms.

    Returns (u nodes, s nodes, piece values, h) where u_j is the harmonic
    integral up to s_j and h the full integral; the scan stops at the first
    zero piece (the time change is capped there and h is infinite).
    """
    if math.isinf(f.domain_end):
        raise ValueError("transforms are defined for finite domains")
    vals = f.values
    zeros = np.nonzero(vals == 0.0)[0]
    stop = int(zeros[0]) if len(zeros) else len(vals)
    ends = np.append(f.breakpoints[1:stop + 1], f.domain_end)[:stop]
    u = np.concatenate(([0.0], np.cumsum((ends - f.breakpoints[:stop]) / vals[:stop])))
    s = np.concatenate(([0.0], ends))
    h = float(u[-1]) if stop == len(vals) else math.inf
    return u, s, vals[:stop], h


def time_change(f: StepFunction) -> PiecewiseLinear:
    """g(u) = sup{s <= domain end : int_0^s dt/f(t) <= u}.

    Exact on step functions: linear with slope f between consecutive
    integral breakpoints, frozen at the first zero piece, constant once the
    full integral h is spent.
    """
    u_nodes, s_nodes, _, _ = _transform_pieces(f)
    if len(u_nodes) == 1:          # zero piece at the origin
        return PiecewiseLinear(np.array([0.0, 1.0]), np.zeros(2))
    return PiecewiseLinear(u_nodes, s_nodes)


def height_transform(f: StepFunction) -> StepFunction:
    """psi(f) = f o g, the right derivative of the time change.

    Piecewise constant with the integral breakpoints of f; 0 from h onward
    (including the degenerate case of a zero piece at the origin, where the
    result vanishes identically).
    """
    u_nodes, _, vals, _ = _transform_pieces(f)
    return StepFunction(u_nodes, np.append(vals, 0.0), math.inf)


@dataclass(frozen=True)
class ProfileTriple:
    """The rescaled profile objects of one size-n tree.

    profile     H: Z_k / a_n on [k a_n/n, (k+1) a_n/n), then 0
    cumulative  C: running integral of H, reaching exactly 1
    excursion   Y: Z_k / a_n on [t_k, t_{k+1}) with t_k = (Z_0+..+Z_{k-1})/n
    scaled_height  h = int_0^1 dt/Y = (height + 1) a_n / n
    """

    profile: StepFunction
    cumulative: PiecewiseLinear
    excursion: StepFunction
    scaled_height: float
    scale: float = field(repr=False, default=0.0)


def profile_triple(tree, law, n: int | None = None) -> ProfileTriple:
    """Build (H, C, Y, h) for a tree of size n under the law's breadth scale.

    The construction satisfies time_change(Y) = C and height_transform(Y) = H
    exactly at every breakpoint; both identities are enforced by the test
    suite rather than assumed here.
    """
    if n is None:
        n = tree.size
    elif n != tree.size:
        raise ValueError("n must equal the tree size")
    a_n = scaling_sequence(law, n)
    z = np.asarray(tree.generation_sizes, dtype=np.int64)
    dt = a_n / n
    h_gen = len(z)                       # number of generations, height + 1
    grid = np.arange(h_gen + 1) * dt
    profile = StepFunction(grid, np.append(z / a_n, 0.0), math.inf)
    cumulative = PiecewiseLinear(grid, np.concatenate(([0], np.cumsum(z))) / n)
    t = np.concatenate(([0], np.cumsum(z))) / n        # t[h_gen] == 1 exactly
    excursion = StepFunction(t[:-1], z / a_n, 1.0, end_value=0.0)
    return ProfileTriple(profile, cumulative, excursion, h_gen * dt, a_n)
