"""Deterministic, parallel Monte Carlo orchestration.

Each replicate draws from its own counter-derived RNG stream
(Philox keyed by the master seed and the replicate index), so the result
multiset is a pure function of the experiment spec; worker count only
affects wall time.  Results serialize as CSV (one replicate per row) with a
JSON metadata sidecar.
"""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .lamperti import StepFunction
from .limitproc import sample_brownian_excursion, sample_limit_profile
from .offspring import OffspringLaw, scaling_sequence
from .paths import rotate_offspring_array, sample_conditioned_increments_batch
from .stats import EmpiricalSample
from .trees import generation_sizes_from_array

VERSION = "0.1.0"
STATISTICS = ("height", "max_h", "h", "H_at_u")
SOURCES = ("cgw", "bessel")


@dataclass(frozen=True)
class ExperimentSpec:
    """What to sample, how often, and under which master seed.

    `n` is the tree size for the cgw source and the mesh for bessel.
    `workers` is a hint only; it is excluded from the spec hash and cannot
    change the results.
    """

    statistic: str
    n: int
    count: int
    seed: int
    source: str = "cgw"
    law: OffspringLaw | None = None
    strategy: str = "auto"
    u: float = 1.0
    workers: int = 1

    def __post_init__(self):
        if self.statistic not in STATISTICS:
            raise ValueError(f"unknown statistic {self.statistic!r}")
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")
        if self.source == "cgw" and self.law is None:
            raise ValueError("cgw experiments need an offspring law")
        if self.source == "bessel" and self.statistic == "height":
            raise ValueError("raw height is a tree statistic")
        if self.count < 1 or self.n < 1:
            raise ValueError("count and n must be positive")

    def to_json(self) -> dict:
        obj = {
            "statistic": self.statistic,
            "n": self.n,
            "count": self.count,
            "seed": self.seed,
            "source": self.source,
            "strategy": self.strategy,
            "u": self.u,
            "workers": self.workers,
        }
        if self.law is not None:
            obj["law"] = self.law.to_json()
        return obj

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentSpec":
        law = OffspringLaw.from_json(obj["law"]) if "law" in obj else None
        return cls(
            statistic=obj["statistic"],
            n=int(obj["n"]),
            count=int(obj["count"]),
            seed=int(obj["seed"]),
            source=obj.get("source", "cgw"),
            law=law,
            strategy=obj.get("strategy", "auto"),
            u=float(obj.get("u", 1.0)),
            workers=int(obj.get("workers", 1)),
        )

    def spec_hash(self) -> str:
        obj = self.to_json()
        obj.pop("workers")
        blob = json.dumps(obj, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def replicate_stream(seed: int, replicate: int) -> np.random.Generator:
    """Independent, reproducible stream for one replicate (counter-keyed)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(replicate,))
    return np.random.Generator(np.random.Philox(ss))


def _evaluate(spec: ExperimentSpec, rng: np.random.Generator) -> float:
    if spec.source == "bessel":
        lp = sample_limit_profile(sample_brownian_excursion(spec.n, rng))
        if spec.statistic == "max_h":
            return float(lp.profile.values.max())
        if spec.statistic == "h":
            return lp.height
        return lp.profile(spec.u)
    n = spec.n
    xi = sample_conditioned_increments_batch(spec.law, n, 1, spec.strategy, rng)[0]
    zs = generation_sizes_from_array(rotate_offspring_array(xi))
    if spec.statistic == "height":
        return float(len(zs) - 1)
    a = scaling_sequence(spec.law, n)
    if spec.statistic == "max_h":
        return max(zs) / a
    if spec.statistic == "h":
        return len(zs) * a / n
    k = int(n * spec.u / a)
    return zs[k] / a if k < len(zs) else 0.0


def _run_chunk(spec: ExperimentSpec, lo: int, hi: int) -> list[float]:
    return [_evaluate(spec, replicate_stream(spec.seed, r)) for r in range(lo, hi)]


@dataclass(frozen=True)
class RunResult:
    spec: ExperimentSpec
    values: np.ndarray          # indexed by replicate

    @property
    def sample(self) -> EmpiricalSample:
        return EmpiricalSample(self.values)

    def metadata(self) -> dict:
        return {
            "version": VERSION,
            "spec_hash": self.spec.spec_hash(),
            "seed": self.spec.seed,
            "statistic": self.spec.statistic,
            "count": self.spec.count,
            "spec": {k: v for k, v in self.spec.to_json().items() if k != "workers"},
        }


def run(spec: ExperimentSpec, workers: int | None = None) -> RunResult:
    """Execute every replicate; output is identical for any worker count."""
    if workers is None:
        workers = spec.workers
    count = spec.count
    if workers <= 1:
        values = _run_chunk(spec, 0, count)
        return RunResult(spec, np.asarray(values))
    chunk = max(1, math.ceil(count / (4 * workers)))
    bounds = [(lo, min(count, lo + chunk)) for lo in range(0, count, chunk)]
    values = np.empty(count)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_chunk, spec, lo, hi) for lo, hi in bounds]
        for (lo, hi), fut in zip(bounds, futures):
            values[lo:hi] = fut.result()
    return RunResult(spec, values)


def write_csv(path, result: RunResult) -> None:
    """One replicate per row; schema versioned in the header comment."""
    lines = [f"# cgwtree v{VERSION} schema=1 statistic={result.spec.statistic}",
             "replicate,value"]
    lines += [f"{i},{v!r}" for i, v in enumerate(result.values.tolist())]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_metadata(path, result: RunResult) -> None:
    with open(path, "w") as fh:
        json.dump(result.metadata(), fh, indent=2, sort_keys=True)
        fh.write("\n")
