"""Synthetic binary-classification streams with sudden or gradual concept drift.

Each concept is a pair of unit-variance Gaussians (one per class) living on
the informative features; the remaining features are N(0, 1) noise. Drift
centers are spaced evenly, and around each center samples switch from the
old concept to the new one with a logistic probability.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from driftbench.core import Chunk, ParameterError, Rng, derive

SUDDEN = "sudden"
GRADUAL = "gradual"
DEFAULT_SLOPES = {SUDDEN: 999.0, GRADUAL: 5.0}
MEAN_LOW, MEAN_HIGH = -2.0, 2.0


@dataclass(frozen=True)
class StreamSpec:
    n_features: int = 30
    n_drifts: int = 10
    dynamics: str = SUDDEN
    n_chunks: int = 250
    chunk_size: int = 200
    informative_fraction: float = 0.30
    slope: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.dynamics not in DEFAULT_SLOPES:
            raise ParameterError(f"unknown dynamics {self.dynamics!r}")
        if self.slope is None:
            object.__setattr__(self, "slope", DEFAULT_SLOPES[self.dynamics])
        if not 0 < self.informative_fraction <= 1:
            raise ParameterError("informative_fraction must lie in (0, 1]")
        if self.n_drifts < 0 or self.n_chunks < 1 or self.chunk_size < 1 or self.n_features < 1:
            raise ParameterError(f"invalid stream dimensions in {self}")
        if self.slope <= 0:
            raise ParameterError("slope must be positive")

    @property
    def n_informative(self) -> int:
        # round before ceil so 0.3 * 30 does not become 10 through float error
        return max(1, math.ceil(round(self.informative_fraction * self.n_features, 9)))

    @property
    def stream_id(self) -> str:
        return f"{self.dynamics}-d{self.n_drifts}-f{self.n_features}"


@dataclass(frozen=True)
class DriftSchedule:
    centers: tuple[int, ...]
    dynamics: str
    slope: float
    n_chunks: int

    @property
    def half_period(self) -> float:
        return self.n_chunks / (2 * len(self.centers)) if self.centers else math.inf

    def to_json(self) -> str:
        return json.dumps({"centers": list(self.centers), "dynamics": self.dynamics})


@dataclass
class ConceptSet:
    """Class means per concept: ``means[j, y]`` is a vector over informative features."""

    means: np.ndarray = field(repr=False)

    @property
    def n_concepts(self) -> int:
        return self.means.shape[0]


def build_schedule(spec: StreamSpec) -> DriftSchedule:
    """Evenly spaced drift centers ``floor((2i + 1) * n_chunks / (2 * n_drifts))``,
    the midpoints of ``n_drifts`` equal segments rounded down."""
    d = spec.n_drifts
    centers = tuple((2 * i + 1) * spec.n_chunks // (2 * d) for i in range(d))
    if any(b <= a for a, b in zip(centers, centers[1:])) or (centers and centers[-1] >= spec.n_chunks):
        raise ParameterError(f"{d} drifts do not fit in {spec.n_chunks} chunks")
    return DriftSchedule(centers=centers, dynamics=spec.dynamics, slope=spec.slope, n_chunks=spec.n_chunks)


def _logistic(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def concept_mix_probability(k: int, i: int, schedule: DriftSchedule) -> float:
    """Probability that a sample of chunk ``k`` comes from concept ``i + 1``
    during transition ``i``."""
    if not 0 <= i < len(schedule.centers):
        raise ParameterError(f"transition {i} out of range")
    z = schedule.slope * (k - schedule.centers[i]) / schedule.half_period
    return float(_logistic(z))


def nearest_transition(k: int, schedule: DriftSchedule) -> int:
    """Index of the drift center closest to chunk ``k`` (earlier one on ties)."""
    centers = np.asarray(schedule.centers)
    return int(np.argmin(np.abs(centers - k)))


def draw_concepts(spec: StreamSpec, rng: Rng) -> ConceptSet:
    n_concepts = spec.n_drifts + 1
    n_inf = spec.n_informative
    u = rng.uniform(n_concepts * 2 * n_inf).reshape(n_concepts, 2, n_inf)
    return ConceptSet(means=MEAN_LOW + (MEAN_HIGH - MEAN_LOW) * u)


def generate_chunk(
    spec: StreamSpec, concepts: ConceptSet, schedule: DriftSchedule, k: int, rng: Rng
) -> Chunk:
    """Generate chunk ``k``.

    Draw order from ``rng``: ``chunk_size`` label uniforms, ``chunk_size``
    concept uniforms, then ``chunk_size * n_features`` normals (row-major).
    """
    if not 0 <= k < spec.n_chunks:
        raise ParameterError(f"chunk index {k} outside [0, {spec.n_chunks})")
    n = spec.chunk_size
    labels = (rng.uniform(n) < 0.5).astype(np.int64)
    u_concept = rng.uniform(n)
    if schedule.centers:
        i = nearest_transition(k, schedule)
        p_new = concept_mix_probability(k, i, schedule)
        concept = np.where(u_concept < p_new, i + 1, i)
    else:
        concept = np.zeros(n, dtype=np.int64)
    features = rng.normal(0.0, 1.0, n * spec.n_features).reshape(n, spec.n_features)
    n_inf = spec.n_informative
    features[:, :n_inf] += concepts.means[concept, labels]
    return Chunk(index=k, features=features, labels=labels)


@dataclass
class Stream:
    spec: StreamSpec
    schedule: DriftSchedule
    concepts: ConceptSet

    def __iter__(self) -> Iterator[Chunk]:
        rng = Rng.derived(self.spec.seed, "stream/chunks")
        for k in range(self.spec.n_chunks):
            yield generate_chunk(self.spec, self.concepts, self.schedule, k, rng)

    def chunks(self) -> list[Chunk]:
        return list(self)


def generate_stream(spec: StreamSpec) -> Stream:
    """Build the schedule and concepts for ``spec``; iterate the result for chunks.

    Concept means come from ``derive(seed, "stream/concepts")`` and chunk
    samples from ``derive(seed, "stream/chunks")``, so iterating twice
    yields identical chunks.
    """
    schedule = build_schedule(spec)
    concepts = draw_concepts(spec, Rng.derived(spec.seed, "stream/concepts"))
    return Stream(spec=spec, schedule=schedule, concepts=concepts)


def stream_grid(
    dynamics=(SUDDEN, GRADUAL),
    n_drifts=(3, 5, 10, 15),
    n_features=(30, 60, 90),
    replications: int = 10,
    base_seed: int = 0,
    **overrides,
) -> list[tuple[StreamSpec, int]]:
    """Every ``(spec, replication)`` pair of a grid, seeds derived per pair."""
    out = []
    for dyn in dynamics:
        for d in n_drifts:
            for f in n_features:
                for rep in range(replications):
                    probe = StreamSpec(n_features=f, n_drifts=d, dynamics=dyn, **overrides)
                    seed = derive(base_seed, f"stream/{probe.stream_id}", rep)
                    out.append((StreamSpec(n_features=f, n_drifts=d, dynamics=dyn, seed=seed, **overrides), rep))
    return out


def dump_stream(stream: Stream, directory: Path, name: str | None = None) -> tuple[Path, Path]:
    """Write ``<name>.csv`` (f0..f{n-1}, label, chunk) and ``<name>.schedule.json``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    name = name or stream.spec.stream_id
    csv_path = directory / f"{name}.csv"
    schedule_path = directory / f"{name}.schedule.json"
    header = ",".join([f"f{j}" for j in range(stream.spec.n_features)] + ["label", "chunk"])
    with open(csv_path, "w") as fh:
        fh.write(header + "\n")
        for chunk in stream:
            block = np.column_stack(
                [chunk.features, chunk.labels, np.full(chunk.n_samples, chunk.index)]
            )
            fmt = ["%.17g"] * stream.spec.n_features + ["%d", "%d"]
            np.savetxt(fh, block, delimiter=",", fmt=fmt)
    schedule_path.write_text(stream.schedule.to_json() + "\n")
    return csv_path, schedule_path


def spec_to_dict(spec: StreamSpec) -> dict:
    return asdict(spec)
