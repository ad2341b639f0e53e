"""Parallel Activations Drift Detector.

For every incoming chunk the frozen random network produces ``e`` output
activations per sample. Each output is compared against all activations seen
since the last drift with ``r`` replicated t-tests on size-``s`` subsamples
drawn with replacement. Drift is signalled when the number of tests with
``p < alpha`` exceeds ``theta * e * r``; the history then restarts from the
current chunk.

Memory: the history grows until the next detection, at worst
``n_chunks * chunk_size * e`` floats (250 * 200 * 12 for the default grid).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable

import numpy as np

from driftbench.core import Chunk, ParameterError, Rng, ShapeError, Verdict, derive
from driftbench.projector import RandomMLP, forward, init_network
from driftbench.stats import t_test_batch


@dataclass(frozen=True)
class PaddParams:
    alpha: float = 0.07
    theta: float = 0.19
    e: int = 12
    r: int = 12
    s: int = 50
    n_hidden: int = 10
    weight_std: float = 0.1
    bias: bool = True

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ParameterError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 < self.theta < 1:
            raise ParameterError(f"theta must lie in (0, 1), got {self.theta}")
        if min(self.e, self.r, self.n_hidden) < 1:
            raise ParameterError("e, r and n_hidden must be >= 1")
        if self.s < 2:
            raise ParameterError("the t-test needs s >= 2")

    @classmethod
    def sudden(cls, **kw) -> "PaddParams":
        return cls(alpha=0.07, theta=0.19, **kw)

    @classmethod
    def gradual(cls, **kw) -> "PaddParams":
        return cls(alpha=0.13, theta=0.26, **kw)

    @classmethod
    def for_dynamics(cls, dynamics: str, **kw) -> "PaddParams":
        presets = {"sudden": cls.sudden, "gradual": cls.gradual}
        if dynamics not in presets:
            raise ParameterError(f"no preset for dynamics {dynamics!r}")
        return presets[dynamics](**kw)

    @property
    def n_tests(self) -> int:
        return self.e * self.r

    @property
    def threshold(self) -> float:
        return self.theta * self.e * self.r

    @property
    def min_count(self) -> int:
        """Smallest counter value that fires (strict ``a > theta * e * r``)."""
        return math.floor(self.threshold) + 1

    def with_(self, **kw) -> "PaddParams":
        return replace(self, **kw)


class _GrowBuffer:
    """Row-appendable 2-D float buffer with amortized doubling."""

    def __init__(self, width: int):
        self._data = np.empty((0, width))
        self._n = 0

    def __len__(self) -> int:
        return self._n

    def append(self, rows: np.ndarray):
        need = self._n + rows.shape[0]
        if need > self._data.shape[0]:
            grown = np.empty((max(need, 2 * self._data.shape[0]), self._data.shape[1]))
            grown[: self._n] = self._data[: self._n]
            self._data = grown
        self._data[self._n:need] = rows
        self._n = need

    def clear(self):
        self._n = 0

    @property
    def view(self) -> np.ndarray:
        return self._data[: self._n]


class PaddDetector:
    """Stateful detector; feed it chunks in stream order.

    The detector reads only feature matrices. ``update`` takes the features
    directly; ``process_chunk`` is a convenience that ignores ``chunk.labels``.
    """

    def __init__(self, params: PaddParams, n_features: int, seed: int,
                 net: RandomMLP | None = None):
        if n_features < 1:
            raise ParameterError("n_features must be >= 1")
        self.params = params
        if net is None:
            net = init_network(
                n_features, params.n_hidden, params.e, Rng.derived(seed, "net"),
                std=params.weight_std, bias=params.bias,
            )
        elif net.n_features != n_features or net.e != params.e:
            raise ShapeError("supplied network does not match n_features / e")
        self.net = net
        self.rng = Rng.derived(seed, "padd/subsample")
        self.history = _GrowBuffer(params.e)
        self.detections: list[int] = []
        self.last_count: int | None = None
        self._chunks_seen = 0

    @property
    def history_length(self) -> int:
        return len(self.history)

    def count_significant(self, activations: np.ndarray) -> int:
        """Counter ``a``: replicated tests of each output against the history.

        Uniform draws per (output, replication): ``s`` for the current chunk
        subsample, then ``s`` for the history subsample, outputs outer,
        replications inner.
        """
        p = self.params
        past = self.history.view
        n_cur, n_past = activations.shape[0], past.shape[0]
        u = self.rng.uniform(p.e * p.r * 2 * p.s).reshape(p.e, p.r, 2, p.s)
        cur_idx = np.minimum((u[:, :, 0, :] * n_cur).astype(np.int64), n_cur - 1)
        past_idx = np.minimum((u[:, :, 1, :] * n_past).astype(np.int64), n_past - 1)
        out = np.arange(p.e)[:, None, None]
        cc = activations[cur_idx, out]
        pc = past[past_idx, out]
        _, pvals, _ = t_test_batch(pc, cc)
        return int(np.count_nonzero(pvals < p.alpha))

    def update_activations(self, activations: np.ndarray, index: int | None = None) -> Verdict:
        if index is None:
            index = self._chunks_seen
        self._chunks_seen += 1
        verdict = Verdict.NONE
        self.last_count = None
        if len(self.history):
            a = self.count_significant(activations)
            self.last_count = a
            if a > self.params.threshold:
                self.history.clear()
                self.detections.append(index)
                verdict = Verdict.DRIFT
        self.history.append(activations)
        return verdict

    def update(self, features: np.ndarray, index: int | None = None) -> Verdict:
        return self.update_activations(forward(self.net, features), index)

    def process_chunk(self, chunk: Chunk) -> Verdict:
        return self.update(chunk.features, chunk.index)


def padd_new(params: PaddParams, n_features: int, seed: int) -> PaddDetector:
    return PaddDetector(params, n_features, seed)


def padd_run(params: PaddParams, stream: Iterable[Chunk], seed: int) -> list[int]:
    """Run a fresh detector over ``stream`` and return its detection chunk indices."""
    detector = None
    for chunk in stream:
        if detector is None:
            detector = PaddDetector(params, chunk.n_features, seed)
        detector.process_chunk(chunk)
    if detector is None:
        raise ParameterError("stream is empty")
    return list(detector.detections)


def detector_seed(base_seed: int, stream_id: str, replication: int, detector: str) -> int:
    return derive(base_seed, f"detector/{detector}/{stream_id}", replication)
