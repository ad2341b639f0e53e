"""ADWIN: adaptive windowing over an exponential histogram.

The window is stored as buckets of width ``2**level``, at most ``M`` per
level; each bucket keeps its sum and its centered second moment so that the
window mean and variance are exact. After every insertion each bucket
boundary is a candidate cut ``W = W0 . W1``. A cut fails when

    |mean(W0) - mean(W1)| >= sqrt(2/m * var(W) * L) + 2/(3m) * L

with ``m = 1 / (1/n0 + 1/n1)``, ``L = ln(2 / delta')`` and
``delta' = delta / n``. On failure everything older than the oldest failing
cut is dropped and the check repeats until no cut fails.
"""
from __future__ import annotations

import math

from driftbench.core import ParameterError, Verdict

DEFAULT_DELTA = 0.002
BUCKETS_PER_LEVEL = 5
MIN_SIDE = 5


def cut_threshold(n0: int, n1: int, variance: float, delta: float) -> float:
    n = n0 + n1
    m = 1.0 / (1.0 / n0 + 1.0 / n1)
    log_term = math.log(2.0 * n / delta)
    return math.sqrt(2.0 / m * variance * log_term) + 2.0 / (3.0 * m) * log_term


class ADWIN:
    def __init__(self, delta: float = DEFAULT_DELTA, max_buckets: int = BUCKETS_PER_LEVEL,
                 min_side: int = MIN_SIDE):
        if not 0 < delta < 1:
            raise ParameterError(f"delta must lie in (0, 1), got {delta}")
        self.delta = delta
        self.max_buckets = max_buckets
        self.min_side = min_side
        self.reset()

    def reset(self):
        # levels[j] holds buckets of width 2**j, oldest first: [total, m2]
        self.levels: list[list[list[float]]] = []
        self.width = 0
        self.total = 0.0
        self.m2 = 0.0
        self.n_detections = 0

    @property
    def n_buckets(self) -> int:
        return sum(len(level) for level in self.levels)

    @property
    def mean(self) -> float:
        return self.total / self.width if self.width else 0.0

    @property
    def variance(self) -> float:
        return self.m2 / self.width if self.width else 0.0

    def buckets(self) -> list[tuple[int, float, float]]:
        """``(width, total, m2)`` for every bucket, oldest first."""
        out = []
        for j in range(len(self.levels) - 1, -1, -1):
            out.extend((1 << j, b[0], b[1]) for b in self.levels[j])
        return out

    def _insert(self, value: float):
        if self.width:
            mean = self.total / self.width
            self.m2 += self.width * (value - mean) ** 2 / (self.width + 1)
        self.width += 1
        self.total += value
        if not self.levels:
            self.levels.append([])
        self.levels[0].append([value, 0.0])
        j = 0
        while len(self.levels[j]) > self.max_buckets:
            (s1, q1), (s2, q2) = self.levels[j].pop(0), self.levels[j].pop(0)
            w = 1 << j
            merged_m2 = q1 + q2 + (s1 / w - s2 / w) ** 2 * w / 2.0
            if j + 1 == len(self.levels):
                self.levels.append([])
            self.levels[j + 1].append([s1 + s2, merged_m2])
            j += 1

    def _drop_oldest(self):
        j = len(self.levels) - 1
        total, m2 = self.levels[j].pop(0)
        w = 1 << j
        n_rest = self.width - w
        if n_rest == 0:
            self.width, self.total, self.m2 = 0, 0.0, 0.0
        else:
            rest_total = self.total - total
            delta = total / w - rest_total / n_rest
            self.m2 = max(self.m2 - m2 - delta ** 2 * w * n_rest / self.width, 0.0)
            self.width, self.total = n_rest, rest_total
        while self.levels and not self.levels[-1]:
            self.levels.pop()

    def _oldest_failing_cut(self) -> int | None:
        """Number of oldest buckets to drop, or None if every cut holds."""
        n, total = self.width, self.total
        if n < 2 * self.min_side:
            return None
        variance = self.m2 / n
        n0, s0 = 0, 0.0
        dropped = 0
        for j in range(len(self.levels) - 1, -1, -1):
            w = 1 << j
            for bucket in self.levels[j]:
                n0 += w
                s0 += bucket[0]
                dropped += 1
                n1 = n - n0
                if n1 < self.min_side:
                    return None
                if n0 < self.min_side:
                    continue
                gap = abs(s0 / n0 - (total - s0) / n1)
                if gap >= cut_threshold(n0, n1, variance, self.delta):
                    return dropped
        return None

    def update(self, value) -> Verdict:
        value = float(value)
        if not math.isfinite(value):
            raise ParameterError(f"ADWIN input must be finite, got {value}")
        self._insert(value)
        verdict = Verdict.NONE
        while (k := self._oldest_failing_cut()) is not None:
            for _ in range(k):
                self._drop_oldest()
            verdict = Verdict.DRIFT
        if verdict is Verdict.DRIFT:
            self.n_detections += 1
        return verdict

