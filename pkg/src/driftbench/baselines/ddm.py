"""Error-rate detectors fed one classification error bit at a time."""
from __future__ import annotations

import math

from driftbench.core import Verdict


class DDM:
    """Drift Detection Method.

    Tracks the running error rate ``p`` and ``s = sqrt(p(1 - p)/i)``; keeps the
    pair minimizing ``p + s``. Warning when ``p + s > p_min + 2 s_min``, drift
    when ``p + s > p_min + threshold * s_min``. Silent for the first
    ``min_instances`` samples after every reset.
    """

    def __init__(self, threshold: float = 3.0, warning: float = 2.0, min_instances: int = 30):
        self.threshold = threshold
        self.warning = warning
        self.min_instances = min_instances
        self.reset()

    def reset(self):
        self.i = 0
        self.p = 1.0
        self.s = 0.0
        self.p_min = math.inf
        self.s_min = math.inf
        self.ps_min = math.inf

    def update(self, error) -> Verdict:
        self.i += 1
        self.p += (float(error) - self.p) / self.i
        self.s = math.sqrt(self.p * (1.0 - self.p) / self.i)
        if self.i < self.min_instances:
            return Verdict.NONE
        level = self.p + self.s
        if level <= self.ps_min:
            self.p_min, self.s_min, self.ps_min = self.p, self.s, level
        if level > self.p_min + self.threshold * self.s_min:
            self.reset()
            return Verdict.DRIFT
        if level > self.p_min + self.warning * self.s_min:
            return Verdict.WARNING
        return Verdict.NONE


class EDDM:
    """Early Drift Detection Method.

    Monitors the distance (in samples) between consecutive errors. With
    ``m`` the running mean and ``sd`` the running std of those distances,
    the peak of ``m + 2 sd`` is tracked; drift fires when the ratio
    ``(m + 2 sd) / peak`` falls below ``beta`` after at least
    ``min_errors`` errors.
    """

    def __init__(self, beta: float = 0.9, warning: float = 0.95,
                 min_errors: int = 30, min_instances: int = 30):
        self.beta = beta
        self.warning = warning
        self.min_errors = min_errors
        self.min_instances = min_instances
        self.reset()

    def reset(self):
        self.n = 0
        self.n_errors = 0
        self.last_error = 0
        self.mean = 0.0
        self.m2 = 0.0
        self.peak = 0.0

    def update(self, error) -> Verdict:
        self.n += 1
        if not error:
            return Verdict.NONE
        self.n_errors += 1
        distance = self.n - self.last_error
        self.last_error = self.n
        old_mean = self.mean
        self.mean += (distance - self.mean) / self.n_errors
        self.m2 += (distance - self.mean) * (distance - old_mean)
        level = self.mean + 2.0 * math.sqrt(self.m2 / self.n_errors)
        if self.n < self.min_instances:
            return Verdict.NONE
        if level > self.peak:
            self.peak = level
            return Verdict.NONE
        if self.n_errors < self.min_errors:
            return Verdict.NONE
        ratio = level / self.peak
        if ratio < self.beta:
            self.reset()
            return Verdict.DRIFT
        if ratio < self.warning:
            return Verdict.WARNING
        return Verdict.NONE
