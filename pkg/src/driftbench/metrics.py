"""Drift-detection error measures and rank statistics for comparing detectors.

All three measures are ``None`` when a detector reported nothing: distances
to an empty set are unbounded, and such runs are excluded from comparisons
rather than scored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from driftbench.core import ParameterError
from driftbench.stats import midranks

# Studentized range statistic / sqrt(2) at alpha = 0.05, for k = 2..10 methods
NEMENYI_Q05 = {
    2: 1.960, 3: 2.343, 4: 2.569, 5: 2.728, 6: 2.850,
    7: 2.949, 8: 3.031, 9: 3.102, 10: 3.164,
}


@dataclass(frozen=True)
class EvaluationResult:
    d1: float | None
    d2: float | None
    r_err: float | None
    n_drifts: int
    n_detections: int


def _prepare(detections, drifts) -> tuple[np.ndarray, np.ndarray]:
    drifts = np.sort(np.asarray(drifts, dtype=np.float64).ravel())
    if drifts.size == 0:
        raise ParameterError("drift error measures need at least one true drift")
    return np.sort(np.asarray(detections, dtype=np.float64).ravel()), drifts


def _nearest_distances(points: np.ndarray, targets: np.ndarray) -> np.ndarray:
    """Distance from each point to the closest element of sorted ``targets``."""
    pos = np.searchsorted(targets, points)
    left = targets[np.clip(pos - 1, 0, len(targets) - 1)]
    right = targets[np.clip(pos, 0, len(targets) - 1)]
    return np.minimum(np.abs(points - left), np.abs(points - right))


def d1(detections, drifts) -> float | None:
    """Mean distance from each detection to its nearest drift."""
    det, dr = _prepare(detections, drifts)
    if det.size == 0:
        return None
    return float(_nearest_distances(det, dr).mean())


def d2(detections, drifts) -> float | None:
    """Mean distance from each drift to its nearest detection."""
    det, dr = _prepare(detections, drifts)
    if det.size == 0:
        return None
    return float(_nearest_distances(dr, det).mean())


def ratio_error(detections, drifts) -> float | None:
    """``|1 - n_drifts / n_detections|``: 0 at parity, below 1 when over-detecting,
    above 1 when under-detecting."""
    det, dr = _prepare(detections, drifts)
    if det.size == 0:
        return None
    return abs(1.0 - dr.size / det.size)


def evaluate(detections: Sequence[int], drifts: Sequence[int]) -> EvaluationResult:
    return EvaluationResult(
        d1=d1(detections, drifts),
        d2=d2(detections, drifts),
        r_err=ratio_error(detections, drifts),
        n_drifts=len(drifts),
        n_detections=len(detections),
    )


class ExclusionRequired(ParameterError):
    """A method has undefined cells and must be excluded before ranking."""

    def __init__(self, methods: list[str]):
        self.methods = methods
        super().__init__(f"undefined error values for: {', '.join(methods)}")


def mean_ranks(error_table, methods: Sequence[str] | None = None) -> np.ndarray:
    """Average rank of each method (rows) over configurations (columns).

    Rank 1 is the lowest error in a column; ties share the midrank. Cells may
    be ``None`` or NaN only if the caller excludes those methods first.
    """
    table = np.array(
        [[np.nan if v is None else v for v in row] for row in error_table], dtype=np.float64
    )
    if table.ndim != 2 or table.shape[0] == 0:
        raise ParameterError("error table must be a non-empty methods x configs matrix")
    names = list(methods) if methods is not None else [str(i) for i in range(table.shape[0])]
    bad = [names[i] for i in np.flatnonzero(np.isnan(table).any(axis=1))]
    if bad:
        raise ExclusionRequired(bad)
    ranks = np.column_stack([midranks(table[:, j]) for j in range(table.shape[1])])
    return ranks.mean(axis=1)


def nemenyi_cd(k_methods: int, n_datasets: int, alpha: float = 0.05) -> float:
    """Nemenyi critical difference ``q_alpha(k) * sqrt(k (k + 1) / (6 N))``."""
    if alpha != 0.05:
        raise ParameterError("only alpha = 0.05 critical values are tabulated")
    if k_methods not in NEMENYI_Q05:
        raise ParameterError(f"k_methods must be in 2..10, got {k_methods}")
    if n_datasets < 1:
        raise ParameterError("n_datasets must be >= 1")
    k = k_methods
    return NEMENYI_Q05[k] * math.sqrt(k * (k + 1) / (6.0 * n_datasets))


def minmax_normalize(matrix) -> np.ndarray:
    """Scale defined cells to [0, 1]; NaN cells stay NaN, a constant matrix maps to 0."""
    m = np.asarray(matrix, dtype=np.float64)
    if np.all(np.isnan(m)):
        return m.copy()
    lo, hi = np.nanmin(m), np.nanmax(m)
    if hi == lo:
        return np.where(np.isnan(m), np.nan, 0.0)
    return (m - lo) / (hi - lo)
