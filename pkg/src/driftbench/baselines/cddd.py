from __future__ import annotations

import numpy as np

from driftbench.core import ParameterError, Verdict


class CentroidDistanceDetector:
    """Unsupervised centroid-distance detector.

    ``d_k`` is the Euclidean distance between the feature centroids of chunk
    ``k`` and chunk ``k - 1``. Drift when ``d_k > (1 + sensitivity) * mean``
    of the distances collected since the last reset, once at least
    ``warmup`` of them exist. Only feature matrices are ever read.
    """

    def __init__(self, sensitivity: float = 0.2, warmup: int = 3):
        if sensitivity < 0:
            raise ParameterError("sensitivity must be >= 0")
        self.sensitivity = sensitivity
        self.warmup = warmup
        self.previous: np.ndarray | None = None
        self.distances: list[float] = []
        self.detections: list[int] = []
        self._seen = 0

    def update(self, features: np.ndarray, index: int | None = None) -> Verdict:
        features = np.asarray(features, dtype=np.float64)
        if features.shape[0] == 0:
            raise ParameterError("empty chunk")
        index = self._seen if index is None else index
        self._seen += 1
        centroid = features.mean(axis=0)
        previous, self.previous = self.previous, centroid
        if previous is None:
            return Verdict.NONE
        d = float(np.linalg.norm(centroid - previous))
        if len(self.distances) >= self.warmup and d > (1.0 + self.sensitivity) * np.mean(self.distances):
            self.distances = []
            self.detections.append(index)
            return Verdict.DRIFT
        self.distances.append(d)
        return Verdict.NONE

    def process_chunk(self, chunk) -> Verdict:
        return self.update(chunk.features, chunk.index)


def cddd_sensitivity(n_drifts: int) -> float:
    """0.2 for sparse drift (up to 5 per stream), 0.9 for dense."""
    return 0.2 if n_drifts <= 5 else 0.9
