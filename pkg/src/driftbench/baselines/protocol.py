"""Test-then-train loop feeding classifier error bits to a supervised detector."""
from __future__ import annotations

from typing import Iterable

import numpy as np

from driftbench.baselines.adwin import ADWIN
from driftbench.baselines.ddm import DDM, EDDM
from driftbench.baselines.gnb import IncrementalGaussianNB
from driftbench.core import Chunk, ParameterError, Verdict

SUPERVISED = {"ddm": DDM, "eddm": EDDM, "adwin": ADWIN}


def make_supervised(name: str, **params):
    try:
        return SUPERVISED[name](**params)
    except KeyError:
        raise ParameterError(f"unknown supervised detector {name!r}") from None


def sample_to_chunk(sample_index: int, chunk_size: int) -> int:
    return sample_index // chunk_size


def supervised_protocol(stream: Iterable[Chunk], detector, reset_classifier: bool = True,
                        classifier_factory=IncrementalGaussianNB) -> list[int]:
    """Run ``detector`` on the error bits of an incrementally trained classifier.

    Chunk 0 only trains. For every later chunk the current model predicts,
    the per-sample error bits go to the detector in order, then the model is
    updated on that chunk. A detector firing at global sample ``m`` is
    attributed to chunk ``m // chunk_size``; each chunk is reported at most
    once. After a drift the classifier is rebuilt from the current chunk
    when ``reset_classifier`` is set.
    """
    if isinstance(detector, str):
        detector = make_supervised(detector)
    clf = classifier_factory()
    detections: list[int] = []
    offset = 0
    for chunk in stream:
        chunk_size = chunk.n_samples
        if clf.fitted:
            errors = (clf.predict(chunk.features) != chunk.labels).astype(np.int64)
            fired = False
            for j, err in enumerate(errors):
                if detector.update(err) is Verdict.DRIFT:
                    fired = True
                    k = sample_to_chunk(offset + j, chunk_size)
                    if not detections or detections[-1] != k:
                        detections.append(k)
            if fired and reset_classifier:
                clf = classifier_factory()
        clf.partial_fit(chunk.features, chunk.labels)
        offset += chunk_size
    return detections
