"""Reference detectors: DDM, EDDM and ADWIN on classifier errors, CDDD on centroids."""
from driftbench.baselines.adwin import ADWIN
from driftbench.baselines.cddd import CentroidDistanceDetector, cddd_sensitivity
from driftbench.baselines.ddm import DDM, EDDM
from driftbench.baselines.gnb import IncrementalGaussianNB, NotFittedError
from driftbench.baselines.protocol import supervised_protocol

__all__ = [
    "ADWIN",
    "CentroidDistanceDetector",
    "DDM",
    "EDDM",
    "IncrementalGaussianNB",
    "NotFittedError",
    "cddd_sensitivity",
    "supervised_protocol",
]
