"""Frozen random-weight MLP whose output activations the detector monitors."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from driftbench.core import Chunk, ParameterError, Rng, ShapeError

WEIGHT_STD = 0.1


@dataclass(frozen=True)
class RandomMLP:
    """One ReLU hidden layer and a linear output layer. Never trained."""

    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    @property
    def n_features(self) -> int:
        return self.W1.shape[0]

    @property
    def n_hidden(self) -> int:
        return self.W1.shape[1]

    @property
    def e(self) -> int:
        return self.W2.shape[1]

    @property
    def n_parameters(self) -> int:
        return self.W1.size + self.b1.size + self.W2.size + self.b2.size

    def hidden(self, X: np.ndarray) -> np.ndarray:
        return np.maximum(X @ self.W1 + self.b1, 0.0)

    def __call__(self, X) -> np.ndarray:
        return forward(self, X)

    def to_json(self) -> str:
        doc = {
            "shape": {"n_features": self.n_features, "n_hidden": self.n_hidden, "e": self.e},
            "W1": self.W1.ravel().tolist(),
            "b1": self.b1.tolist(),
            "W2": self.W2.ravel().tolist(),
            "b2": self.b2.tolist(),
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "RandomMLP":
        doc = json.loads(text)
        f, h, e = (doc["shape"][k] for k in ("n_features", "n_hidden", "e"))
        return cls(
            W1=np.asarray(doc["W1"], dtype=np.float64).reshape(f, h),
            b1=np.asarray(doc["b1"], dtype=np.float64),
            W2=np.asarray(doc["W2"], dtype=np.float64).reshape(h, e),
            b2=np.asarray(doc["b2"], dtype=np.float64),
        )


def init_network(
    n_features: int,
    n_hidden: int = 10,
    e: int = 12,
    rng: Rng | None = None,
    *,
    std: float = WEIGHT_STD,
    bias: bool = True,
) -> RandomMLP:
    """Draw all parameters from N(0, std**2).

    Draw order: W1 (row-major), b1, W2 (row-major), b2. With ``bias=False``
    both bias vectors are zero and consume no draws.
    """
    if min(n_features, n_hidden, e) < 1:
        raise ParameterError(
            f"network dimensions must be >= 1, got ({n_features}, {n_hidden}, {e})"
        )
    if rng is None:
        raise ParameterError("init_network needs an explicit Rng")
    W1 = rng.normal(0.0, std, n_features * n_hidden).reshape(n_features, n_hidden)
    b1 = rng.normal(0.0, std, n_hidden) if bias else np.zeros(n_hidden)
    W2 = rng.normal(0.0, std, n_hidden * e).reshape(n_hidden, e)
    b2 = rng.normal(0.0, std, e) if bias else np.zeros(e)
    return RandomMLP(W1=W1, b1=b1, W2=W2, b2=b2)


def forward(net: RandomMLP, chunk) -> np.ndarray:
    """Output activations ``relu(X @ W1 + b1) @ W2 + b2``, one row per sample."""
    X = chunk.features if isinstance(chunk, Chunk) else np.asarray(chunk, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != net.n_features:
        raise ShapeError(f"expected (n, {net.n_features}) input, got {X.shape}")
    return net.hidden(X) @ net.W2 + net.b2
