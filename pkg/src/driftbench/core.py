"""Seeded random number generation and the value types shared by every module.

The generator is SplitMix64: a 64-bit Weyl counter pushed through a fixed
bit-mixing permutation. Because output ``i`` depends only on ``state + i * GAMMA``
it can be produced in vectorized blocks, and the stream is identical on every
platform.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_TWO_POW_M53 = 2.0 ** -53


class ParameterError(ValueError):
    """An argument lies outside the operation's domain."""


class ShapeError(ValueError):
    """Array dimensions do not match."""


class Verdict(str, enum.Enum):
    NONE = "none"
    WARNING = "warning"
    DRIFT = "drift"


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def _fnv1a64(text: str) -> int:
    h = _FNV_OFFSET
    for byte in text.encode("utf-8"):
        h = ((h ^ byte) * _FNV_PRIME) & MASK64
    return h


def derive(seed: int, tag: str, index: int = 0) -> int:
    """Derive an independent 64-bit seed from ``(seed, tag, index)``.

    The tag is hashed with FNV-1a and every component is folded in through
    the SplitMix64 finalizer, so sibling seeds are unrelated bit patterns.
    """
    h = mix64(seed & MASK64)
    h = mix64(h ^ _fnv1a64(tag))
    return mix64((h + (index & MASK64) * GAMMA) & MASK64)


class Rng:
    """SplitMix64 generator with a 64-bit state.

    All sampling helpers consume raw outputs in a fixed order, so replaying a
    seed replays every downstream value.
    """

    algorithm_id = "splitmix64"

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    @classmethod
    def derived(cls, seed: int, tag: str, index: int = 0) -> "Rng":
        return cls(derive(seed, tag, index))

    def raw(self, n: int) -> np.ndarray:
        """Next ``n`` raw 64-bit outputs."""
        if n < 0:
            raise ParameterError(f"n must be >= 0, got {n}")
        steps = np.arange(1, n + 1, dtype=np.uint64) * np.uint64(GAMMA)
        counters = np.uint64(self.state) + steps
        self.state = (self.state + n * GAMMA) & MASK64
        return _mix64_array(counters)

    def uniform(self, n: int) -> np.ndarray:
        """``n`` doubles in [0, 1) built from the top 53 bits of each output."""
        return (self.raw(n) >> np.uint64(11)).astype(np.float64) * _TWO_POW_M53

    def integers(self, high: int, n: int) -> np.ndarray:
        """``n`` integers uniform on ``[0, high)`` (multiply-floor mapping)."""
        if high < 1:
            raise ParameterError(f"high must be >= 1, got {high}")
        idx = np.floor(self.uniform(n) * high).astype(np.int64)
        return np.minimum(idx, high - 1)

    def normal(self, mean: float = 0.0, std: float = 1.0, n: int = 1) -> np.ndarray:
        return rng_normal(self, mean, std, n)


def rng_normal(rng: Rng, mean: float, std: float, n: int) -> np.ndarray:
    """Draw ``n`` values from N(mean, std**2) with the Box-Muller transform.

    Uniforms are consumed in pairs ``(u1, u2)``; each pair yields
    ``r*cos(2*pi*u2)`` then ``r*sin(2*pi*u2)`` with ``r = sqrt(-2 ln(1 - u1))``.
    For odd ``n`` the final sine output is discarded.
    """
    if std < 0 or not math.isfinite(std):
        raise ParameterError(f"std must be finite and >= 0, got {std}")
    if n < 0:
        raise ParameterError(f"n must be >= 0, got {n}")
    pairs = (n + 1) // 2
    u = rng.uniform(2 * pairs)
    radius = np.sqrt(-2.0 * np.log1p(-u[0::2]))
    angle = 2.0 * np.pi * u[1::2]
    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return mean + std * z[:n]


def sample_with_replacement(rng: Rng, values, s: int) -> np.ndarray:
    """Draw ``s`` elements of ``values`` independently and uniformly."""
    values = np.asarray(values)
    if values.size == 0:
        raise ParameterError("cannot sample from an empty pool")
    if s < 1:
        raise ParameterError(f"sample size must be >= 1, got {s}")
    return values[rng.integers(len(values), s)]


@dataclass(frozen=True)
class Chunk:
    """One batch of the stream."""

    index: int
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if self.features.ndim != 2:
            raise ShapeError(f"features must be 2-D, got shape {self.features.shape}")
        if self.features.shape[0] != len(self.labels):
            raise ShapeError(
                f"{self.features.shape[0]} feature rows but {len(self.labels)} labels"
            )

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]
