"""Two-sample Student's t-test, the regularized incomplete beta function behind
it, midranks, and the Wilcoxon signed-rank test.

Everything here is vectorized over leading axes so the detector can evaluate
all of its replicated tests in one call.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from driftbench.core import ParameterError

BETA_TOL = 1e-14
BETA_MAX_ITER = 300
_FPMIN = 1e-300

_lgamma = np.vectorize(math.lgamma, otypes=[np.float64])


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: float
    p: float


def _betacf(a: np.ndarray, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Continued fraction for I_x(a, b), modified Lentz evaluation."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
    d = 1.0 / d
    h = d.copy()
    for m in range(1, BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h *= delta
        if np.all(np.abs(delta - 1.0) < BETA_TOL):
            return h
    warnings.warn(
        f"incomplete beta continued fraction did not converge in {BETA_MAX_ITER} iterations",
        RuntimeWarning,
        stacklevel=3,
    )
    return h


def regularized_incomplete_beta(a, b, x):
    """Regularized incomplete beta function I_x(a, b).

    Evaluated by continued fraction on whichever side of the mean
    ``(a + 1) / (a + b + 2)`` converges fastest, using
    ``I_x(a, b) = 1 - I_{1-x}(b, a)`` for the other side. Accepts scalars or
    broadcastable arrays; returns a float for scalar input.
    """
    a, b, x = np.broadcast_arrays(
        np.asarray(a, dtype=np.float64),
        np.asarray(b, dtype=np.float64),
        np.asarray(x, dtype=np.float64),
    )
    scalar = a.ndim == 0
    if np.any(~(a > 0)) or np.any(~(b > 0)):
        raise ParameterError("a and b must be > 0")
    if np.any(~((x >= 0) & (x <= 1))):
        raise ParameterError("x must lie in [0, 1]")

    out = np.empty(a.shape)
    edge0 = x == 0
    edge1 = x == 1
    inner = ~(edge0 | edge1)
    out[edge0] = 0.0
    out[edge1] = 1.0
    if np.any(inner):
        ai, bi, xi = a[inner], b[inner], x[inner]
        flip = xi >= (ai + 1.0) / (ai + bi + 2.0)
        aa = np.where(flip, bi, ai)
        bb = np.where(flip, ai, bi)
        xx = np.where(flip, 1.0 - xi, xi)
        log_front = (
            _lgamma(aa + bb) - _lgamma(aa) - _lgamma(bb)
            + aa * np.log(xx) + bb * np.log1p(-xx)
        )
        val = np.exp(log_front) * _betacf(aa, bb, xx) / aa
        out[inner] = np.where(flip, 1.0 - val, val)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if scalar else out


def t_sf_two_sided(t, df):
    """Two-sided tail probability P(|T| >= |t|) for Student's t with ``df`` dof."""
    t = np.asarray(t, dtype=np.float64)
    df = np.asarray(df, dtype=np.float64)
    t2 = t * t
    with np.errstate(invalid="ignore"):
        x = np.where(np.isinf(t2), 0.0, df / (df + t2))
    return regularized_incomplete_beta(df / 2.0, 0.5, x)


def t_test_batch(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    """Pooled-variance t-tests along the last axis.

    Returns ``(t, p, df)``. Where the pooled variance is zero the statistic is
    degenerate: ``p = 1`` if the means are equal, else ``p = 0``.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = a.shape[-1], b.shape[-1]
    if na < 2 or nb < 2:
        raise ParameterError(f"each sample needs >= 2 values, got {na} and {nb}")
    df = na + nb - 2
    mean_a = a.mean(axis=-1)
    mean_b = b.mean(axis=-1)
    ss_a = ((a - mean_a[..., None]) ** 2).sum(axis=-1)
    ss_b = ((b - mean_b[..., None]) ** 2).sum(axis=-1)
    pooled = (ss_a + ss_b) / df
    diff = mean_a - mean_b
    degenerate = pooled == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        t = diff / np.sqrt(pooled * (1.0 / na + 1.0 / nb))
        t = np.where(degenerate, np.where(diff == 0, 0.0, np.sign(diff) * np.inf), t)
    p = np.asarray(t_sf_two_sided(t, df), dtype=np.float64)
    p = np.where(degenerate, np.where(diff == 0, 1.0, 0.0), p)
    return t, p, df


def t_test_independent(a, b) -> TTestResult:
    """Student's t-test for two independent samples with pooled variance."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    t, p, df = t_test_batch(a, b)
    return TTestResult(t=float(t), df=float(df), p=float(p))


def midranks(values) -> np.ndarray:
    """1-based ranks, ties sharing the average of the positions they span."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    ranks = np.empty(len(values))
    start = 0
    n = len(values)
    while start < n:
        stop = start + 1
        while stop < n and sorted_vals[stop] == sorted_vals[start]:
            stop += 1
        ranks[order[start:stop]] = 0.5 * (start + stop + 1)
        start = stop
    return ranks


EXACT_WILCOXON_MAX_N = 50


def _signed_rank_null_counts(doubled: np.ndarray) -> np.ndarray:
    """Number of sign assignments giving each positive sum of ``doubled`` ranks."""
    counts = np.zeros(int(doubled.sum()) + 1)
    counts[0] = 1.0
    for r in doubled:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: len(counts) - r]
        counts = counts + shifted
    return counts


def wilcoxon_signed_rank(x, y) -> float:
    """Two-sided Wilcoxon signed-rank p-value for paired samples.

    Zero differences are dropped and the absolute differences get midranks.
    Up to 50 nonzero pairs the p-value comes from the exact permutation law of
    the positive rank sum ``W`` (ties included, via doubled midranks). Beyond
    that ``W`` is referred to a normal law with mean ``n(n+1)/4`` and variance
    ``n(n+1)(2n+1)/24 - sum(t^3 - t)/48`` over tie groups of size ``t``, with
    a continuity correction of 0.5.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ParameterError("x and y must be 1-D of equal length")
    if len(x) < 5:
        raise ParameterError(f"need at least 5 pairs, got {len(x)}")
    diff = x - y
    diff = diff[diff != 0]
    n = len(diff)
    if n == 0:
        return 1.0
    ranks = midranks(np.abs(diff))
    if n <= EXACT_WILCOXON_MAX_N:
        doubled = np.rint(2 * ranks).astype(np.int64)
        total = int(doubled.sum())
        observed = abs(2 * int(doubled[diff > 0].sum()) - total)
        counts = _signed_rank_null_counts(doubled)
        extreme = np.abs(2 * np.arange(total + 1) - total) >= observed
        return min(1.0, float(counts[extreme].sum() / counts.sum()))
    w_plus = ranks[diff > 0].sum()
    mean = n * (n + 1) / 4.0
    _, counts = np.unique(ranks, return_counts=True)
    var = n * (n + 1) * (2 * n + 1) / 24.0 - (counts ** 3 - counts).sum() / 48.0
    if var <= 0:
        return 1.0
    z = max(abs(w_plus - mean) - 0.5, 0.0) / math.sqrt(var)
    return min(1.0, math.erfc(z / math.sqrt(2.0)))
