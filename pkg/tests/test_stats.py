import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from driftbench.core import ParameterError, Rng
from driftbench.stats import (
    midranks,
    regularized_incomplete_beta,
    t_sf_two_sided,
    t_test_batch,
    t_test_independent,
    wilcoxon_signed_rank,
)
from oracles import t_two_sided_quad, wilcoxon_exact


def test_beta_boundaries():
    assert regularized_incomplete_beta(2.5, 0.5, 0.0) == 0.0
    assert regularized_incomplete_beta(2.5, 0.5, 1.0) == 1.0


@pytest.mark.parametrize("x", [0.25, 0.5, 0.9])
def test_beta_uniform_identity(x):
    assert regularized_incomplete_beta(1, 1, x) == pytest.approx(x, abs=1e-14)


def test_beta_symmetric_half():
    assert regularized_incomplete_beta(0.5, 0.5, 0.5) == pytest.approx(0.5, abs=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 50), st.floats(0.1, 50), st.floats(0.001, 0.999))
def test_beta_reflection(a, b, x):
    lhs = regularized_incomplete_beta(a, b, x)
    rhs = 1.0 - regularized_incomplete_beta(b, a, 1.0 - x)
    assert lhs == pytest.approx(rhs, abs=1e-12)


@pytest.mark.parametrize("args", [(0, 1, 0.5), (1, -1, 0.5), (1, 1, 1.5), (1, 1, -0.1)])
def test_beta_domain(args):
    with pytest.raises(ParameterError):
        regularized_incomplete_beta(*args)


def test_t_identical_samples():
    res = t_test_independent([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert res.t == 0.0 and res.p == 1.0 and res.df == 4


def test_t_zero_variance_rule():
    assert t_test_independent([0, 0, 0, 0], [1, 1, 1, 1]).p == 0.0
    assert t_test_independent([2, 2, 2], [2, 2, 2]).p == 1.0


def test_t_too_small():
    with pytest.raises(ParameterError):
        t_test_independent([1.0], [1.0, 2.0])


@pytest.mark.parametrize("seed", range(6))
def test_t_pvalue_matches_quadrature(seed):
    rng = Rng(seed)
    a, b = rng.normal(0, 1, 50), rng.normal(0, 1, 50)
    res = t_test_independent(a, b)
    assert abs(res.p - t_two_sided_quad(res.t, 98)) <= 1e-10


def test_t_known_value():
    # pooled t = -1.5 / sqrt(1.25 * (1/4 + 1/4)) for these two samples
    res = t_test_independent([1.0, 2.0, 3.0, 4.0], [2.0, 3.0, 4.0, 7.0])
    assert res.t == pytest.approx(-1.5 / np.sqrt((5 / 3 + 14 / 3) / 2 * 0.5), rel=1e-12)
    assert res.p == pytest.approx(t_two_sided_quad(res.t, 6), abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(
    arrays(np.float64, st.integers(2, 30), elements=st.floats(-100, 100)),
    arrays(np.float64, st.integers(2, 30), elements=st.floats(-100, 100)),
)
def test_t_antisymmetry(a, b):
    ab, ba = t_test_independent(a, b), t_test_independent(b, a)
    assert ab.t == -ba.t or (np.isnan(ab.t) and np.isnan(ba.t))
    assert ab.p == ba.p
    assert 0.0 <= ab.p <= 1.0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.floats(0.01, 100), st.floats(-50, 50))
def test_t_affine_invariance(seed, c, d):
    rng = Rng(seed)
    a, b = rng.normal(0, 1, 20), rng.normal(0.3, 1, 25)
    base = t_test_independent(a, b)
    moved = t_test_independent(c * a + d, c * b + d)
    assert moved.t == pytest.approx(base.t, abs=1e-9, rel=1e-9)
    # shifting by d loses a few digits when c is small
    assert moved.p == pytest.approx(base.p, abs=1e-9)


def test_t_batch_matches_scalar():
    rng = Rng(3)
    a = rng.normal(0, 1, 144 * 50).reshape(12, 12, 50)
    b = rng.normal(0.2, 1, 144 * 50).reshape(12, 12, 50)
    t, p, df = t_test_batch(a, b)
    assert df == 98
    for i, j in [(0, 0), (3, 7), (11, 11)]:
        res = t_test_independent(a[i, j], b[i, j])
        assert t[i, j] == pytest.approx(res.t, rel=1e-14)
        assert p[i, j] == pytest.approx(res.p, rel=1e-14)


def test_t_sf_extremes():
    assert t_sf_two_sided(np.inf, 10) == 0.0
    assert t_sf_two_sided(0.0, 10) == 1.0


def test_midranks_ties():
    assert midranks([3.0, 1.0, 3.0, 2.0]).tolist() == [3.5, 1.0, 3.5, 2.0]


def test_wilcoxon_identical():
    x = np.arange(10.0)
    assert wilcoxon_signed_rank(x, x) == 1.0


def test_wilcoxon_shift():
    rng = Rng(2)
    y = rng.normal(0, 0.1, 20)
    assert wilcoxon_signed_rank(y + 10.0, y) < 0.001


def test_wilcoxon_needs_five():
    with pytest.raises(ParameterError):
        wilcoxon_signed_rank([1, 2, 3, 4], [0, 0, 0, 0])


@pytest.mark.parametrize("seed", range(3))
def test_wilcoxon_exact_n24(seed):
    rng = Rng(100 + seed)
    x = rng.normal(0, 1, 24)
    y = x + rng.normal(0.25, 1, 24)
    assert abs(wilcoxon_signed_rank(x, y) - wilcoxon_exact(x, y)) <= 0.01


def test_wilcoxon_exact_with_ties():
    x = np.array([1, 2, 2, 3, 5, 5, 5, 8, 9, 10, 4, 6], float)
    y = np.array([0, 1, 3, 1, 2, 4, 6, 5, 9, 7, 1, 2], float)
    assert abs(wilcoxon_signed_rank(x, y) - wilcoxon_exact(x, y)) <= 0.02


@pytest.mark.parametrize("n", [5, 8, 13])
def test_wilcoxon_small_n_exact(n):
    rng = Rng(200 + n)
    x, y = rng.normal(0, 1, n), rng.normal(0.4, 1, n)
    assert wilcoxon_signed_rank(x, y) == pytest.approx(wilcoxon_exact(x, y), abs=1e-12)


def test_wilcoxon_large_n_normal_close_to_scipy():
    from scipy import stats
    rng = Rng(7)
    x, y = rng.normal(0, 1, 80), rng.normal(0.2, 1, 80)
    ref = stats.wilcoxon(x, y, correction=True, method="approx").pvalue
    assert wilcoxon_signed_rank(x, y) == pytest.approx(ref, rel=1e-9)
