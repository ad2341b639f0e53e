import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from driftbench.core import ParameterError, Rng
from driftbench.metrics import (
    ExclusionRequired,
    d1,
    d2,
    evaluate,
    mean_ranks,
    minmax_normalize,
    nemenyi_cd,
    ratio_error,
)
from oracles import brute_d1, brute_d2, brute_ranks


def test_worked_examples():
    assert d1([100], [100]) == 0.0
    assert d1([60], [50, 150]) == 10.0
    assert d2([60], [50, 150]) == 50.0
    assert d2([50, 150], [50, 150]) == 0.0


def test_empty_detections_undefined():
    res = evaluate([], [50])
    assert res.d1 is None and res.d2 is None and res.r_err is None
    assert res.n_detections == 0 and res.n_drifts == 1


def test_empty_drifts_rejected():
    for fn in (d1, d2, ratio_error):
        with pytest.raises(ParameterError):
            fn([3], [])


def test_hypersensitive_d2_is_zero():
    assert d2(list(range(250)), [50]) == 0.0


def test_ratio_anchors():
    drifts = list(range(0, 250, 25))
    assert ratio_error(drifts, drifts) == 0.0
    assert ratio_error(list(range(1000)), drifts) == 0.99
    assert ratio_error([3, 9], drifts) == 4.0


def test_ratio_ignores_positions():
    assert ratio_error([1, 2, 3], [100, 200]) == ratio_error([90, 180, 240], [0, 7])


def test_fuzz_against_brute_force():
    for seed in range(1000):
        rng = Rng(seed)
        n_det = int(rng.integers(30, 1)[0])
        n_dr = int(rng.integers(15, 1)[0]) + 1
        dets = sorted(int(v) for v in rng.integers(250, n_det))
        drifts = sorted(int(v) for v in rng.integers(250, n_dr))
        assert d1(dets, drifts) == brute_d1(dets, drifts), seed
        assert d2(dets, drifts) == brute_d2(dets, drifts), seed
        expected_r = abs(1 - n_dr / n_det) if n_det else None
        assert ratio_error(dets, drifts) == expected_r, seed


index_lists = st.lists(st.integers(0, 249), max_size=20)


@settings(max_examples=100, deadline=None)
@given(index_lists, st.lists(st.integers(0, 249), min_size=1, max_size=10), st.randoms(use_true_random=False),
       st.integers(-100, 100))
def test_permutation_and_translation(dets, drifts, rnd, shift):
    base = evaluate(dets, drifts)
    pd, pr = dets[:], drifts[:]
    rnd.shuffle(pd)
    rnd.shuffle(pr)
    assert evaluate(pd, pr) == base
    moved = evaluate([d + shift for d in dets], [d + shift for d in drifts])
    assert moved == base


def test_exact_hit_all_zero():
    res = evaluate([12, 37, 62], [12, 37, 62])
    assert (res.d1, res.d2, res.r_err) == (0.0, 0.0, 0.0)


def test_dominant_method_rank_one():
    table = [[0.1, 0.2, 0.3], [1.0, 2.0, 3.0], [5, 5, 5]]
    assert mean_ranks(table).tolist() == [1.0, 2.0, 3.0]


def test_identical_methods_tie():
    ranks = mean_ranks([[1.0, 2.0], [1.0, 2.0]])
    assert ranks.tolist() == [1.5, 1.5]


@pytest.mark.parametrize("seed", range(5))
def test_ranks_match_brute_force(seed):
    rng = Rng(seed)
    # rounding forces ties
    table = np.round(rng.uniform(5 * 24).reshape(5, 24), 1)
    expected = np.mean([brute_ranks(table[:, j]) for j in range(24)], axis=0)
    assert mean_ranks(table).tolist() == expected.tolist()


def test_ranks_require_exclusion():
    with pytest.raises(ExclusionRequired) as info:
        mean_ranks([[1.0, None], [2.0, 3.0]], ["cddd", "padd"])
    assert info.value.methods == ["cddd"]


def test_cd_values():
    assert nemenyi_cd(2, 9) == pytest.approx(1.960 / 3)
    assert nemenyi_cd(6, 24) == pytest.approx(2.850 * math.sqrt(42 / 144))
    # exact product is 1.5392; 1.541 is a loose rounding of it
    assert nemenyi_cd(6, 24) == pytest.approx(1.541, abs=3e-3)


def test_cd_decreasing_in_n():
    values = [nemenyi_cd(4, n) for n in range(1, 50)]
    assert all(b < a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("k", [1, 11])
def test_cd_out_of_table(k):
    with pytest.raises(ParameterError):
        nemenyi_cd(k, 10)


def test_minmax_normalize():
    m = np.array([[1.0, np.nan], [3.0, 5.0]])
    out = minmax_normalize(m)
    assert np.nanmin(out) == 0.0 and np.nanmax(out) == 1.0
    assert np.isnan(out[0, 1])
    assert out[1, 0] == 0.5
    assert minmax_normalize(np.ones((2, 2))).tolist() == [[0.0, 0.0], [0.0, 0.0]]
