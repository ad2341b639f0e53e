import json
import math

import numpy as np
import pytest

from driftbench.core import ParameterError
from driftbench.stream_gen import (
    GRADUAL,
    SUDDEN,
    StreamSpec,
    build_schedule,
    concept_mix_probability,
    dump_stream,
    generate_stream,
    stream_grid,
)


def test_schedule_ten_drifts():
    sched = build_schedule(StreamSpec(n_drifts=10))
    assert list(sched.centers) == [12, 37, 62, 87, 112, 137, 162, 187, 212, 237]


def test_schedule_three_drifts():
    assert list(build_schedule(StreamSpec(n_drifts=3)).centers) == [41, 125, 208]


def test_schedule_no_drift():
    spec = StreamSpec(n_drifts=0)
    assert build_schedule(spec).centers == ()
    chunks = generate_stream(spec).chunks()
    assert len(chunks) == 250


def test_schedule_does_not_fit():
    with pytest.raises(ParameterError):
        build_schedule(StreamSpec(n_drifts=10, n_chunks=5))


@pytest.mark.parametrize("d", [1, 3, 5, 10, 15, 40])
def test_schedule_strictly_increasing(d):
    c = build_schedule(StreamSpec(n_drifts=d)).centers
    assert len(c) == d
    assert all(b > a for a, b in zip(c, c[1:]))
    assert 0 <= c[0] and c[-1] < 250


def test_mix_at_center_is_half():
    for dyn in (SUDDEN, GRADUAL):
        sched = build_schedule(StreamSpec(n_drifts=10, dynamics=dyn))
        assert concept_mix_probability(12, 0, sched) == 0.5


def test_sudden_mix_is_a_step():
    sched = build_schedule(StreamSpec(n_drifts=10, dynamics=SUDDEN))
    assert concept_mix_probability(13, 0, sched) > 0.999999
    assert concept_mix_probability(11, 0, sched) < 1e-6


def test_gradual_mix_value():
    sched = build_schedule(StreamSpec(n_drifts=10, dynamics=GRADUAL))
    expected = 1.0 / (1.0 + math.exp(-2.4))
    assert concept_mix_probability(18, 0, sched) == pytest.approx(expected, abs=1e-12)
    assert concept_mix_probability(18, 0, sched) == pytest.approx(0.9168, abs=1e-4)


def test_mix_monotone_in_k():
    sched = build_schedule(StreamSpec(n_drifts=5, dynamics=GRADUAL))
    probs = [concept_mix_probability(k, 2, sched) for k in range(0, 250)]
    assert all(b >= a for a, b in zip(probs, probs[1:]))


def test_chunk_shapes_and_informative_columns():
    spec = StreamSpec(n_features=30, n_drifts=3, seed=4)
    assert spec.n_informative == 9
    stream = generate_stream(spec)
    assert stream.concepts.means.shape == (4, 2, 9)
    first = next(iter(stream))
    assert first.features.shape == (200, 30)
    assert set(np.unique(first.labels)) <= {0, 1}


@pytest.mark.parametrize("f,expected", [(30, 9), (60, 18), (90, 27), (1, 1), (7, 3)])
def test_informative_count(f, expected):
    assert StreamSpec(n_features=f).n_informative == expected


def test_stream_reproducible():
    spec = StreamSpec(n_drifts=3, seed=99, n_chunks=20)
    a = generate_stream(spec).chunks()
    b = generate_stream(spec).chunks()
    for x, y in zip(a, b):
        assert np.array_equal(x.features, y.features)
        assert np.array_equal(x.labels, y.labels)


def test_different_seeds_differ():
    a = next(iter(generate_stream(StreamSpec(seed=1, n_drifts=1, n_chunks=2))))
    b = next(iter(generate_stream(StreamSpec(seed=2, n_drifts=1, n_chunks=2))))
    assert not np.array_equal(a.features, b.features)


def test_class_balance():
    chunks = generate_stream(StreamSpec(seed=5, n_drifts=3)).chunks()
    labels = np.concatenate([c.labels for c in chunks])
    assert abs(labels.mean() - 0.5) < 0.02


def test_noise_columns_are_standard_normal():
    chunks = generate_stream(StreamSpec(seed=6, n_drifts=3, n_chunks=40)).chunks()
    noise = np.concatenate([c.features[:, 9:] for c in chunks])
    assert abs(noise.mean()) < 0.02
    assert abs(noise.std() - 1.0) < 0.02


def test_class_means_follow_concepts():
    spec = StreamSpec(seed=8, n_drifts=3, dynamics=SUDDEN)
    stream = generate_stream(spec)
    chunks = stream.chunks()
    # chunks 0..40 belong to concept 0 and 42..124 to concept 1
    for lo, hi, j in [(0, 41, 0), (42, 125, 1)]:
        feats = np.concatenate([c.features for c in chunks[lo:hi]])
        labs = np.concatenate([c.labels for c in chunks[lo:hi]])
        for y in (0, 1):
            got = feats[labs == y, :9].mean(axis=0)
            np.testing.assert_allclose(got, stream.concepts.means[j, y], atol=0.06)


def test_sudden_crossover_within_one_chunk():
    spec = StreamSpec(seed=3, n_drifts=3, dynamics=SUDDEN)
    stream = generate_stream(spec)
    chunks = stream.chunks()
    means = stream.concepts.means
    for i, t in enumerate(stream.schedule.centers):
        def dist_to(k, j):
            c = chunks[k]
            m0 = c.features[c.labels == 0, :9].mean(axis=0)
            return np.linalg.norm(m0 - means[j, 0])
        assert dist_to(t - 1, i) < dist_to(t - 1, i + 1)
        assert dist_to(t + 1, i + 1) < dist_to(t + 1, i)


def test_grid_seeds_unique():
    grid = stream_grid(n_drifts=(3, 10), n_features=(30,), replications=4)
    seeds = [spec.seed for spec, _ in grid]
    assert len(seeds) == 16 and len(set(seeds)) == 16


def test_dump_stream(tmp_path):
    spec = StreamSpec(n_features=4, n_drifts=2, n_chunks=6, chunk_size=5, seed=1)
    stream = generate_stream(spec)
    csv_path, sched_path = dump_stream(stream, tmp_path)
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1)
    assert data.shape == (30, 6)
    assert open(csv_path).readline().strip() == "f0,f1,f2,f3,label,chunk"
    first = next(iter(stream))
    np.testing.assert_array_equal(data[:5, :4], first.features)
    assert json.loads(sched_path.read_text())["centers"] == list(stream.schedule.centers)


@pytest.mark.parametrize("kwargs", [
    {"n_features": 0}, {"chunk_size": 0}, {"n_drifts": -1}, {"dynamics": "abrupt"},
    {"informative_fraction": 1.5},
])
def test_spec_validation(kwargs):
    with pytest.raises(ParameterError):
        StreamSpec(**kwargs)
