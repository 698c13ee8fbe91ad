import numpy as np
import pytest

from mpoxnet.errors import ConfigurationError
from mpoxnet.rng import (RngStream, draw_categorical, draw_count_geometric, draw_duration_geometric,
                         draw_stage_days)


def test_stream_is_reproducible():
    a = RngStream(3, 5).network.random(4)
    b = RngStream(3, 5).network.random(4)
    assert np.array_equal(a, b)


def test_streams_and_children_differ():
    base = RngStream(3, 5).network.random(4)
    assert not np.array_equal(base, RngStream(3, 6).network.random(4))
    assert not np.array_equal(base, RngStream(4, 5).network.random(4))
    assert not np.array_equal(base, RngStream(3, 5).disease.random(4))


def test_categorical_frequencies(rng):
    w = (0.471, 0.167, 0.074, 0.22, 0.047, 0.021)
    x = draw_categorical(w, rng, size=200_000)
    freq = np.bincount(x, minlength=6) / x.size
    assert np.allclose(freq, w, atol=0.004)


def test_categorical_degenerate(rng):
    assert np.all(draw_categorical([0, 0, 1], rng, size=50) == 2)


@pytest.mark.parametrize("w", [[0.5, 0.4], [-0.1, 1.1], [0.5, 0.6]])
def test_categorical_rejects_bad_weights(w, rng):
    with pytest.raises(ConfigurationError):
        draw_categorical(w, rng)


def test_count_geometric_zero_probability(rng):
    assert np.all(draw_count_geometric(0.0, rng, size=1000) == 0)


@pytest.mark.parametrize("p", [0.0315, 0.286])
def test_count_geometric_mean(p, rng):
    x = draw_count_geometric(p, rng, size=400_000)
    assert x.min() == 0
    assert abs(x.mean() - p / (1 - p)) < 0.01


def test_count_geometric_rejects_one(rng):
    with pytest.raises(ConfigurationError):
        draw_count_geometric(1.0, rng)


@pytest.mark.parametrize("mean", [407, 166])
def test_duration_geometric_mean(mean, rng):
    x = draw_duration_geometric(mean, rng, size=200_000)
    assert x.min() >= 1
    assert abs(x.mean() - mean) / mean < 0.01


def test_duration_rejects_short_mean(rng):
    with pytest.raises(ConfigurationError):
        draw_duration_geometric(0.5, rng)


def test_stage_days_floor_and_mean(rng):
    x = draw_stage_days(27, 3, rng, size=100_000)
    assert x.dtype.kind == "i"
    assert abs(x.mean() - 27) < 0.05
    assert draw_stage_days(0.2, 0.01, rng, size=100).min() == 1
