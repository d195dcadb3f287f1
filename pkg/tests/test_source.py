import math

import numpy as np
import pytest

from antibunch.errors import InvalidParameter
from antibunch.seeding import stage_rng
from antibunch.source import (SourceParams, calibrate_pair_rate, generate_pairs, pair_blocks,
                              poisson_times)


def emissions(params, **kw):
    parts = list(generate_pairs(params, **kw))
    return np.concatenate(parts) if parts else np.empty(0)


def test_zero_rate_gives_empty_stream():
    assert emissions(SourceParams(0, 600)).size == 0


@pytest.mark.parametrize("params", [SourceParams(-1, 1), SourceParams(10, 0), SourceParams(10, -2)])
def test_invalid_params(params):
    with pytest.raises(InvalidParameter):
        emissions(params)


def test_deterministic_sorted_unique_ids():
    p = SourceParams(5e4, 2.5, seed=7)
    a, b = emissions(p), emissions(p)
    assert np.array_equal(a, b)
    assert np.all(np.diff(a["t_emit"]) >= 0)
    assert np.array_equal(a["pair_id"], np.arange(a.size))
    assert a["t_emit"][0] >= 0 and a["t_emit"][-1] < 2.5e12
    assert not np.array_equal(a, emissions(SourceParams(5e4, 2.5, seed=8)))


def test_blocks_are_independent_of_schedule():
    p = SourceParams(2e4, 3, seed=11)
    blocks = list(pair_blocks(p))
    # block 2 regenerated on its own from its derived generator
    t0, t1, em = blocks[2]
    again = poisson_times(p.pair_rate, t0, t1, stage_rng(p.seed, "pairs", 2))
    assert np.array_equal(em["t_emit"], again)


def test_paper_scale_count():
    rate, T = 47_000, 600
    n = sum(e.size for e in generate_pairs(SourceParams(rate, T, seed=1)))
    mean = rate * T
    assert abs(n - mean) < 5 * math.sqrt(mean)


def test_count_is_poisson_over_seeds():
    counts = np.array([emissions(SourceParams(1000, 1, seed=s)).size for s in range(200)])
    mean, var = counts.mean(), counts.var(ddof=1)
    assert abs(mean - 1000) < 3 * math.sqrt(1000 / counts.size)
    # sd of the sample variance ratio is ~ sqrt(2 / (n - 1)) for large Poisson means
    assert abs(var / mean - 1) < 3 * math.sqrt(2 / (counts.size - 1))


def count_multi_windows(t, window):
    _, k = np.unique(t // window, return_counts=True)
    return int(np.count_nonzero(k >= 2))


def test_two_pair_probability_paper_rate():
    # 10 s at 47 kHz: 1e10 windows of 1 ns
    rate, w = 47_000, 1000
    t = emissions(SourceParams(rate, 10, seed=3))["t_emit"]
    p = rate * w * 1e-12
    expected = 1e10 * p**2 / 2
    assert abs(count_multi_windows(t, w) - expected) < 5 * math.sqrt(expected)


def test_two_pair_probability_matches_poisson_law():
    rate, w = 1e7, 1000  # p = 0.01
    t = emissions(SourceParams(rate, 1, seed=5))["t_emit"]
    p = rate * w * 1e-12
    exact = 1 - math.exp(-p) * (1 + p)
    expected = 1e9 * exact
    observed = count_multi_windows(t, w)
    assert abs(observed - expected) < 5 * math.sqrt(expected)
    assert abs(observed / 1e9 - p**2 / 2) / (p**2 / 2) < 0.02


def test_calibrate_pair_rate():
    herald = 5_570_000 / 600
    assert calibrate_pair_rate(herald, 0.35 * 0.56) == pytest.approx(47_363.9, abs=0.1)
    assert round(calibrate_pair_rate(9283, 0.196)) == 47_362
    assert calibrate_pair_rate(123.0, 1.0) == 123.0
    assert calibrate_pair_rate(0, 0.5) == 0
    with pytest.raises(ZeroDivisionError):
        calibrate_pair_rate(10, 0)
