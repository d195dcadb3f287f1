import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from antibunch.detection import DeadTimeFilter, DetectorParams, detect, tdc_quantize
from antibunch.errors import InvalidParameter, PreconditionError


def test_ideal_detector_is_identity():
    x = np.sort(np.random.default_rng(0).integers(0, 10**12, 1000))
    assert np.array_equal(detect(x, DetectorParams(1.0, 0, 0, 0, seed=3), 1.0), x)


def test_efficiency_thinning():
    x = np.arange(10**6, dtype=np.int64) * 1000
    n = detect(x, DetectorParams(0.10, seed=1), 1.0).size
    assert abs(n - 1e5) < 5 * math.sqrt(1e6 * 0.1 * 0.9)


def test_dark_counts_only():
    r, T = 9100.0, 20.0
    n = detect(np.empty(0, np.int64), DetectorParams(1.0, dark_rate=r, seed=2), T).size
    assert abs(n - r * T) < 5 * math.sqrt(r * T)


def test_mean_count_over_seeds():
    x = np.arange(0, 10**9, 10**5, dtype=np.int64)  # 10^4 arrivals in 1 ms
    eff, rate, T = 0.3, 2e6, 1e-3
    counts = [detect(x, DetectorParams(eff, dark_rate=rate, seed=s), T).size for s in range(200)]
    mean = eff * x.size + rate * T
    var = x.size * eff * (1 - eff) + rate * T
    assert abs(np.mean(counts) - mean) < 3 * math.sqrt(var / len(counts))


def test_dark_count_poisson_dispersion():
    counts = np.array([detect([], DetectorParams(dark_rate=500.0, seed=s), 2.0).size
                       for s in range(200)])
    ratio = counts.var(ddof=1) / counts.mean()
    assert abs(counts.mean() - 1000) < 3 * math.sqrt(1000 / 200)
    assert abs(ratio - 1) < 3 * math.sqrt(2 / 199)


def test_jitter_spread():
    x = np.arange(1, 200_001, dtype=np.int64) * 10**6
    sigma = 400.0
    clicks = detect(x, DetectorParams(1.0, jitter_sigma=sigma, seed=5), 1.0)
    assert clicks.size == x.size
    d = clicks - x  # order preserved: spacing >> jitter
    sd = d.std(ddof=1)
    assert abs(sd - sigma) < 3 * sigma / math.sqrt(2 * (d.size - 1))
    assert abs(d.mean()) < 3 * sigma / math.sqrt(d.size)


def test_jitter_clamped_at_zero():
    st_ = {}
    clicks = detect(np.zeros(1000, np.int64), DetectorParams(1.0, jitter_sigma=1000, seed=1), 1e-6, stats=st_)
    assert clicks.min() >= 0
    assert 400 < st_["clamped"] < 600


@given(st.lists(st.integers(0, 10**6), max_size=200), st.integers(0, 5000), st.integers(0, 99))
def test_dead_time_spacing(times, dead, seed):
    x = np.array(sorted(times), dtype=np.int64)
    out = detect(x, DetectorParams(1.0, dead_time=dead, seed=seed), 1e-6)
    assert np.all(np.diff(out) >= dead)
    assert np.isin(out, x).all()
    if x.size:
        assert out[0] == x[0]


def test_dead_time_filter_across_pieces_matches_whole():
    x = np.sort(np.random.default_rng(1).integers(0, 10**7, 5000))
    whole = DeadTimeFilter(3000)(x)
    f = DeadTimeFilter(3000)
    pieces = np.concatenate([f(p) for p in np.array_split(x, 17)])
    assert np.array_equal(whole, pieces)
    assert f.dropped == x.size - whole.size


def test_detect_errors():
    with pytest.raises(PreconditionError):
        detect(np.array([5, 1]), DetectorParams(), 1.0)
    with pytest.raises(InvalidParameter):
        detect(np.array([1]), DetectorParams(), -1.0)
    with pytest.raises(InvalidParameter):
        detect(np.array([1]), DetectorParams(efficiency=1.5), 1.0)


def test_tdc_examples():
    tags = tdc_quantize(np.array([1234, 1250]), 50, 1)
    assert tags["t"].tolist() == [1200, 1250]
    assert tags["channel"].tolist() == [1, 1]
    with pytest.raises(InvalidParameter):
        tdc_quantize(np.array([1]), 0, 1)


def test_tdc_residuals_uniform():
    clicks = np.sort(np.random.default_rng(8).integers(0, 10**12, 200_000))
    tags = tdc_quantize(clicks, 50, 0)
    resid = clicks - tags["t"].astype(np.int64)
    assert resid.min() >= 0 and resid.max() <= 49
    observed = np.bincount(resid, minlength=50)
    chi2 = stats.chisquare(observed).statistic
    assert chi2 < stats.chi2.ppf(0.999, df=49)
