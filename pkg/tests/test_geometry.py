from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from antibunch.config import GeometryConfig, preset
from antibunch.errors import ConfigError, InvalidParameter
from antibunch.geometry import (IntervalClass, SpacetimeEvent, certify_separation, fiber_delay,
                                interval_classify, light_travel_time)


def oracle_class(e1, e2):
    c = Fraction(299_792_458, 10**9)  # mm/ps
    lhs = (c * (e2.t - e1.t)) ** 2
    rhs = (e2.x - e1.x) ** 2 + (e2.y - e1.y) ** 2 + (e2.z - e1.z) ** 2
    if lhs > rhs:
        return IntervalClass.TIMELIKE
    if lhs < rhs:
        return IntervalClass.SPACELIKE
    return IntervalClass.LIGHTLIKE


@pytest.mark.parametrize("e2, expected", [
    (SpacetimeEvent(0, 10_000), IntervalClass.SPACELIKE),
    (SpacetimeEvent(1000, 0), IntervalClass.TIMELIKE),
    (SpacetimeEvent(100_000, 10_000), IntervalClass.TIMELIKE),
])
def test_classify_examples(e2, expected):
    e1 = SpacetimeEvent(0, 0)
    assert interval_classify(e1, e2) is expected
    assert oracle_class(e1, e2) is expected


def test_fiber_delay_examples():
    assert fiber_delay(10_000, 1.5) == 50_034
    assert fiber_delay(0, 1.5) == 0
    # 2 m at n = 1.5 is 10006.92 ps; whole ps are truncated
    assert fiber_delay(2_000, 1.5) == 10_006
    with pytest.raises(InvalidParameter):
        fiber_delay(-1, 1.5)
    with pytest.raises(InvalidParameter):
        fiber_delay(10, 0.5)


def test_light_travel_ten_metres():
    assert light_travel_time((0, 0, 0), (10_000, 0, 0)) == 33_356


def test_certificates_for_presets():
    sl = certify_separation(preset("spacelike-paper"))
    assert sl.interval is IntervalClass.SPACELIKE and not sl.undetermined
    assert sl.light_travel_time == 33_356
    assert sl.margin == 33_356 and sl.label == "SL"
    tl = certify_separation(preset("timelike-paper"))
    assert tl.interval is IntervalClass.TIMELIKE and tl.label == "TL"
    assert tl.detection_time_difference == fiber_delay(22_000) - fiber_delay(2_000)
    assert abs(tl.detection_time_difference - 100_000) < 100


def test_degenerate_geometry_is_flagged_lightlike():
    geo = GeometryConfig(pos_A=(5, 5, 5), pos_B=(5, 5, 5), fiber_A=100, fiber_B=100)
    cert = certify_separation(geo)
    assert cert.interval is IntervalClass.LIGHTLIKE
    assert cert.undetermined and cert.label is None


def test_margin_inside_uncertainty_is_undetermined():
    # 10 m apart, arm B 6 m longer: dt ~ 30.0 ns vs 33.4 ns light time, margin < 5 ns
    geo = GeometryConfig(fiber_A=12_000, fiber_B=18_000, timing_uncertainty=5_000)
    assert certify_separation(geo).undetermined


def test_missing_geometry_fields():
    class Partial:
        pos_A = (0, 0, 0)
        pos_B = (1, 0, 0)
    with pytest.raises(ConfigError):
        certify_separation(Partial())


times = st.integers(-10**15, 10**15)
coords = st.integers(-10**9, 10**9)
events = st.builds(SpacetimeEvent, times, coords, coords, coords)


@given(events, events)
def test_matches_exact_oracle_and_is_symmetric(a, b):
    assert interval_classify(a, b) is oracle_class(a, b)
    assert interval_classify(a, b) is interval_classify(b, a)


@given(events, events, st.integers(1, 1000))
def test_scaling_invariance(a, b, k):
    scale = lambda e: SpacetimeEvent(e.t * k, e.x * k, e.y * k, e.z * k)
    assert interval_classify(scale(a), scale(b)) is interval_classify(a, b)


@given(st.integers(-10**5, 10**5), st.integers(-10**6, 10**6), st.sampled_from("xyz"))
def test_exact_light_cone_is_lightlike(k, t0, axis):
    # c * 10**9 k ps = 299792458 k mm exactly
    e1 = SpacetimeEvent(t0)
    e2 = SpacetimeEvent(t0 + 10**9 * k, **{axis: 299_792_458 * k})
    assert interval_classify(e1, e2) is IntervalClass.LIGHTLIKE
    nudged = SpacetimeEvent(e2.t + 1, e2.x, e2.y, e2.z)
    if k > 0:
        assert interval_classify(e1, nudged) is IntervalClass.TIMELIKE


@given(st.integers(0, 10**9), st.integers(0, 10**6), st.floats(1, 4), st.floats(0, 1))
def test_fiber_delay_monotone(length, extra, n, dn):
    assert fiber_delay(length + extra, n) >= fiber_delay(length, n)
    assert fiber_delay(length, n + dn) >= fiber_delay(length, n)
