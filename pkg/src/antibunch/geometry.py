"""Interval classification of detection events and fiber propagation delays.

Times are integer picoseconds and positions integer millimetres, so the
light-cone test is done in exact integer arithmetic: with c expressed as
299792458 / 10**9 mm/ps, ``c**2 dt**2 <=> |dx|**2`` becomes a comparison of
``(299792458 * dt)**2`` with ``(10**9 * |dx|)**2``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidParameter

C_M_PER_S = 299_792_458
# mm per ps, exact
C_MM_PER_PS = Fraction(C_M_PER_S, 10**9)
DEFAULT_GROUP_INDEX = 1.5
DEFAULT_TIMING_UNCERTAINTY_PS = 1000


class IntervalClass(enum.Enum):
    SPACELIKE = "Spacelike"
    TIMELIKE = "Timelike"
    LIGHTLIKE = "Lightlike"


@dataclass(frozen=True)
class SpacetimeEvent:
    t: int
    x: int = 0
    y: int = 0
    z: int = 0


@dataclass(frozen=True)
class SeparationCertificate:
    interval: IntervalClass
    light_travel_time: int
    detection_time_difference: int
    margin: int
    uncertainty: int
    undetermined: bool = False

    @property
    def label(self):
        """'SL', 'TL' or None when the margin is inside the uncertainty."""
        if self.interval is IntervalClass.SPACELIKE:
            return "SL"
        if self.interval is IntervalClass.TIMELIKE:
            return "TL"
        return None


def _interval_sign(dt, dx2):
    # sign of c^2 dt^2 - |dx|^2, scaled by 10**18 to stay integral
    lhs = (C_M_PER_S * dt) ** 2
    rhs = dx2 * 10**18
    return (lhs > rhs) - (lhs < rhs)


def interval_classify(e1: SpacetimeEvent, e2: SpacetimeEvent) -> IntervalClass:
    dt = int(e2.t) - int(e1.t)
    dx2 = sum((int(b) - int(a)) ** 2 for a, b in
              ((e1.x, e2.x), (e1.y, e2.y), (e1.z, e2.z)))
    s = _interval_sign(dt, dx2)
    if s > 0:
        return IntervalClass.TIMELIKE
    if s < 0:
        return IntervalClass.SPACELIKE
    return IntervalClass.LIGHTLIKE


def fiber_delay(length: int, group_index: float = DEFAULT_GROUP_INDEX) -> int:
    """Propagation time in ps through ``length`` mm of fiber, truncated to whole ps.

    >>> fiber_delay(10_000, 1.5)
    50034
    """
    if length < 0:
        raise InvalidParameter(f"fiber length must be >= 0, got {length}")
    if not group_index >= 1:
        raise InvalidParameter(f"group index must be >= 1, got {group_index}")
    return math.floor(Fraction(length) * Fraction(group_index) / C_MM_PER_PS)


def light_travel_time(p1, p2) -> int:
    """Vacuum light travel time in ps between two positions in mm, rounded."""
    d = math.sqrt(sum((int(b) - int(a)) ** 2 for a, b in zip(p1, p2)))
    return round(Fraction(d) / C_MM_PER_PS)


def certify_separation(config) -> SeparationCertificate:
    """Classify the two signal detections given the detector layout.

    ``config`` is an ExperimentConfig or anything with a ``geometry`` attribute
    (or a geometry object itself) carrying ``pos_A``, ``pos_B``, ``fiber_A``,
    ``fiber_B``, ``group_index`` and ``timing_uncertainty``.
    """
    from .errors import ConfigError

    geo = getattr(config, "geometry", config)
    try:
        pos_a, pos_b = tuple(geo.pos_A), tuple(geo.pos_B)
        fa, fb = geo.fiber_A, geo.fiber_B
        n = geo.group_index
        unc = geo.timing_uncertainty
    except AttributeError as exc:
        raise ConfigError(f"missing geometry field ({exc})", key="geometry") from None
    if None in (fa, fb, n, unc) or len(pos_a) != 3 or len(pos_b) != 3:
        raise ConfigError("incomplete detector geometry", key="geometry")
    # electronic delays after the detector do not move the detection events
    dt = fiber_delay(fb, n) - fiber_delay(fa, n)
    travel = light_travel_time(pos_a, pos_b)
    margin = travel - abs(dt)
    if margin > unc:
        cls, undetermined = IntervalClass.SPACELIKE, False
    elif -margin > unc:
        cls, undetermined = IntervalClass.TIMELIKE, False
    else:
        cls, undetermined = IntervalClass.LIGHTLIKE, True
    return SeparationCertificate(cls, travel, dt, margin, int(unc), undetermined)
