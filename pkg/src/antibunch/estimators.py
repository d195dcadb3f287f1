"""Counting-statistics estimators with first-order error propagation.

Raw counts carry Poisson errors (sigma = sqrt(N)); ratios and products
combine relative errors in quadrature, treating inputs as independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InsufficientData


@dataclass(frozen=True)
class CountWithError:
    value: float
    sigma: float = 0.0

    @classmethod
    def poisson(cls, n):
        return cls(n, math.sqrt(n))

    def __str__(self):
        return f"{self.value:.6g} ± {self.sigma:.2g}"


def _rel(x: CountWithError):
    return x.sigma / x.value if x.value else 0.0


def conditional_probability(r_hx: CountWithError, r_h: CountWithError) -> CountWithError:
    """P = R_Hx / R_H."""
    if r_h.value == 0:
        raise ZeroDivisionError("herald count is zero")
    p = r_hx.value / r_h.value
    if r_hx.value == 0:
        # relative error of the numerator is undefined; report absolute bound
        return CountWithError(0.0, r_hx.sigma / r_h.value)
    return CountWithError(p, abs(p) * math.hypot(_rel(r_hx), _rel(r_h)))


def independence_product(p_a: CountWithError, p_b: CountWithError) -> CountWithError:
    """Coincidence probability expected for uncorrelated arms, P_A * P_B."""
    v = p_a.value * p_b.value
    s = math.hypot(p_b.value * p_a.sigma, p_a.value * p_b.sigma)
    return CountWithError(v, s)


def accidental_prediction(p_n: CountWithError, p_a: CountWithError,
                          p_b: CountWithError) -> CountWithError:
    """Accidental double-click probability P_N * (P_A + P_B)."""
    s_ab = p_a.value + p_b.value
    v = p_n.value * s_ab
    s = math.sqrt((s_ab * p_n.sigma) ** 2 + (p_n.value * p_a.sigma) ** 2
                  + (p_n.value * p_b.sigma) ** 2)
    return CountWithError(v, s)


def antibunching_ratio(p_ab: CountWithError, product: CountWithError) -> CountWithError:
    """P_AB / (P_A P_B); 1 for uncorrelated arms, 0 for perfect antibunching."""
    if product.value == 0:
        raise ZeroDivisionError("independence product is zero")
    v = p_ab.value / product.value
    if p_ab.value == 0:
        return CountWithError(0.0, p_ab.sigma / product.value)
    return CountWithError(v, abs(v) * math.hypot(_rel(p_ab), _rel(product)))


def estimate_noise(hist, peak_exclusion, window_width) -> CountWithError:
    """Mean off-peak coincidences per ``window_width`` of delay.

    ``peak_exclusion`` is a ``(lo, hi)`` delay interval; bins overlapping it are
    ignored. The error is Poisson on the rescaled per-window count.
    """
    lo, hi = peak_exclusion
    starts = hist.bin_starts
    ends = starts + hist.bin_width
    ends[-1] = min(ends[-1], hist.max_delay)
    off = (ends <= lo) | (starts >= hi)
    span = float((ends - starts)[off].sum())
    if span <= 0:
        raise InsufficientData("no histogram bins outside the peak exclusion")
    total = int(hist.counts[off].sum())
    value = total * window_width / span
    return CountWithError(value, math.sqrt(value))
