"""CW-pumped SPDC pair source: emission times of a homogeneous Poisson process."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .seeding import BLOCK_PS, PS_PER_S, block_edges, stage_rng

PAIR_DTYPE = np.dtype([("t_emit", "<i8"), ("pair_id", "<i8")])


@dataclass(frozen=True)
class SourceParams:
    pair_rate: float  # pairs / s
    duration: float  # s
    seed: int = 0

    def validate(self):
        if not self.pair_rate >= 0:
            raise InvalidParameter(f"pair_rate must be >= 0, got {self.pair_rate}")
        if not self.duration > 0:
            raise InvalidParameter(f"duration must be > 0, got {self.duration}")


def poisson_times(rate, t0, t1, rng):
    """Sorted integer-ps event times of a rate-``rate`` (1/s) Poisson process on [t0, t1).

    Built from exponential gaps starting at ``t0``; memorylessness makes
    restarting at each block boundary exact.
    """
    span = t1 - t0
    if rate <= 0 or span <= 0:
        return np.empty(0, dtype=np.int64)
    mean_gap = PS_PER_S / rate
    expected = span / mean_gap
    n = int(expected + 6 * math.sqrt(expected) + 16)
    t = np.cumsum(rng.exponential(mean_gap, size=n))
    while t[-1] < span:
        more = np.cumsum(rng.exponential(mean_gap, size=n)) + t[-1]
        t = np.concatenate([t, more])
    t = t[: np.searchsorted(t, span, side="left")]
    return np.floor(t).astype(np.int64) + t0


def pair_blocks(params: SourceParams, block_ps: int = BLOCK_PS):
    """Yield ``(t0, t1, emissions)`` per time block; emissions is a PAIR_DTYPE array."""
    params.validate()
    duration_ps = round(params.duration * PS_PER_S)
    next_id = 0
    for b, t0, t1 in block_edges(duration_ps, block_ps):
        rng = stage_rng(params.seed, "pairs", b)
        t = poisson_times(params.pair_rate, t0, t1, rng)
        out = np.empty(t.size, dtype=PAIR_DTYPE)
        out["t_emit"] = t
        out["pair_id"] = np.arange(next_id, next_id + t.size)
        next_id += t.size
        yield t0, t1, out


def generate_pairs(params: SourceParams, block_ps: int = BLOCK_PS):
    """Stream of pair emissions as one PAIR_DTYPE array per time block."""
    for _, _, emissions in pair_blocks(params, block_ps):
        yield emissions


def calibrate_pair_rate(target_herald_rate: float, herald_arm_efficiency: float) -> float:
    """Pair rate that yields ``target_herald_rate`` herald clicks per second."""
    if herald_arm_efficiency == 0:
        raise ZeroDivisionError("herald arm efficiency is zero")
    if not 0 < herald_arm_efficiency <= 1:
        raise InvalidParameter(
            f"herald arm efficiency must be in (0, 1], got {herald_arm_efficiency}")
    return target_herald_rate / herald_arm_efficiency
