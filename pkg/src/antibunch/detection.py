"""Single-photon detector and TDC models.

A detector thins the incoming photons by its efficiency, displaces each
click by Gaussian jitter, adds Poisson dark clicks, and finally suppresses
clicks that fall inside the dead time of an accepted click.  The TDC floors
click times to its resolution and attaches a channel number.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .optics import require_sorted
from .seeding import PS_PER_S, as_rng
from .source import poisson_times

CH_H, CH_A, CH_B = 0, 1, 2
TAG_DTYPE = np.dtype([("t", "<u8"), ("channel", "u1")])  # 9 bytes, packed
# jitter draws are truncated here so a fixed guard band bounds block overlap
JITTER_TRUNCATION = 20.0


@dataclass(frozen=True)
class DetectorParams:
    efficiency: float = 1.0
    jitter_sigma: float = 0.0  # ps
    dark_rate: float = 0.0  # counts / s
    dead_time: int = 0  # ps
    seed: int = 0

    def validate(self):
        if not 0 <= self.efficiency <= 1:
            raise InvalidParameter(f"efficiency must be in [0, 1], got {self.efficiency}")
        if self.jitter_sigma < 0:
            raise InvalidParameter(f"jitter_sigma must be >= 0, got {self.jitter_sigma}")
        if self.dark_rate < 0:
            raise InvalidParameter(f"dark_rate must be >= 0, got {self.dark_rate}")
        if self.dead_time < 0:
            raise InvalidParameter(f"dead_time must be >= 0, got {self.dead_time}")

    @property
    def guard(self) -> int:
        """Largest backwards displacement a jittered click can have, in ps."""
        return int(np.ceil(JITTER_TRUNCATION * self.jitter_sigma))


def raw_clicks(arrivals, params: DetectorParams, t0, t1, rng, stats=None):
    """Efficiency, jitter and dark counts for arrivals belonging to [t0, t1).

    Dark clicks are drawn on [t0, t1). Returns sorted click times; dead time
    is not applied here.
    """
    a = np.asarray(arrivals, dtype=np.int64)
    if params.efficiency < 1:
        a = a[rng.random(a.size) < params.efficiency]
    if params.jitter_sigma > 0 and a.size:
        offs = rng.normal(0.0, params.jitter_sigma, size=a.size)
        np.clip(offs, -JITTER_TRUNCATION * params.jitter_sigma,
                JITTER_TRUNCATION * params.jitter_sigma, out=offs)
        a = a + np.rint(offs).astype(np.int64)
        neg = a < 0
        if neg.any():
            if stats is not None:
                stats["clamped"] = stats.get("clamped", 0) + int(neg.sum())
            a[neg] = 0
    dark = poisson_times(params.dark_rate, t0, t1, rng)
    if stats is not None:
        stats["dark"] = stats.get("dark", 0) + dark.size
    clicks = np.concatenate([a, dark])
    clicks.sort(kind="stable")
    return clicks


class DeadTimeFilter:
    """Stateful dead-time suppression over a sorted click sequence fed in pieces."""

    def __init__(self, dead_time: int):
        self.dead_time = int(dead_time)
        self.last = None
        self.dropped = 0

    def __call__(self, clicks):
        c = np.asarray(clicks, dtype=np.int64)
        if self.dead_time <= 0 or c.size == 0:
            if c.size:
                self.last = int(c[-1])
            return c
        d = self.dead_time
        prev_ok = self.last is None or c[0] - self.last >= d
        if prev_ok and (c.size == 1 or np.diff(c).min() >= d):
            self.last = int(c[-1])
            return c
        keep = []
        i = 0 if self.last is None else int(np.searchsorted(c, self.last + d, "left"))
        n = c.size
        while i < n:
            keep.append(i)
            i = int(np.searchsorted(c, c[i] + d, "left"))
        out = c[keep]
        self.dropped += n - out.size
        if out.size:
            self.last = int(out[-1])
        return out


def detect(arrivals, params: DetectorParams, duration: float, rng=None, stats=None):
    """Click times (ps) produced by a detector over [0, duration) seconds."""
    params.validate()
    if duration < 0:
        raise InvalidParameter(f"duration must be >= 0, got {duration}")
    a = require_sorted(arrivals)
    rng = as_rng(params.seed if rng is None else rng, "detector")
    clicks = raw_clicks(a, params, 0, round(duration * PS_PER_S), rng, stats)
    dtf = DeadTimeFilter(params.dead_time)
    out = dtf(clicks)
    if stats is not None:
        stats["dead_time_dropped"] = stats.get("dead_time_dropped", 0) + dtf.dropped
    return out


def tdc_quantize(clicks, resolution: int, channel: int):
    """Floor click times to ``resolution`` ps and tag them with ``channel``."""
    if resolution <= 0:
        raise InvalidParameter(f"TDC resolution must be > 0, got {resolution}")
    c = require_sorted(np.asarray(clicks, dtype=np.int64))
    if c.size and c[0] < 0:
        raise InvalidParameter("click times must be >= 0")
    out = np.empty(c.size, dtype=TAG_DTYPE)
    out["t"] = (c // resolution) * resolution
    out["channel"] = channel
    return out
