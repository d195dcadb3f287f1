"""Lossy delay lines and the fiber beamsplitter.

Each photon is routed to exactly one output of the splitter; there is no
amplitude-level interference at this level of description.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter, PreconditionError
from .seeding import as_rng


@dataclass(frozen=True)
class PathParams:
    transmission: float = 1.0
    delay: int = 0  # ps

    def validate(self):
        if not 0 <= self.transmission <= 1:
            raise InvalidParameter(f"transmission must be in [0, 1], got {self.transmission}")
        if self.delay < 0:
            raise InvalidParameter(f"delay must be >= 0, got {self.delay}")


@dataclass(frozen=True)
class SplitterParams:
    ratio_to_A: float = 0.5
    seed: int = 0

    def validate(self):
        if not 0 <= self.ratio_to_A <= 1:
            raise InvalidParameter(f"ratio_to_A must be in [0, 1], got {self.ratio_to_A}")


def require_sorted(arrivals):
    a = np.asarray(arrivals)
    if a.size > 1:
        bad = np.flatnonzero(a[1:] < a[:-1])
        if bad.size:
            raise PreconditionError(f"input not sorted at index {bad[0] + 1}")
    return a


def propagate(arrivals, path: PathParams, seed=0):
    """Keep each arrival with probability ``path.transmission`` and delay survivors."""
    path.validate()
    a = require_sorted(arrivals)
    rng = as_rng(seed, "propagate")
    if path.transmission < 1:
        a = a[rng.random(a.size) < path.transmission]
    return a + path.delay if path.delay else a.copy()


def beamsplit(arrivals, params: SplitterParams, rng=None):
    """Route every photon to arm A or arm B; returns ``(arm_A, arm_B)``."""
    params.validate()
    a = require_sorted(arrivals)
    rng = as_rng(params.seed if rng is None else rng, "splitter")
    to_a = rng.random(a.size) < params.ratio_to_A
    return a[to_a], a[~to_a]
