"""Single-pass heralded coincidence counting over merged time-tag streams.

The scan keeps herald tags until every target tag that could fall in their
widest window has been seen, then hands complete batches to the counters.
Buffers therefore scale with ``rate * window reach``, not with stream length.

Coincidence semantics: R_Hx counts heralds with at least one target tag in
``[t_H + center - width/2, t_H + center + width/2)``, so each herald
contributes at most once. Delay histograms count every (herald, target) pair.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .detection import CH_A, CH_B, CH_H
from .errors import InvalidParameter
from .estimators import (CountWithError, accidental_prediction, antibunching_ratio,
                         conditional_probability, estimate_noise, independence_product)
from .timetag import OrderChecker, iter_chunks


@dataclass(frozen=True)
class WindowSpec:
    center_delay: int = 0
    width: int = 1000

    def __post_init__(self):
        if not self.width > 0:
            raise InvalidParameter(f"window width must be > 0, got {self.width}")

    @property
    def bounds(self):
        lo = self.center_delay - self.width // 2
        return lo, lo + self.width


@dataclass
class DelayHistogram:
    bin_width: int
    min_delay: int
    max_delay: int
    counts: np.ndarray = None

    def __post_init__(self):
        if self.bin_width <= 0:
            raise InvalidParameter("histogram bin width must be > 0")
        if not self.max_delay > self.min_delay:
            raise InvalidParameter("histogram range must be non-empty")
        if self.counts is None:
            n = -(-(self.max_delay - self.min_delay) // self.bin_width)
            self.counts = np.zeros(n, dtype=np.uint64)

    @property
    def bin_starts(self):
        return self.min_delay + self.bin_width * np.arange(self.counts.size, dtype=np.int64)

    def to_csv(self, path):
        with open(path, "w") as f:
            f.write("bin_start_ps,count\n")
            for s, c in zip(self.bin_starts.tolist(), self.counts.tolist()):
                f.write(f"{s},{c}\n")


def _window_hits(h, targets, lo, hi):
    i0 = np.searchsorted(targets, h + lo, "left")
    i1 = np.searchsorted(targets, h + hi, "left")
    return i0, i1


class _Double:
    def __init__(self, ch, window: WindowSpec):
        self.ch, self.window = ch, window
        self.count = 0

    reach = property(lambda self: self.window.bounds)

    def update(self, h, targets):
        i0, i1 = _window_hits(h, targets[self.ch], *self.window.bounds)
        self.count += int(np.count_nonzero(i1 > i0))


class _Triple:
    def __init__(self, ch_a, win_a, ch_b, win_b):
        self.a, self.b = _Double(ch_a, win_a), _Double(ch_b, win_b)
        self.count = 0

    @property
    def reach(self):
        (a0, a1), (b0, b1) = self.a.reach, self.b.reach
        return min(a0, b0), max(a1, b1)

    def update(self, h, targets):
        i0, i1 = _window_hits(h, targets[self.a.ch], *self.a.window.bounds)
        j0, j1 = _window_hits(h, targets[self.b.ch], *self.b.window.bounds)
        self.count += int(np.count_nonzero((i1 > i0) & (j1 > j0)))


class _Hist:
    def __init__(self, ch, hist: DelayHistogram):
        self.ch, self.hist = ch, hist

    reach = property(lambda self: (self.hist.min_delay, self.hist.max_delay))

    def update(self, h, targets):
        t = targets[self.ch]
        i0, i1 = _window_hits(h, t, self.hist.min_delay, self.hist.max_delay)
        n = i1 - i0
        total = int(n.sum())
        if not total:
            return
        first = np.repeat(i0 - (np.cumsum(n) - n), n)
        idx = first + np.arange(total)
        delays = t[idx] - np.repeat(h, n)
        bins = (delays - self.hist.min_delay) // self.hist.bin_width
        self.hist.counts += np.bincount(bins, minlength=self.hist.counts.size).astype(np.uint64)


def _scan(source, herald_ch, counters):
    """Feed complete herald batches to ``counters``; returns total herald count."""
    target_chs = sorted({c.ch for c in counters if hasattr(c, "ch")}
                        | {x.ch for c in counters if isinstance(c, _Triple) for x in (c.a, c.b)})
    if herald_ch in target_chs:
        raise InvalidParameter("herald channel cannot also be a target channel")
    reaches = [c.reach for c in counters]
    lo = min((r[0] for r in reaches), default=0)
    hi = max((r[1] for r in reaches), default=0)
    check = OrderChecker()
    heralds = np.empty(0, np.int64)
    targets = {ch: np.empty(0, np.int64) for ch in target_chs}
    n_heralds = 0
    t_last = None

    def flush(upto):
        nonlocal heralds
        k = heralds.size if upto is None else int(np.searchsorted(heralds, upto, "right"))
        if k:
            batch = heralds[:k]
            for c in counters:
                c.update(batch, targets)
            heralds = heralds[k:]

    for chunk in iter_chunks(source):
        if not chunk.size:
            continue
        check(chunk)
        t = chunk["t"].astype(np.int64)
        ch = chunk["channel"]
        new_h = t[ch == herald_ch]
        n_heralds += new_h.size
        if new_h.size:
            heralds = np.concatenate([heralds, new_h]) if heralds.size else new_h
        for c in target_chs:
            sel = t[ch == c]
            if sel.size:
                targets[c] = np.concatenate([targets[c], sel]) if targets[c].size else sel
        t_last = int(t[-1])
        # later tags have t >= t_last, so heralds with h + hi <= t_last are complete
        flush(t_last - hi)
        cut = (int(heralds[0]) if heralds.size else t_last) + lo
        for c in target_chs:
            k = int(np.searchsorted(targets[c], cut, "left"))
            if k:
                targets[c] = targets[c][k:]
    flush(None)
    return n_heralds


def build_delay_histogram(tags, herald_ch, target_ch, bin_width, delay_range) -> DelayHistogram:
    hist = DelayHistogram(int(bin_width), int(delay_range[0]), int(delay_range[1]))
    _scan(tags, herald_ch, [_Hist(target_ch, hist)])
    return hist


def count_double(tags, herald_ch, target_ch, window: WindowSpec):
    """Returns ``(R_Hx, R_H)``."""
    d = _Double(target_ch, window)
    n_h = _scan(tags, herald_ch, [d])
    return d.count, n_h


def count_triple(tags, herald_ch, ch_a, ch_b, window_a: WindowSpec, window_b: WindowSpec):
    """Returns ``(R_HAB, R_H)``."""
    tr = _Triple(ch_a, window_a, ch_b, window_b)
    n_h = _scan(tags, herald_ch, [tr])
    return tr.count, n_h


@dataclass(frozen=True)
class AnalysisSpec:
    window_A: WindowSpec
    window_B: WindowSpec
    herald_ch: int = CH_H
    ch_A: int = CH_A
    ch_B: int = CH_B
    bin_width: int = 50
    hist_half_range: int = 50_000
    noise_exclusion: int = 5_000
    separation: str | None = None

    def hist_range(self, window: WindowSpec):
        c = window.center_delay
        return c - self.hist_half_range, c + self.hist_half_range

    def exclusion(self, window: WindowSpec):
        c = window.center_delay
        return c - self.noise_exclusion, c + self.noise_exclusion


@dataclass
class StreamCounts:
    """Everything one pass over a stream produces."""

    n_heralds: int
    R_HA: int
    R_HB: int
    R_HAB: int
    hist_A: DelayHistogram
    hist_B: DelayHistogram


def analyze_stream(tags, spec: AnalysisSpec) -> StreamCounts:
    """Run doubles, triples and both delay histograms in one pass."""
    hist_a = DelayHistogram(spec.bin_width, *spec.hist_range(spec.window_A))
    hist_b = DelayHistogram(spec.bin_width, *spec.hist_range(spec.window_B))
    da, db = _Double(spec.ch_A, spec.window_A), _Double(spec.ch_B, spec.window_B)
    tr = _Triple(spec.ch_A, spec.window_A, spec.ch_B, spec.window_B)
    n_h = _scan(tags, spec.herald_ch, [da, db, tr, _Hist(spec.ch_A, hist_a), _Hist(spec.ch_B, hist_b)])
    return StreamCounts(n_h, da.count, db.count, tr.count, hist_a, hist_b)


def noise_from_counts(sc: StreamCounts, spec: AnalysisSpec) -> CountWithError:
    """Off-peak coincidences per window, averaged over the A and B histograms."""
    na = estimate_noise(sc.hist_A, spec.exclusion(spec.window_A), spec.window_A.width)
    nb = estimate_noise(sc.hist_B, spec.exclusion(spec.window_B), spec.window_B.width)
    v = (na.value + nb.value) / 2
    return CountWithError(v, math.sqrt(v))


TABLE_ROWS = ("R_HA", "R_H(A)", "P_A", "R_HB", "R_H(B)", "P_B",
              "R_HAB", "R_H(AB)", "P(1,1)", "R_HN", "R_H(N)", "P_N")


@dataclass
class ResultsTable:
    R_HA: CountWithError
    R_H_A: CountWithError
    R_HB: CountWithError
    R_H_B: CountWithError
    R_HAB: CountWithError
    R_H_AB: CountWithError
    R_HN: CountWithError
    R_H_N: CountWithError
    separation: str | None = None
    P_A: CountWithError = field(init=False)
    P_B: CountWithError = field(init=False)
    P_11: CountWithError = field(init=False)
    P_N: CountWithError = field(init=False)

    def __post_init__(self):
        self.P_A = conditional_probability(self.R_HA, self.R_H_A)
        self.P_B = conditional_probability(self.R_HB, self.R_H_B)
        self.P_11 = conditional_probability(self.R_HAB, self.R_H_AB)
        self.P_N = conditional_probability(self.R_HN, self.R_H_N)

    @classmethod
    def from_counts(cls, R_HA, R_H_A, R_HB, R_H_B, R_HAB, R_H_AB, R_HN, R_H_N,
                    separation=None):
        """Table from raw integer counts; R_HN may be fractional (a mean)."""
        p = CountWithError.poisson
        return cls(p(R_HA), p(R_H_A), p(R_HB), p(R_H_B), p(R_HAB), p(R_H_AB),
                   p(R_HN), p(R_H_N), separation)

    def rows(self):
        vals = (self.R_HA, self.R_H_A, self.P_A, self.R_HB, self.R_H_B, self.P_B,
                self.R_HAB, self.R_H_AB, self.P_11, self.R_HN, self.R_H_N, self.P_N)
        return list(zip(TABLE_ROWS, vals))

    @property
    def product(self):
        return independence_product(self.P_A, self.P_B)

    @property
    def accidental(self):
        return accidental_prediction(self.P_N, self.P_A, self.P_B)

    @property
    def ratio(self):
        return antibunching_ratio(self.P_11, self.product)

    def derived_rows(self):
        return [("P_A*P_B", self.product), ("P_N(1,1)", self.accidental),
                ("P_AB/(P_A*P_B)", self.ratio)]

    def to_csv(self, path):
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["quantity", "value", "sigma"])
            for name, cwe in self.rows() + self.derived_rows():
                w.writerow([name, repr(cwe.value), repr(cwe.sigma)])


def build_results_table(tags, spec: AnalysisSpec, row_tags=None):
    """Assemble the full table; returns ``(table, {source key: StreamCounts})``.

    ``row_tags`` optionally maps any of ``"A"``, ``"B"``, ``"AB"``, ``"N"`` to a
    separate stream for that row, mirroring measurements taken in distinct runs.
    Each distinct stream is scanned once.
    """
    sources = {"A": tags, "B": tags, "AB": tags, "N": tags}
    sources.update(row_tags or {})
    done = {}
    per_row = {}
    for row, src in sources.items():
        key = id(src)
        if key not in done:
            done[key] = analyze_stream(src, spec)
        per_row[row] = done[key]
    a, b, ab, n = per_row["A"], per_row["B"], per_row["AB"], per_row["N"]
    p = CountWithError.poisson
    table = ResultsTable(p(a.R_HA), p(a.n_heralds), p(b.R_HB), p(b.n_heralds),
                         p(ab.R_HAB), p(ab.n_heralds), noise_from_counts(n, spec),
                         p(n.n_heralds), spec.separation)
    return table, per_row
