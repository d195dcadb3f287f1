"""End-to-end simulation to a PTAG file and analysis into a report."""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from .coincidence import ResultsTable, StreamCounts, build_results_table
from .config import ExperimentConfig, validate
from .detection import CH_A, CH_B, CH_H, DeadTimeFilter, raw_clicks, tdc_quantize
from .estimators import CountWithError
from .geometry import SeparationCertificate, certify_separation
from .optics import PathParams, beamsplit, propagate
from .seeding import PS_PER_S, stage_rng
from .source import pair_blocks
from .timetag import TagFileHeader, merge_channels, write_tags

ARMS = {CH_H: "H", CH_A: "A", CH_B: "B"}


def simulate_chunks(cfg: ExperimentConfig, stats=None):
    """Yield merged, sorted TAG_DTYPE chunks, one per source block.

    Clicks from block ``b`` that could still be overtaken by jittered clicks
    of block ``b + 1`` are held back until the next block.
    """
    validate(cfg)
    stats = {} if stats is None else stats
    res = cfg.tdc_resolution
    seed = cfg.master_seed
    duration_ps = round(cfg.duration * PS_PER_S)
    paths = {ch: PathParams(getattr(cfg, f"arm_{a}").transmission, cfg.arm_delay(a))
             for ch, a in ARMS.items()}
    dets = {ch: getattr(cfg, f"det_{a}") for ch, a in ARMS.items()}
    guard = max(d.guard for d in dets.values()) + res
    filters = {ch: DeadTimeFilter(d.dead_time) for ch, d in dets.items()}
    pending = {ch: np.empty(0, np.int64) for ch in ARMS}

    for b, (t0, t1, pairs) in enumerate(pair_blocks(cfg.source_params())):
        def rng(stage):
            return stage_rng(seed, stage, b)

        t = pairs["t_emit"]
        stats["pairs"] = stats.get("pairs", 0) + t.size
        herald = propagate(propagate(t, cfg.coupling, rng("coupling_H")), paths[CH_H], rng("arm_H"))
        signal = propagate(t, cfg.coupling, rng("coupling_S"))
        to_a, to_b = beamsplit(signal, cfg.splitter, rng("splitter"))
        arrivals = {CH_H: herald,
                    CH_A: propagate(to_a, paths[CH_A], rng("arm_A")),
                    CH_B: propagate(to_b, paths[CH_B], rng("arm_B"))}
        final = t1 >= duration_ps
        bound = None if final else ((t1 - guard) // res) * res
        out = []
        for ch, arm in ARMS.items():
            clicks = raw_clicks(arrivals[ch], dets[ch], t0, t1, rng(f"det_{arm}"), stats)
            buf = np.concatenate([pending[ch], clicks])
            buf.sort(kind="stable")
            k = buf.size if final else int(np.searchsorted(buf, bound, "left"))
            ready, pending[ch] = buf[:k], buf[k:]
            out.append(tdc_quantize(filters[ch](ready), res, ch))
        yield merge_channels(out)
    stats["dead_time_dropped"] = sum(f.dropped for f in filters.values())


def run_simulation(cfg: ExperimentConfig, out_path, stats=None) -> int:
    header = TagFileHeader(cfg.tdc_resolution, len(ARMS))
    return write_tags(out_path, header, simulate_chunks(cfg, stats))


@dataclass
class RunReport:
    config_digest: str
    certificate: SeparationCertificate
    table: ResultsTable
    histograms: dict = field(default_factory=dict)

    def derived(self):
        return dict(self.table.derived_rows())

    def to_dict(self):
        cert = asdict(self.certificate)
        cert["interval"] = self.certificate.interval.value

        def cwe(x: CountWithError):
            return {"value": x.value, "sigma": x.sigma}

        return {
            "config_digest": self.config_digest,
            "separation": self.table.separation,
            "certificate": cert,
            "table": {k: cwe(v) for k, v in self.table.rows()},
            "derived": {k: cwe(v) for k, v in self.table.derived_rows()},
            "histograms": {k: os.fspath(v) for k, v in self.histograms.items()},
        }

    def to_json(self, path):
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)
            f.write("\n")

    def summary(self):
        c = self.certificate
        lines = [f"config {self.config_digest}  separation: {c.interval.value}"
                 + (" (undetermined)" if c.undetermined else ""),
                 f"  light travel {c.light_travel_time} ps, detection dt {c.detection_time_difference} ps,"
                 f" margin {c.margin} ps, uncertainty {c.uncertainty} ps"]
        for name, v in self.table.rows() + self.table.derived_rows():
            lines.append(f"  {name:<16} {v.value:>14.6g} ± {v.sigma:.3g}")
        return "\n".join(lines)


def run_analysis(tagfile, cfg: ExperimentConfig, hist_dir=None, row_tags=None) -> RunReport:
    """Analyse a tag file; histogram CSVs go to ``hist_dir`` when given."""
    spec = cfg.analysis_spec()
    table, per_row = build_results_table(tagfile, spec, row_tags)
    hists = {}
    if hist_dir is not None:
        os.makedirs(hist_dir, exist_ok=True)
        counts: StreamCounts = per_row["A"]
        for name, h in (("HA", counts.hist_A), ("HB", per_row["B"].hist_B)):
            p = os.path.join(hist_dir, f"hist_{name}.csv")
            h.to_csv(p)
            hists[name] = p
    return RunReport(cfg.digest(), certify_separation(cfg), table, hists)
