"""Heralded single-photon antibunching: Monte Carlo simulator and streaming coincidence analysis."""

from .coincidence import (AnalysisSpec, DelayHistogram, ResultsTable, WindowSpec, analyze_stream,
                          build_delay_histogram, build_results_table, count_double, count_triple)
from .config import ExperimentConfig, load_config, parse_config, preset
from .detection import CH_A, CH_B, CH_H, TAG_DTYPE, DetectorParams, detect, tdc_quantize
from .estimators import (CountWithError, accidental_prediction, antibunching_ratio,
                         conditional_probability, estimate_noise, independence_product)
from .geometry import (IntervalClass, SeparationCertificate, SpacetimeEvent, certify_separation,
                       fiber_delay, interval_classify)
from .optics import PathParams, SplitterParams, beamsplit, propagate
from .pipeline import RunReport, run_analysis, run_simulation
from .source import SourceParams, calibrate_pair_rate, generate_pairs
from .timetag import TagFileHeader, merge_channels, merge_streams, read_tags, write_tags

__version__ = "0.1.0"
