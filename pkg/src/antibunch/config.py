"""Experiment configuration, flat ``key = value`` files, and the two paper presets.

Keys are dotted field paths of :class:`ExperimentConfig`, e.g.
``det_A.efficiency = 0.15`` or ``geometry.pos_B = 10000, 0, 0``. Omitted keys
take the ``spacelike-paper`` preset values. Per-component ``seed`` fields are
not configurable: every random stage derives its generator from
``master_seed`` (see :mod:`antibunch.seeding`).
"""
from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, field, replace

from . import calibration as cal
from .coincidence import AnalysisSpec, WindowSpec
from .detection import DetectorParams
from .errors import ConfigError, InvalidParameter
from .geometry import DEFAULT_GROUP_INDEX, DEFAULT_TIMING_UNCERTAINTY_PS, certify_separation, fiber_delay
from .optics import PathParams, SplitterParams
from .source import SourceParams


@dataclass(frozen=True)
class SourceConfig:
    pair_rate: float = 47_363.0


@dataclass(frozen=True)
class GeometryConfig:
    pos_A: tuple = (0, 0, 0)  # mm
    pos_B: tuple = (10_000, 0, 0)
    fiber_A: int = 12_000  # mm of fiber from the splitter to the detector
    fiber_B: int = 12_000
    group_index: float = DEFAULT_GROUP_INDEX
    timing_uncertainty: int = DEFAULT_TIMING_UNCERTAINTY_PS


@dataclass(frozen=True)
class WindowConfig:
    center_delay: int | None = None  # None: derived from the arm delays
    width: int = 1000


@dataclass(frozen=True)
class AnalysisConfig:
    bin_width: int = 50
    hist_half_range: int = 50_000
    noise_exclusion: int = 5_000


@dataclass(frozen=True)
class ExperimentConfig:
    source: SourceConfig = field(default_factory=SourceConfig)
    coupling: PathParams = field(default_factory=lambda: PathParams(0.35))
    splitter: SplitterParams = field(default_factory=SplitterParams)
    arm_H: PathParams = field(default_factory=PathParams)
    arm_A: PathParams = field(default_factory=PathParams)
    arm_B: PathParams = field(default_factory=PathParams)
    det_H: DetectorParams = field(default_factory=DetectorParams)
    det_A: DetectorParams = field(default_factory=DetectorParams)
    det_B: DetectorParams = field(default_factory=DetectorParams)
    tdc_resolution: int = 50
    window_HA: WindowConfig = field(default_factory=WindowConfig)
    window_HB: WindowConfig = field(default_factory=WindowConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    duration: float = 60.0
    master_seed: int = 20120405

    # arm_X.delay is extra electronic delay; fiber transit comes from geometry
    def arm_delay(self, arm):
        g = self.geometry
        if arm == "H":
            return self.arm_H.delay
        length = g.fiber_A if arm == "A" else g.fiber_B
        return fiber_delay(length, g.group_index) + getattr(self, f"arm_{arm}").delay

    def window(self, arm) -> WindowSpec:
        w = getattr(self, f"window_H{arm}")
        center = w.center_delay
        if center is None:
            center = self.arm_delay(arm) - self.arm_delay("H")
        return WindowSpec(int(center), int(w.width))

    def resolved(self):
        """Copy with derived window centres written out."""
        return replace(self,
                       window_HA=WindowConfig(self.window("A").center_delay, self.window_HA.width),
                       window_HB=WindowConfig(self.window("B").center_delay, self.window_HB.width))

    def source_params(self) -> SourceParams:
        return SourceParams(self.source.pair_rate, self.duration, self.master_seed)

    def analysis_spec(self) -> AnalysisSpec:
        cert = certify_separation(self)
        a = self.analysis
        return AnalysisSpec(self.window("A"), self.window("B"), bin_width=a.bin_width,
                            hist_half_range=a.hist_half_range, noise_exclusion=a.noise_exclusion,
                            separation=cert.label)

    def digest(self) -> str:
        return hashlib.sha256(dump_config(self.resolved()).encode()).hexdigest()[:16]


def _flat_fields(obj, prefix=""):
    for f in dataclasses.fields(obj):
        if f.name == "seed" and prefix:
            continue
        value = getattr(obj, f.name)
        key = prefix + f.name
        if dataclasses.is_dataclass(value):
            yield from _flat_fields(value, key + ".")
        else:
            yield key, value


def _format(value):
    if value is None:
        return "auto"
    if isinstance(value, tuple):
        return ", ".join(str(v) for v in value)
    return repr(value)


def dump_config(cfg: ExperimentConfig) -> str:
    return "".join(f"{k} = {_format(v)}\n" for k, v in _flat_fields(cfg))


def _parse_int(text):
    try:
        return int(text.replace("_", ""))
    except ValueError:
        x = float(text)
        if not x.is_integer():
            raise ValueError(f"expected an integer, got {text!r}") from None
        return int(x)


def _parse(key, text, default):
    text = text.strip()
    if key.endswith("center_delay"):
        return None if text.lower() == "auto" else _parse_int(text)
    if isinstance(default, bool):
        raise ValueError("boolean fields are not supported")
    if isinstance(default, int):
        return _parse_int(text)
    if isinstance(default, float):
        return float(text)
    if isinstance(default, tuple):
        parts = [p for p in text.replace("(", "").replace(")", "").split(",") if p.strip()]
        if len(parts) != len(default):
            raise ValueError(f"expected {len(default)} comma-separated values")
        return tuple(_parse_int(p) for p in parts)
    return text


def _set(obj, path, value):
    head, _, rest = path.partition(".")
    if not rest:
        return replace(obj, **{head: value})
    return replace(obj, **{head: _set(getattr(obj, head), rest, value)})


def validate(cfg: ExperimentConfig):
    if not cfg.duration > 0:
        raise ConfigError("must be > 0", key="duration")
    if not cfg.source.pair_rate >= 0:
        raise ConfigError("must be >= 0", key="source.pair_rate")
    checks = []
    for name in ("coupling", "arm_H", "arm_A", "arm_B", "splitter", "det_H", "det_A", "det_B"):
        checks.append((name, getattr(cfg, name).validate))
    for key, check in checks:
        try:
            check()
        except InvalidParameter as exc:
            raise ConfigError(str(exc), key=key) from None
    if cfg.tdc_resolution <= 0:
        raise ConfigError("must be > 0", key="tdc_resolution")
    for k in ("window_HA", "window_HB"):
        if getattr(cfg, k).width <= 0:
            raise ConfigError("must be > 0", key=f"{k}.width")
    g = cfg.geometry
    if g.fiber_A < 0 or g.fiber_B < 0:
        raise ConfigError("fiber lengths must be >= 0", key="geometry")
    if not g.group_index >= 1:
        raise ConfigError("must be >= 1", key="geometry.group_index")
    a = cfg.analysis
    if a.bin_width <= 0 or a.hist_half_range <= 0:
        raise ConfigError("histogram bin width and range must be > 0", key="analysis")
    if not 0 < a.noise_exclusion < a.hist_half_range:
        raise ConfigError("must lie inside the histogram half range", key="analysis.noise_exclusion")
    if not 0 <= cfg.master_seed < 2**64:
        raise ConfigError("must be a 64-bit unsigned integer", key="master_seed")
    return cfg


def parse_config(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    cfg = preset("spacelike-paper") if base is None else base
    defaults = dict(_flat_fields(cfg))
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"line {lineno}: expected 'key = value'", key=key or None)
        if key not in defaults:
            raise ConfigError("unknown key", key=key)
        if key in seen:
            raise ConfigError("duplicate key", key=key)
        seen.add(key)
        try:
            cfg = _set(cfg, key, _parse(key, value, defaults[key]))
        except ValueError as exc:
            raise ConfigError(str(exc), key=key) from None
    return validate(cfg)


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as f:
            text = f.read()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    return parse_config(text)


def _paper_config(block: str) -> ExperimentConfig:
    t = cal.TABLE1[block]
    res, width = 50, 1000
    coupling, split, herald_eff = 0.35, 0.5, 0.56
    # quoted detector jitters read as FWHM
    jit_h, jit_x = cal.fwhm_to_sigma(1200), cal.fwhm_to_sigma(400)
    capture = cal.window_capture(cal.delay_sigma(jit_h, jit_x, res), width)
    p_noise = cal.TABLE1["SL"]["R_HN"] / cal.TABLE1["SL"]["R_H(N)"]
    # detector efficiency fixed by the spacelike arm A (arm_A transmission 1 there)
    sl = cal.TABLE1["SL"]
    det_eff = cal.signal_efficiency(sl["R_HA"] / sl["R_H(A)"], p_noise, coupling, split, capture)
    arm_a = cal.signal_efficiency(t["R_HA"] / t["R_H(A)"], p_noise, coupling, split, capture) / det_eff
    arm_b = cal.signal_efficiency(t["R_HB"] / t["R_H(B)"], p_noise, coupling, split, capture) / det_eff
    pair_rate = cal.herald_pair_rate(block, coupling, herald_eff)
    singles = [pair_rate * coupling * split * arm * det_eff for arm in (arm_a, arm_b)]
    dark = cal.dark_rate_for(p_noise, width, sum(singles) / 2)
    if block == "SL":
        geo = GeometryConfig(fiber_A=12_000, fiber_B=12_000)
    else:
        # the 10 m loop moved from arm A to arm B
        geo = GeometryConfig(fiber_A=2_000, fiber_B=22_000)
    return ExperimentConfig(
        source=SourceConfig(round(pair_rate, 1)),
        coupling=PathParams(coupling),
        splitter=SplitterParams(split),
        arm_H=PathParams(1.0, 0),
        arm_A=PathParams(round(arm_a, 4), 0),
        arm_B=PathParams(round(arm_b, 4), 0),
        det_H=DetectorParams(herald_eff, round(jit_h, 1), 0.0, 0),
        det_A=DetectorParams(round(det_eff, 4), round(jit_x, 1), round(dark, -1), 0),
        det_B=DetectorParams(round(det_eff, 4), round(jit_x, 1), round(dark, -1), 0),
        tdc_resolution=res,
        window_HA=WindowConfig(None, width),
        window_HB=WindowConfig(None, width),
        geometry=geo,
    )


PRESETS = {"spacelike-paper": "SL", "timelike-paper": "TL"}


def preset(name: str) -> ExperimentConfig:
    try:
        block = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}",
                          key="preset") from None
    return _paper_config(block)
