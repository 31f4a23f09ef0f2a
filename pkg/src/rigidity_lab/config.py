"""Experiment configuration: `key = value` text files and shipped presets.

    # matching run
    subcommand = match
    preset = acceptance-unbounded
    trials = 50
"""

import logging
import os
from dataclasses import dataclass, fields, replace

from rigidity_lab.arith.diophantine import parse_frequency
from rigidity_lab.dynamics.roof import RoofFunction
from rigidity_lab.errors import ConfigError
from rigidity_lab.matching.criterion import COUPLINGS

log = logging.getLogger(__name__)

SUBCOMMANDS = (
    "cf", "ostrowski", "dk-audit", "flow-orbit", "trichotomy",
    "match", "lift", "coboundary", "joining",
)
MODES = ("desk-scale", "paper-faithful")
BRANCHES = ("unbounded", "bounded")
FORMATS = ("csv",)

GOLDEN = "cf:[1]"
SILVER = "cf:[2,...]"
DOUBLING = "cf:[1,2,1,4,1,8,1,16,1,32,1,64,1,128,1,256]"
ROOF_F = "jump=1.0; c0=1.0; k:1=0.0,0.1"
ROOF_G = "jump=2.0; c0=1.0; k:1=0.1,0.0"
ROOF_G_EQUAL = "jump=1.0; c0=1.0; k:1=0.1,0.0"


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment. Fields left at their defaults are not serialized."""

    subcommand: str = ""
    preset: str = ""
    alpha: str | None = None
    beta: str | None = None
    roof_f: str | None = None
    roof_g: str | None = None
    mode: str = "desk-scale"
    branch: str = "unbounded"
    epsilon: float = 0.05
    N: int = 10
    c: float | None = None
    trials: int = 200
    seed: int = 0
    horizon: float | None = None
    samples: int | None = None
    depth: int | None = None
    real: str | None = None
    n: int | None = None
    index_range: str | None = None
    max_harmonic: int | None = None
    out: str | None = None
    format: str = "csv"
    workers: int = 1
    bad_set: str = "jump-collar"
    coupling: str = "independent"
    min_match: float = 0.95
    min_lift: float = 0.90
    db: str | None = None

    def __post_init__(self):
        if self.subcommand and self.subcommand not in SUBCOMMANDS:
            raise ConfigError(f"unknown subcommand {self.subcommand!r}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if self.branch not in BRANCHES:
            raise ConfigError(f"branch must be one of {', '.join(BRANCHES)}, got {self.branch!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"unsupported output format {self.format!r}")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if self.trials < 0 or self.workers < 1:
            raise ConfigError("trials must be >= 0 and workers >= 1")
        if self.coupling not in COUPLINGS:
            raise ConfigError(f"coupling must be one of {', '.join(COUPLINGS)}, got {self.coupling!r}")
        if not (0.0 <= self.min_match <= 1.0 and 0.0 <= self.min_lift <= 1.0):
            raise ConfigError("min_match and min_lift are rates in [0, 1]")

    def serialize(self):
        """Text form; parse(cfg.serialize()) == cfg."""
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value == f.default:
                continue
            lines.append(f"{f.name} = {_format(value)}")
        return "\n".join(lines) + "\n"

    def with_overrides(self, **overrides):
        """Copy with every override that is not None applied."""
        given = {k: v for k, v in overrides.items() if v is not None}
        if not given:
            return self
        try:
            return replace(self, **given)
        except TypeError as e:
            raise ConfigError(str(e)) from e

    def frequency(self, key):
        text = getattr(self, key)
        if text is None:
            raise ConfigError(f"{key} is not set")
        try:
            return parse_frequency(text)
        except ValueError as e:
            raise ConfigError(f"{key}: {e}") from e

    def roof(self, key):
        text = getattr(self, key)
        if text is None:
            raise ConfigError(f"{key} is not set")
        try:
            return RoofFunction.from_text(text)
        except ValueError as e:
            raise ConfigError(f"{key}: {e}") from e

    def index_bounds(self):
        """index_range `a:b` as the inclusive pair (a, b)."""
        if self.index_range is None:
            return None
        lo, sep, hi = self.index_range.partition(":")
        try:
            if not sep:
                raise ValueError("expected a:b")
            a, b = int(lo), int(hi)
        except ValueError as e:
            raise ConfigError(f"index_range {self.index_range!r}: {e}") from e
        if not 1 <= a <= b:
            raise ConfigError(f"index_range {self.index_range!r} is empty")
        return a, b


def _format(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


_FIELDS = {f.name: f for f in fields(ExperimentConfig)}
_INT_KEYS = {"N", "trials", "seed", "samples", "depth", "n", "max_harmonic", "workers"}
_FLOAT_KEYS = {"epsilon", "c", "horizon", "min_match", "min_lift"}


def _convert(key, raw):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError as e:
        raise ConfigError(f"{key}: {e}") from e
    return raw


def parse(text):
    """Parse `key = value` lines; `#` starts a comment."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            log.warning("Config key %s set twice, keeping line %d", key, lineno)
        values[key] = _convert(key, value)
    if not values:
        raise ConfigError("configuration is empty")
    return ExperimentConfig(**values)


def load(path):
    """Read and parse a configuration file."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path) as f:
        return parse(f.read())


PRESETS = {
    "acceptance-unbounded": ExperimentConfig(
        subcommand="match",
        preset="acceptance-unbounded",
        alpha=DOUBLING,
        beta=GOLDEN,
        roof_f=ROOF_F,
        roof_g=ROOF_G,
        mode="desk-scale",
        branch="unbounded",
        epsilon=0.05,
        c=0.05,
        trials=200,
    ),
    "acceptance-bounded": ExperimentConfig(
        subcommand="match",
        preset="acceptance-bounded",
        alpha=SILVER,
        beta=GOLDEN,
        roof_f=ROOF_F,
        roof_g=ROOF_G,
        mode="desk-scale",
        branch="bounded",
        epsilon=0.05,
        c=0.05,
        trials=200,
    ),
    "contrast-equal-jumps-match": ExperimentConfig(
        subcommand="match",
        preset="contrast-equal-jumps-match",
        alpha=DOUBLING,
        beta=DOUBLING,
        roof_f=ROOF_F,
        roof_g=ROOF_F,
        mode="desk-scale",
        branch="unbounded",
        epsilon=0.05,
        c=0.05,
        coupling="diagonal",
        trials=50,
    ),
    "contrast-equal-jumps": ExperimentConfig(
        subcommand="joining",
        preset="contrast-equal-jumps",
        alpha=GOLDEN,
        beta=GOLDEN,
        roof_f=ROOF_F,
        roof_g=ROOF_G_EQUAL,
        horizon=1e5,
        samples=20,
        max_harmonic=64,
    ),
}


def preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r} (known: {', '.join(sorted(PRESETS))})"
        ) from None


def resolve(config):
    """Overlay a config onto its named preset, if any."""
    if not config.preset:
        return config
    base = preset(config.preset)
    overrides = {
        f.name: getattr(config, f.name)
        for f in fields(config)
        if getattr(config, f.name) != f.default
    }
    return replace(base, **overrides)
