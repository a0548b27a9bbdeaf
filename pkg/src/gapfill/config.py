"""Experiment configuration and its INI file form.

Sections mirror the module configs::

    [gabor]       win_len, hop, M
    [learn]       iter_max, band_d, rho_start, eps
    [neighborhood] context_frames, per_gap
    [solver]      tau, sigma, tol_eps, max_iters, min_iters
    [janssen]     window_len, hop, iterations
    [experiment]  gap_ms, num_gaps, seeds, algos, guard_ms

List values are comma separated.
"""
from __future__ import annotations

import configparser
import hashlib
import io
import json
from dataclasses import asdict, dataclass, field, fields, replace

from .dictlearn import LearnConfig
from .errors import InvalidArgument
from .janssen import JanssenConfig
from .solver import SolverConfig

ALGORITHMS = ("cp", "cp-learned", "janssen", "zero-fill")
DESK_GAPS_MS = (5.0, 15.0, 25.0, 35.0, 45.0, 55.0)
PAPER_GAPS_MS = (5.0, 15.0, 25.0, 35.0, 45.0, 55.0, 65.0, 75.0, 85.0)


@dataclass(frozen=True)
class GaborConfig:
    win_len: int = 2800
    hop: int = 700
    M: int = 2800


@dataclass(frozen=True)
class NeighborhoodConfig:
    context_frames: int = 20
    per_gap: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    gap_ms: tuple[float, ...] = DESK_GAPS_MS
    num_gaps: int = 5
    seeds: tuple[int, ...] = (0, 1, 2)
    algos: tuple[str, ...] = ("cp", "cp-learned")
    guard_ms: float = 200.0
    gabor: GaborConfig = field(default_factory=GaborConfig)
    learn: LearnConfig = field(default_factory=LearnConfig)
    neighborhood: NeighborhoodConfig = field(default_factory=NeighborhoodConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    janssen: JanssenConfig = field(default_factory=JanssenConfig)

    def __post_init__(self):
        bad = [a for a in self.algos if a not in ALGORITHMS]
        if bad:
            raise InvalidArgument(f"unknown algorithm(s) {bad}; choose from {ALGORITHMS}")

    @classmethod
    def paper_defaults(cls) -> "ExperimentConfig":
        return cls(gap_ms=PAPER_GAPS_MS, algos=ALGORITHMS)

    def config_hash(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True, default=list)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


_SECTIONS = {
    "gabor": ("gabor", GaborConfig),
    "learn": ("learn", LearnConfig),
    "neighborhood": ("neighborhood", NeighborhoodConfig),
    "solver": ("solver", SolverConfig),
    "janssen": ("janssen", JanssenConfig),
}


def _coerce(value: str, like):
    if isinstance(like, bool):
        return value.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(like, tuple):
        item = type(like[0]) if like else str
        return tuple(item(v.strip()) for v in value.split(",") if v.strip())
    return type(like)(value)


def _update(obj, items: dict, section: str):
    known = {f.name: getattr(obj, f.name) for f in fields(obj)}
    changes = {}
    for key, value in items.items():
        if key not in known:
            raise InvalidArgument(f"[{section}] unknown key {key!r}")
        try:
            changes[key] = _coerce(value, known[key])
        except ValueError as exc:
            raise InvalidArgument(f"[{section}] {key}: {exc}") from exc
    return replace(obj, **changes)


def _parser() -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keys are case sensitive (gabor.M)
    return parser


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    parser = _parser()
    if not parser.read(path):
        raise InvalidArgument(f"cannot read config file {path}")
    cfg = base or ExperimentConfig()
    sub = {}
    for section in parser.sections():
        items = dict(parser[section])
        if section == "experiment":
            cfg = _update(cfg, items, section)
        elif section in _SECTIONS:
            attr, _ = _SECTIONS[section]
            sub[attr] = _update(getattr(cfg, attr), items, section)
        else:
            raise InvalidArgument(f"unknown config section [{section}]")
    return replace(cfg, **sub)


def dump_config(cfg: ExperimentConfig) -> str:
    """INI text that :func:`load_config` reads back to ``cfg``."""
    parser = _parser()

    def fmt(v):
        return ", ".join(map(str, v)) if isinstance(v, tuple) else str(v)

    parser["experiment"] = {f.name: fmt(getattr(cfg, f.name)) for f in fields(cfg)
                            if f.name not in _SECTIONS}
    for name in _SECTIONS:
        sub = getattr(cfg, name)
        parser[name] = {f.name: fmt(getattr(sub, f.name)) for f in fields(sub)}
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()
