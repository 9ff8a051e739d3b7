"""Domain types: frames, events, simulator configuration and pixel state."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from adv2e.errors import InvalidConfig

I_MAX = 255.0

FILTER_MODES = ("none", "fixed", "adv2e")
CONTINUITY_BRANCHES = ("interpolate", "printed")

# one row per event; t in seconds, p in {-1, +1}
EVENT_DTYPE = np.dtype([("t", "<f8"), ("x", "<u2"), ("y", "<u2"), ("p", "i1")])


@dataclass
class Frame:
    """A single-channel linear intensity image.

    ``data`` has shape ``(height, width)`` and values in ``[0, I_MAX]``.
    """

    data: np.ndarray
    timestamp: float

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2:
            raise ValueError(f"frame data must be 2-D, got shape {self.data.shape}")
        if not math.isfinite(self.timestamp) or self.timestamp < 0:
            raise ValueError(f"frame timestamp must be finite and >= 0, got {self.timestamp}")
        if not np.all(np.isfinite(self.data)) or np.any(self.data < 0):
            raise ValueError("frame intensities must be finite and >= 0")

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class Event:
    x: int
    y: int
    t: float
    p: int


def empty_events(n: int = 0) -> np.ndarray:
    return np.zeros(n, dtype=EVENT_DTYPE)


@dataclass
class EventStream:
    """Events from a ``width`` x ``height`` sensor, held as a structured array.

    The array uses :data:`EVENT_DTYPE`. Call :meth:`sorted` to get the
    canonical ordering (t, then y, x, p).
    """

    width: int
    height: int
    events: np.ndarray = field(default_factory=empty_events)

    def __post_init__(self):
        self.events = np.asarray(self.events, dtype=EVENT_DTYPE)

    @classmethod
    def from_events(cls, width: int, height: int, events: Iterable[Event]) -> "EventStream":
        rows = [(e.t, e.x, e.y, e.p) for e in events]
        return cls(width, height, np.array(rows, dtype=EVENT_DTYPE))

    @classmethod
    def concatenate(cls, width: int, height: int, parts) -> "EventStream":
        parts = [np.asarray(p, dtype=EVENT_DTYPE) for p in parts]
        arr = np.concatenate(parts) if parts else empty_events()
        return cls(width, height, arr)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        for t, x, y, p in self.events.tolist():
            yield Event(x=x, y=y, t=t, p=p)

    def __eq__(self, other):
        if not isinstance(other, EventStream):
            return NotImplemented
        return (self.width == other.width and self.height == other.height
                and np.array_equal(self.events, other.events))

    @property
    def t(self) -> np.ndarray:
        return self.events["t"]

    @property
    def x(self) -> np.ndarray:
        return self.events["x"]

    @property
    def y(self) -> np.ndarray:
        return self.events["y"]

    @property
    def p(self) -> np.ndarray:
        return self.events["p"]

    def sorted(self) -> "EventStream":
        ev = self.events
        order = np.lexsort((ev["p"], ev["x"], ev["y"], ev["t"]))
        return EventStream(self.width, self.height, ev[order])

    def is_sorted(self) -> bool:
        return np.array_equal(self.sorted().events, self.events)

    def check(self):
        """Raise ``ValueError`` if any event breaks the sensor bounds or polarity rules."""
        ev = self.events
        if len(ev) == 0:
            return
        if np.any(ev["x"] >= self.width) or np.any(ev["y"] >= self.height):
            raise ValueError("event coordinates outside the sensor")
        if not np.all(np.isin(ev["p"], (-1, 1))):
            raise ValueError("event polarity must be -1 or +1")
        if not np.all(np.isfinite(ev["t"])) or np.any(ev["t"] < 0):
            raise ValueError("event timestamps must be finite and >= 0")

    def tobytes(self) -> bytes:
        return self.events.tobytes()


@dataclass(frozen=True)
class SimConfig:
    """Simulator tunables. Field names double as the JSON config keys.

    Thresholds are in natural-log intensity units, rates in Hz.
    ``cutoff_max`` is the filter cutoff reached at full-scale intensity.
    """

    pos_threshold: float = 0.2
    neg_threshold: float = 0.2
    interp_factor: int = 10
    oversample_factor: int = 10
    cutoff_max: float = 250.0
    cutoff_floor_ratio: float = 0.01
    filter_mode: str = "adv2e"
    leak_rate: float = 0.1
    shot_noise_rate: float = 0.0
    rng_seed: int = 0
    log_eps: float = 1.0
    continuity_branch: str = "interpolate"
    gain_normalized: bool = True

    def replace(self, **changes) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "SimConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise InvalidConfig([f"unknown config key {k!r}" for k in unknown])
        return cls(**d)


def _is_int(v) -> bool:
    return isinstance(v, (int, np.integer)) and not isinstance(v, bool)


def _is_real(v) -> bool:
    return isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)


def validate_config(cfg: SimConfig) -> SimConfig:
    """Return ``cfg`` unchanged if it is valid, else raise :class:`InvalidConfig`
    listing every violated constraint."""
    v = []

    def positive(name, label):
        val = getattr(cfg, name)
        if not _is_real(val) or not math.isfinite(val) or val <= 0:
            v.append(f"{label} > 0")

    def non_negative(name, label):
        val = getattr(cfg, name)
        if not _is_real(val) or not math.isfinite(val) or val < 0:
            v.append(f"{label} ≥ 0")

    positive("pos_threshold", "C_pos")
    positive("neg_threshold", "C_neg")
    for name, label in (("interp_factor", "L"), ("oversample_factor", "K")):
        val = getattr(cfg, name)
        if not _is_int(val) or val < 1:
            v.append(f"{label} ≥ 1")
    positive("cutoff_max", "f_max")
    r = cfg.cutoff_floor_ratio
    if not _is_real(r) or not (0 < r <= 1):
        v.append("0 < cutoff_floor_ratio ≤ 1")
    if cfg.filter_mode not in FILTER_MODES:
        v.append(f"filter_mode in {FILTER_MODES}")
    non_negative("leak_rate", "leak_rate")
    non_negative("shot_noise_rate", "shot_noise_rate")
    if not _is_int(cfg.rng_seed) or not (-(2**63) <= cfg.rng_seed < 2**64):
        v.append("rng_seed is a 64-bit integer")
    positive("log_eps", "log_eps")
    if not isinstance(cfg.gain_normalized, bool):
        v.append("gain_normalized is a boolean")
    if cfg.continuity_branch not in CONTINUITY_BRANCHES:
        v.append(f"continuity_branch in {CONTINUITY_BRANCHES}")
    if v:
        raise InvalidConfig(v)
    return cfg


@dataclass
class PixelState:
    """Per-pixel filter output ``y`` and the log level ``mem`` memorized at
    each pixel's last event. Arrays share the sensor shape."""

    y: np.ndarray | None = None
    mem: np.ndarray | None = None

    @property
    def initialized(self) -> bool:
        return self.y is not None

    def initialize(self, y0: np.ndarray, mem0: np.ndarray | None = None):
        self.y = np.array(y0, dtype=np.float64)
        self.mem = np.array(self.y if mem0 is None else mem0, dtype=np.float64)
