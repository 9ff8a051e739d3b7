"""Temporal voxel grids, stream-to-stream distance and summary statistics."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from adv2e.errors import DimensionMismatch, InvalidWindow
from adv2e.types import EventStream

DEFAULT_BINS = 5


@dataclass
class VoxelGrid:
    """Polarity-signed event mass in ``bins`` temporal slices.

    ``values`` has shape ``(bins, height, width)``. ``dropped`` counts the
    events that fell outside ``[t_start, t_end]``.
    """

    values: np.ndarray
    t_start: float
    t_end: float
    dropped: int = 0

    @property
    def bins(self) -> int:
        return self.values.shape[0]

    @property
    def height(self) -> int:
        return self.values.shape[1]

    @property
    def width(self) -> int:
        return self.values.shape[2]


def build_voxel_grid(stream: EventStream, bins: int = DEFAULT_BINS,
                     t_start: float | None = None, t_end: float | None = None) -> VoxelGrid:
    """Accumulate ``stream`` into a voxel grid with linear temporal splitting.

    An event at normalized time ``tau = (t - t_start) / (t_end - t_start) * (bins - 1)``
    adds ``p * (1 - frac(tau))`` to bin ``floor(tau)`` and ``p * frac(tau)``
    to the next bin. The window defaults to the stream's own time span.
    """
    if isinstance(bins, bool) or not isinstance(bins, (int, np.integer)) or bins < 1:
        raise ValueError(f"bins must be a positive integer, got {bins!r}")
    t = stream.t
    if t_start is None:
        t_start = float(t.min()) if len(t) else 0.0
    if t_end is None:
        t_end = float(t.max()) if len(t) else 1.0
    if not t_end > t_start:
        raise InvalidWindow(f"window end {t_end} must be after start {t_start}")

    values = np.zeros((bins, stream.height, stream.width), dtype=np.float64)
    inside = (t >= t_start) & (t <= t_end)
    dropped = int(len(t) - np.count_nonzero(inside))
    ev = stream.events[inside]
    if len(ev):
        tau = (ev["t"] - t_start) / (t_end - t_start) * (bins - 1)
        left = np.minimum(np.floor(tau).astype(np.int64), bins - 1)
        frac = tau - left
        p = ev["p"].astype(np.float64)
        x = ev["x"].astype(np.int64)
        y = ev["y"].astype(np.int64)
        np.add.at(values, (left, y, x), p * (1.0 - frac))
        right = left + 1
        ok = right < bins
        np.add.at(values, (right[ok], y[ok], x[ok]), (p * frac)[ok])
    return VoxelGrid(values, float(t_start), float(t_end), dropped)


def voxel_distance(a: VoxelGrid, b: VoxelGrid) -> float:
    """Euclidean (Frobenius) distance between two grids of the same shape and window."""
    if a.values.shape != b.values.shape:
        raise DimensionMismatch(f"grid shapes differ: {a.values.shape} vs {b.values.shape}")
    if (a.t_start, a.t_end) != (b.t_start, b.t_end):
        raise DimensionMismatch(f"grid windows differ: {(a.t_start, a.t_end)} vs {(b.t_start, b.t_end)}")
    return float(np.sqrt(np.sum((a.values - b.values) ** 2)))


@dataclass
class StatsReport:
    count: int
    positive: int
    negative: int
    duration: float
    mean_rate: float
    max_pixel_rate: float
    outside_window: int = 0
    iei_bin_edges: list = field(default_factory=list)
    iei_counts: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def stream_stats(stream: EventStream, t_start: float | None = None,
                 t_end: float | None = None, iei_bins: int = 20) -> StatsReport:
    """Counts, rates and a log-spaced per-pixel inter-event interval histogram.

    Rates are over ``[t_start, t_end]`` when given, otherwise over the span
    from the first to the last event.
    """
    ev = stream.events
    outside = 0
    if t_start is not None and t_end is not None:
        if not t_end > t_start:
            raise InvalidWindow(f"window end {t_end} must be after start {t_start}")
        keep = (ev["t"] >= t_start) & (ev["t"] <= t_end)
        outside = int(len(ev) - np.count_nonzero(keep))
        ev = ev[keep]
        duration = t_end - t_start
    else:
        duration = float(ev["t"].max() - ev["t"].min()) if len(ev) else 0.0

    n = len(ev)
    n_pos = int(np.count_nonzero(ev["p"] > 0))
    mean_rate = n / duration if duration > 0 else 0.0
    max_pixel_rate = 0.0
    edges, counts = [], []
    if n:
        pix = ev["y"].astype(np.int64) * stream.width + ev["x"]
        if duration > 0:
            max_pixel_rate = float(np.bincount(pix).max() / duration)
        order = np.lexsort((ev["t"], pix))
        same = pix[order][1:] == pix[order][:-1]
        iei = np.diff(ev["t"][order])[same]
        iei = iei[iei > 0]
        if len(iei):
            lo, hi = iei.min(), iei.max()
            if hi <= lo:
                hi = lo * 10
            bin_edges = np.logspace(np.log10(lo), np.log10(hi), iei_bins + 1)
            hist, bin_edges = np.histogram(iei, bins=bin_edges)
            edges, counts = bin_edges.tolist(), hist.tolist()
    return StatsReport(count=n, positive=n_pos, negative=n - n_pos, duration=duration,
                       mean_rate=mean_rate, max_pixel_rate=max_pixel_rate,
                       outside_window=outside, iei_bin_edges=edges, iei_counts=counts)
