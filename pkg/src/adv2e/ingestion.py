"""Frame sequence loading and linear frame interpolation.

A sequence on disk is described by a plain-text manifest with one
``<relative-frame-path> <timestamp-seconds>`` record per line; ``#``
starts a comment. Frames may be 8-bit grayscale/RGB PNG or binary PGM.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from PIL import Image

from adv2e.errors import (GeometryMismatch, InvalidFactor, ManifestError, MissingFile,
                          NonMonotonicTimestamps)
from adv2e.types import Frame

LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])


@dataclass
class FrameSource:
    """An ordered sequence of at least two equally sized frames."""

    frames: list

    def __post_init__(self):
        self.frames = list(self.frames)
        if len(self.frames) < 2:
            raise ManifestError(f"need at least 2 frames, got {len(self.frames)}")
        shapes = {f.data.shape for f in self.frames}
        if len(shapes) > 1:
            raise GeometryMismatch(f"frames have differing shapes {sorted(shapes)}")
        ts = self.timestamps
        if np.any(np.diff(ts) <= 0):
            raise NonMonotonicTimestamps(f"timestamps not strictly increasing: {ts.tolist()}")

    @classmethod
    def from_arrays(cls, arrays, timestamps) -> "FrameSource":
        return cls([Frame(a, float(t)) for a, t in zip(arrays, timestamps, strict=True)])

    def __len__(self):
        return len(self.frames)

    @property
    def timestamps(self) -> np.ndarray:
        return np.array([f.timestamp for f in self.frames], dtype=np.float64)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    @property
    def base_interval(self) -> float:
        """Mean frame interval T_b in seconds."""
        ts = self.timestamps
        return float((ts[-1] - ts[0]) / (len(ts) - 1))

    @property
    def base_rate(self) -> float:
        return 1.0 / self.base_interval

    def stack(self) -> np.ndarray:
        return np.stack([f.data for f in self.frames])


def read_frame_image(path) -> np.ndarray:
    """Read a PNG or PGM file as float64 luma in [0, 255]."""
    if not os.path.exists(path):
        raise MissingFile(f"frame file not found: {path}")
    with Image.open(path) as im:
        if im.mode in ("RGB", "RGBA", "P", "LA"):
            rgb = np.asarray(im.convert("RGB"), dtype=np.float64)
            return rgb @ LUMA_WEIGHTS
        if im.mode != "L":
            raise ValueError(f"{path}: unsupported image mode {im.mode!r}, expected 8-bit")
        return np.asarray(im, dtype=np.float64)


def parse_manifest(text: str):
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.rsplit(None, 1)
        if len(parts) != 2:
            raise ManifestError(f"manifest line {lineno}: expected '<path> <timestamp>'")
        try:
            t = float(parts[1])
        except ValueError:
            raise ManifestError(f"manifest line {lineno}: bad timestamp {parts[1]!r}") from None
        records.append((parts[0], t))
    return records


def load_sequence(manifest_path, workers: int = 1) -> FrameSource:
    """Load the frames listed in a manifest, sorted by timestamp.

    Raises :class:`MissingFile`, :class:`GeometryMismatch` or
    :class:`NonMonotonicTimestamps` (duplicate timestamps).
    """
    if not os.path.exists(manifest_path):
        raise MissingFile(f"manifest not found: {manifest_path}")
    with open(manifest_path, encoding="utf-8") as fh:
        records = parse_manifest(fh.read())
    base = os.path.dirname(os.path.abspath(manifest_path))
    records.sort(key=lambda r: r[1])
    paths = [os.path.join(base, p) for p, _ in records]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            images = list(pool.map(read_frame_image, paths))
    else:
        images = [read_frame_image(p) for p in paths]
    return FrameSource([Frame(img, t) for img, (_, t) in zip(images, records)])


def write_sequence(src: FrameSource, directory, manifest_name="frames.txt") -> str:
    """Write ``src`` as 8-bit PGM files plus a manifest; returns the manifest path.

    Intensities are rounded to the nearest integer.
    """
    os.makedirs(directory, exist_ok=True)
    lines = []
    width = len(str(len(src) - 1))
    for i, f in enumerate(src.frames):
        name = f"frame_{i:0{width}d}.pgm"
        img = np.clip(np.rint(f.data), 0, 255).astype(np.uint8)
        Image.fromarray(img, mode="L").save(os.path.join(directory, name))
        lines.append(f"{name} {f.timestamp!r}")
    path = os.path.join(directory, manifest_name)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return path


def interpolate_linear(src: FrameSource, L: int) -> FrameSource:
    """Insert ``L - 1`` linearly blended frames between each adjacent pair.

    Returns ``(N - 1) * L + 1`` frames; the originals appear unchanged at
    ``l = 0`` and the last input frame closes the sequence.
    """
    if isinstance(L, bool) or not isinstance(L, (int, np.integer)) or L < 1:
        raise InvalidFactor(f"interpolation factor must be an integer >= 1, got {L!r}")
    if L == 1:
        return FrameSource(list(src.frames))
    out = []
    for a, b in zip(src.frames[:-1], src.frames[1:]):
        dt = b.timestamp - a.timestamp
        diff = b.data - a.data
        # guards the pair's range against a one-ulp overshoot
        lo, hi = np.minimum(a.data, b.data), np.maximum(a.data, b.data)
        out.append(a)
        for l in range(1, L):
            w = l / L
            out.append(Frame(np.clip(a.data + w * diff, lo, hi), a.timestamp + w * dt))
    out.append(src.frames[-1])
    return FrameSource(out)
