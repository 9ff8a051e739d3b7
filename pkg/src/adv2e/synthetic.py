"""Small synthetic frame sequences for demos and tests."""
from __future__ import annotations

import numpy as np

from adv2e.ingestion import FrameSource
from adv2e.types import I_MAX


def frame_times(n_frames: int, fps: float) -> np.ndarray:
    return np.arange(n_frames) / fps


def constant_clip(value=100.0, shape=(48, 64), n_frames=3, fps=24.0) -> FrameSource:
    return FrameSource.from_arrays([np.full(shape, float(value))] * n_frames,
                                   frame_times(n_frames, fps))


def sinusoid_clip(shape=(48, 64), fps=24.0, n_frames=25, freq=1.0, mean=128.0,
                  amplitude=100.0) -> FrameSource:
    """Every pixel oscillates at ``freq`` Hz with a phase that ramps across the image."""
    h, w = shape
    yy, xx = np.mgrid[0:h, 0:w]
    phase = 2 * np.pi * (xx / w + yy / h)
    ts = frame_times(n_frames, fps)
    return FrameSource.from_arrays(
        [mean + amplitude * np.sin(2 * np.pi * freq * t + phase) for t in ts], ts)


def step_clip(before, after, n_before=3, n_after=5, fps=24.0) -> FrameSource:
    """Frames hold ``before`` then jump to ``after``.

    ``before`` and ``after`` are scalars or equal-shaped arrays; scalars make
    a 1x1 clip. The jump is spread over one frame interval by any later
    interpolation.
    """
    before = np.atleast_2d(np.asarray(before, dtype=np.float64))
    after = np.broadcast_to(np.asarray(after, dtype=np.float64), before.shape)
    arrays = [before] * n_before + [after] * n_after
    return FrameSource.from_arrays(arrays, frame_times(len(arrays), fps))


def random_walk_clip(shape=(24, 32), n_frames=20, fps=30.0, step=0.15, seed=0) -> FrameSource:
    """Per-pixel random walk in log intensity, kept inside [1, I_MAX]."""
    rng = np.random.default_rng(seed)
    log_i = np.log(rng.uniform(20, 200, size=shape))
    arrays = []
    for _ in range(n_frames):
        arrays.append(np.exp(log_i))
        log_i = np.clip(log_i + rng.normal(0, step, size=shape), 0.0, np.log(I_MAX))
    return FrameSource.from_arrays(arrays, frame_times(n_frames, fps))


def moving_edge_clip(shape=(48, 64), n_frames=12, fps=24.0, speed=60.0, low=20.0,
                     high=220.0) -> FrameSource:
    """A bright vertical bar sliding right at ``speed`` pixels per second."""
    h, w = shape
    xx = np.arange(w)[None, :].repeat(h, axis=0)
    ts = frame_times(n_frames, fps)
    arrays = []
    for t in ts:
        left = 8 + speed * t
        arrays.append(np.where((xx >= left) & (xx < left + 10), high, low).astype(np.float64))
    return FrameSource.from_arrays(arrays, ts)
