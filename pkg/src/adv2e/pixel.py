"""DVS pixel model: log conversion, over-sampling, brightness-dependent
low-pass filtering, threshold-crossing events and sensor noise.

The filter is the impulse-invariant discretization of a first-order
low-pass ``w0 / (s + w0)``::

    Y <- exp(-alpha) * Y + alpha * x,   alpha = w0 * dt

where ``w0`` follows the instantaneous linear intensity (``adv2e`` mode),
stays at its full-scale value (``fixed`` mode), or filtering is skipped
(``none`` mode).
"""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from adv2e.errors import InvalidFactor
from adv2e.ingestion import FrameSource, interpolate_linear
from adv2e.types import EVENT_DTYPE, I_MAX, EventStream, Frame, PixelState, SimConfig, \
    empty_events, validate_config

TWO_PI = 2.0 * math.pi

# beyond this the DC gain of the update, alpha / (1 - exp(-alpha)), exceeds ~1.58
ALPHA_WARN = 1.0

SHOT_NOISE_BRIGHT_FACTOR = 0.25
LEAK_JITTER = 0.1

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def log_transform(frame, log_eps: float = 1.0) -> np.ndarray:
    """``ln(I + log_eps)`` per pixel. Accepts a :class:`Frame` or an array."""
    data = frame.data if isinstance(frame, Frame) else np.asarray(frame, dtype=np.float64)
    return np.log(data + log_eps)


def continuity_sample(prev, nxt, K: int, extrapolate: bool = False) -> np.ndarray:
    """Linearly over-sample the span from ``prev`` to ``nxt`` into ``K`` samples.

    Sample ``k`` is ``prev + (nxt - prev) * k / K`` for ``k = 0 .. K-1``, so
    sample 0 is ``prev`` itself and ``nxt`` starts the following span.
    With ``extrapolate=True`` the samples are instead
    ``nxt + (nxt - prev) * k / K``, the literal form of the last-slot rule
    in the original formulation; kept only for compatibility runs.
    """
    if isinstance(K, bool) or not isinstance(K, (int, np.integer)) or K < 1:
        raise InvalidFactor(f"over-sampling factor must be an integer >= 1, got {K!r}")
    prev = np.asarray(prev, dtype=np.float64)
    nxt = np.asarray(nxt, dtype=np.float64)
    diff = nxt - prev
    start = nxt if extrapolate else prev
    k = np.arange(K, dtype=np.float64).reshape((K,) + (1,) * diff.ndim)
    return start + diff * k / K


def continuity_times(t_prev: float, t_next: float, K: int) -> np.ndarray:
    return t_prev + np.arange(K) * (t_next - t_prev) / K


def cutoff(intensity, cutoff_max: float = 250.0, floor_ratio: float = 0.01):
    """Angular cutoff frequency (rad/s) proportional to linear intensity.

    Full-scale intensity gives ``2*pi*cutoff_max``; the ratio is clamped
    below at ``floor_ratio`` so dark pixels keep a finite bandwidth.
    """
    ratio = np.maximum(np.asarray(intensity, dtype=np.float64) / I_MAX, floor_ratio)
    return TWO_PI * cutoff_max * ratio


def filter_step(y, x, alpha):
    """One low-pass update ``exp(-alpha) * y + alpha * x``."""
    return np.exp(-alpha) * y + alpha * x


def filter_gain(alpha):
    """DC gain ``alpha / (1 - exp(-alpha))`` of :func:`filter_step`."""
    alpha = np.asarray(alpha, dtype=np.float64)
    return alpha / -np.expm1(-alpha)


def filter_fixed_point(x, alpha):
    """Steady-state output of :func:`filter_step` for constant input and alpha."""
    return x * filter_gain(alpha)


class PixelRng:
    """Counter-based uniform generator keyed on (seed, x, y).

    Each pixel's draws depend only on the global seed, its coordinates, the
    step index and a stream id, so any split of the sensor into blocks
    reproduces the same numbers.
    """

    def __init__(self, seed: int, xs, ys):
        xs = np.asarray(xs, dtype=np.uint64)
        ys = np.asarray(ys, dtype=np.uint64)
        s = np.uint64(int(seed) & _MASK64)
        self.keys = _mix(_mix((ys << np.uint64(32)) | xs) ^ s)

    def uniform(self, step: int, stream: int) -> np.ndarray:
        offset = np.uint64(((step * 8 + stream + 1) * _GOLDEN) & _MASK64)
        z = _mix(self.keys + offset)
        return (z >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def _mix(z):
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def generate_events(filtered, state: PixelState, t_prev: float, t_now: float,
                    cfg: SimConfig, row_offset: int = 0) -> np.ndarray:
    """Emit threshold-crossing events for one step and advance ``state.mem``.

    A pixel whose change since its last event is ``delta`` fires
    ``floor(|delta| / C)`` events of the sign of ``delta``. Event ``j``
    is placed at ``t_prev + (t_now - t_prev) * j * C / |delta|``. The
    memorized level moves by whole thresholds only; the remainder carries
    over to later steps.

    Returns an unsorted array of :data:`EVENT_DTYPE`.
    """
    filtered = np.asarray(filtered, dtype=np.float64)
    delta = filtered - state.mem
    fire = (delta / cfg.pos_threshold >= 1.0) | (-delta / cfg.neg_threshold >= 1.0)
    if not fire.any():
        return empty_events()

    idx = np.flatnonzero(fire)
    d = delta.ravel()[idx]
    positive = d > 0
    thr = np.where(positive, cfg.pos_threshold, cfg.neg_threshold)
    counts = np.floor(np.abs(d) / thr).astype(np.int64)
    sign = np.where(positive, 1, -1)

    mem = state.mem.reshape(-1)
    mem[idx] += sign * counts * thr

    total = int(counts.sum())
    rep = np.repeat(np.arange(len(idx)), counts)
    starts = np.cumsum(counts) - counts
    j = np.arange(total) - starts[rep] + 1
    frac = np.minimum(j * thr[rep] / np.abs(d[rep]), 1.0)

    width = filtered.shape[-1]
    pix = idx[rep]
    out = np.empty(total, dtype=EVENT_DTYPE)
    out["t"] = t_prev + (t_now - t_prev) * frac
    out["x"] = pix % width
    out["y"] = pix // width + row_offset
    out["p"] = sign[rep]
    return out


class PixelNoise:
    """Per-pixel noise parameters and random source for one block of pixels.

    Each pixel's leak rate is ``leak_rate * (1 + LEAK_JITTER * N(0, 1))``,
    clipped at zero. Each leak starts at a random phase so pixels do not
    fire in lockstep.
    """

    def __init__(self, cfg: SimConfig, xs, ys, shape):
        self.rng = PixelRng(cfg.rng_seed, xs, ys)
        self.shape = shape
        self.leak_rates = None
        if cfg.leak_rate > 0:
            u1, u2 = self.rng.uniform(0, 4), self.rng.uniform(0, 5)
            normal = np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(TWO_PI * u2)
            jitter = np.maximum(1.0 + LEAK_JITTER * normal, 0.0)
            self.leak_rates = (cfg.leak_rate * jitter).reshape(shape)

    def init_state(self, state: PixelState, cfg: SimConfig):
        if self.leak_rates is not None:
            state.mem -= self.rng.uniform(0, 0).reshape(self.shape) * cfg.pos_threshold


def inject_noise(state: PixelState, intensity, t_prev: float, t_now: float, step: int,
                 cfg: SimConfig, noise: PixelNoise) -> np.ndarray:
    """Apply one step of sensor noise.

    Leak lowers each pixel's memorized level by
    ``C_pos * leak_rate * dt``. The resulting positive events are emitted
    by :func:`generate_events` alongside signal events. Shot noise is
    returned directly. It fires with probability
    ``shot_noise_rate * dt * s(I)`` per pixel per step, where ``s`` falls
    linearly from 1 at black to 0.25 at full scale. Polarity is +1 or -1
    with equal odds.
    """
    dt = t_now - t_prev
    if noise.leak_rates is not None:
        state.mem -= cfg.pos_threshold * noise.leak_rates * dt
    if cfg.shot_noise_rate <= 0:
        return empty_events()

    width = state.mem.shape[-1]
    scale = 1.0 - (1.0 - SHOT_NOISE_BRIGHT_FACTOR) * np.clip(np.asarray(intensity) / I_MAX, 0, 1)
    prob = np.minimum(cfg.shot_noise_rate * dt * scale, 1.0).reshape(-1)
    rng = noise.rng
    hit = rng.uniform(step, 1) < prob
    if not hit.any():
        return empty_events()
    idx = np.flatnonzero(hit)
    pol = np.where(rng.uniform(step, 2)[idx] < 0.5, 1, -1)
    when = rng.uniform(step, 3)[idx]
    out = np.empty(len(idx), dtype=EVENT_DTYPE)
    out["t"] = t_prev + dt * when
    out["x"] = idx % width
    out["y"] = idx // width
    out["p"] = pol
    return out


@dataclass
class SimulationResult:
    stream: EventStream
    y_initial: np.ndarray
    y_final: np.ndarray
    max_alpha: float


def _samples(log_frames, lin_frames, times, K, L, printed):
    """Yield (t, log, lin) for every over-sampled instant in order.

    Equivalent to stacking :func:`continuity_sample` over all spans, one
    sample at a time.
    """
    M = len(times) - 1
    for j in range(M):
        extrapolate = printed and (j % L) == L - 1
        a_log, b_log = log_frames[j], log_frames[j + 1]
        a_lin, b_lin = lin_frames[j], lin_frames[j + 1]
        d_log, d_lin = b_log - a_log, b_lin - a_lin
        if extrapolate:
            a_log, a_lin = b_log, b_lin
        ts = continuity_times(times[j], times[j + 1], K)
        yield float(ts[0]), a_log, a_lin
        for k in range(1, K):
            yield float(ts[k]), a_log + d_log * k / K, a_lin + d_lin * k / K
    yield float(times[M]), log_frames[M], lin_frames[M]


def _run_block(log_frames, lin_frames, times, cfg: SimConfig, row0: int):
    h, w = log_frames.shape[1:]
    ys, xs = np.mgrid[row0:row0 + h, 0:w]
    noise = PixelNoise(cfg, xs.ravel(), ys.ravel(), (h, w))
    mode = cfg.filter_mode
    floor_ratio = cfg.cutoff_floor_ratio if mode == "adv2e" else 1.0

    def alpha_for(lin, dt):
        if mode == "fixed":
            lin = I_MAX
        return cutoff(np.minimum(lin, I_MAX), cfg.cutoff_max, floor_ratio) * dt

    def readout(y, alpha):
        return y / filter_gain(alpha) if cfg.gain_normalized else y

    samples = _samples(log_frames, lin_frames, times, cfg.oversample_factor,
                       cfg.interp_factor, cfg.continuity_branch == "printed")
    state = PixelState()
    t_last, v0, lin0 = next(samples)
    max_alpha = 0.0
    parts = []
    step = 0
    for t, v, lin in samples:
        dt = t - t_last
        if not state.initialized:
            if mode == "none":
                state.initialize(v0)
            else:
                alpha0 = alpha_for(lin0, dt)
                y0 = filter_fixed_point(v0, alpha0)
                state.initialize(y0, readout(y0, alpha0))
            out_initial = state.mem.copy()
            noise.init_state(state, cfg)
        step += 1
        if mode == "none":
            state.y = np.array(v, dtype=np.float64)
            out = state.y
        else:
            alpha = alpha_for(lin, dt)
            max_alpha = max(max_alpha, float(np.max(alpha)))
            state.y = filter_step(state.y, v, alpha)
            out = readout(state.y, alpha)
        shot = inject_noise(state, lin, t_last, t, step, cfg, noise)
        if len(shot):
            shot["y"] += row0
            parts.append(shot)
        ev = generate_events(out, state, t_last, t, cfg, row_offset=row0)
        if len(ev):
            parts.append(ev)
        t_last = t
    return parts, out_initial, np.array(out, dtype=np.float64), max_alpha


def simulate_detailed(src: FrameSource, cfg: SimConfig, workers: int = 1) -> SimulationResult:
    """Run the full pipeline and keep the filter's first and last outputs.

    Pixels are split into ``workers`` row blocks simulated concurrently;
    the sorted result does not depend on the split.
    """
    cfg = validate_config(cfg)
    frames = interpolate_linear(src, cfg.interp_factor)
    lin = frames.stack()
    times = frames.timestamps
    logs = log_transform(lin, cfg.log_eps)
    h, w = lin.shape[1:]

    bounds = np.linspace(0, h, min(max(int(workers), 1), h) + 1).astype(int)
    blocks = [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]

    def run(block):
        a, b = block
        return _run_block(logs[:, a:b], lin[:, a:b], times, cfg, a)

    if len(blocks) > 1:
        with ThreadPoolExecutor(len(blocks)) as pool:
            results = list(pool.map(run, blocks))
    else:
        results = [run(blocks[0])]

    parts = [p for r in results for p in r[0]]
    stream = EventStream.concatenate(w, h, parts).sorted()
    y_initial = np.concatenate([r[1] for r in results])
    y_final = np.concatenate([r[2] for r in results])
    max_alpha = max(r[3] for r in results)
    if max_alpha > ALPHA_WARN:
        warnings.warn(f"filter coefficient reached {max_alpha:.3g} > {ALPHA_WARN}; "
                      "raise oversample_factor to keep the low-pass update accurate",
                      RuntimeWarning, stacklevel=2)
    return SimulationResult(stream, y_initial, y_final, max_alpha)


def simulate(src: FrameSource, cfg: SimConfig, workers: int = 1) -> EventStream:
    """Convert a frame sequence into a sorted :class:`EventStream`."""
    return simulate_detailed(src, cfg, workers).stream
