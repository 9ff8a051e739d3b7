"""
Leak and shot noise
===================

A static scene produces no events until noise is switched on. Leak events
are positive and arrive at ``leak_rate`` per pixel; shot noise is balanced
and quieter on bright pixels.
"""
import warnings

import numpy as np

from adv2e import SimConfig, simulate
from adv2e import FrameSource
from adv2e.synthetic import constant_clip, frame_times

warnings.simplefilter("ignore", RuntimeWarning)  # 100 s frame gaps saturate alpha

static = constant_clip(value=100.0, shape=(48, 64), n_frames=2, fps=1 / 100.0)
print("noise off:", len(simulate(static, SimConfig(leak_rate=0.0))), "events")

counts = [len(simulate(static, SimConfig(leak_rate=0.1, rng_seed=s))) for s in range(5)]
print("leak 0.1 Hz over 100 s on 3072 pixels:", counts, "expected about", 0.1 * 100 * 3072)

# shot noise on a half dark, half bright frame
frame = np.zeros((20, 40))
frame[:, 20:] = 255.0
half = FrameSource.from_arrays([frame] * 11, frame_times(11, 10.0))
s = simulate(half, SimConfig(leak_rate=0.0, shot_noise_rate=5.0, rng_seed=1))
dark, bright = np.count_nonzero(s.x < 20), np.count_nonzero(s.x >= 20)
print(f"shot noise: {dark} events on the dark half, {bright} on the bright half")
print(f"polarity balance: {np.count_nonzero(s.p > 0)} on / {np.count_nonzero(s.p < 0)} off")
