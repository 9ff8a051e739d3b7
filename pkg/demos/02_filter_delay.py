"""
How the pixel filter delays events
==================================

A bright step fires almost immediately in ``none`` mode. With the low-pass
filter switched on the events trail the input, and dim pixels trail more
because their cutoff scales with brightness.
"""
import math

import numpy as np

from adv2e import SimConfig, cutoff, simulate
from adv2e.synthetic import step_clip
from adv2e.types import I_MAX

cfg = SimConfig(leak_rate=0.0)

w0 = cutoff(I_MAX)
print(f"cutoff at full scale: {w0:.0f} rad/s, time constant {1e3 / w0:.2f} ms")
print(f"cutoff at 10% scale:  {cutoff(I_MAX / 10):.0f} rad/s")

# 1 kHz source so the interpolated ramp is short compared with the lag
src = step_clip(0.0, I_MAX, fps=1000.0)
t_step_done = src.timestamps[3]
for mode in ("none", "fixed", "adv2e"):
    s = simulate(src, cfg.replace(filter_mode=mode))
    print(f"{mode:>6}: {len(s):2d} events, last one {1e3 * (s.t.max() - t_step_done):+.2f} ms "
          "after the input settles")

# identical log-intensity drops on a bright and a dim pixel
before = np.array([[I_MAX, I_MAX / 10]])
s = simulate(step_clip(before, before * math.exp(-0.6)), cfg)
for x, label in ((0, "bright"), (1, "dim")):
    print(f"{label:>6} pixel first event at {s.t[s.x == x].min():.5f} s")
