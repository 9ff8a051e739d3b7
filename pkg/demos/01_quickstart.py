"""
Quickstart: frames in, events out
=================================

Simulate a small moving bar, look at the stream and save it to disk.
"""
import tempfile
from pathlib import Path

import numpy as np

from adv2e import SimConfig, read_events, simulate, stream_stats, write_events
from adv2e.eventio import quantize
from adv2e.synthetic import moving_edge_clip

# a 24 fps clip of a bright bar sliding right over a dark background
src = moving_edge_clip(shape=(48, 64), n_frames=12)
print(f"{len(src)} frames, {src.width}x{src.height}, {src.base_rate:.0f} fps")

# default config: adv2e filter, 0.2 thresholds, L = K = 10, weak leak noise
stream = simulate(src, SimConfig())
print(f"{len(stream)} events between {stream.t.min():.4f} s and {stream.t.max():.4f} s")
for t, x, y, p in stream.events[:3].tolist():
    print(f"  t={t:.6f} x={x} y={y} p={p:+d}")

stats = stream_stats(stream)
print(f"on/off: {stats.positive}/{stats.negative}, {stats.mean_rate:.0f} ev/s")

# the leading edge of the bar brightens, the trailing edge darkens
on = np.zeros((src.height, src.width), int)
np.add.at(on, (stream.y, stream.x), stream.p)
print("net polarity along row 24:", on[24, :30].tolist())

out = Path(tempfile.mkdtemp()) / "bar.bin"
write_events(stream, out, "binary")
# files keep whole microseconds
print(f"wrote {out} ({out.stat().st_size} bytes)")
print("reads back equal to the quantized stream:", read_events(out) == quantize(stream))
