"""
Driving the command line tool
=============================

Write a clip to disk, simulate it in two modes, compare the results and
render an accumulation image, all through ``adv2e.cli.main``.
"""
import io
import json
from contextlib import redirect_stdout
import tempfile
from pathlib import Path

from adv2e.cli import main
from adv2e.ingestion import write_sequence
from adv2e.synthetic import moving_edge_clip

work = Path(tempfile.mkdtemp())
manifest = write_sequence(moving_edge_clip(shape=(32, 48), n_frames=8), work / "clip")
print("manifest:", manifest)

for mode in ("none", "adv2e"):
    code = main(["simulate", "--input", manifest, "--mode", mode, "--seed", "3",
                 "--output", str(work / f"{mode}.txt"), "--workers", "2"])
    run = json.loads((work / f"{mode}.txt.run.json").read_text())
    print(f"simulate --mode {mode}: exit {code}, {run['event_count']} events")

# compare prints a JSON report with the voxel distance and per-stream statistics
buf = io.StringIO()
with redirect_stdout(buf):
    main(["compare", "--a", str(work / "none.txt"), "--b", str(work / "adv2e.txt"),
          "--window", "0,0.29"])
report = json.loads(buf.getvalue())
print(f"compare: distance {report['voxel_distance']:.2f}, "
      f"events {report['a']['count']} vs {report['b']['count']}")

code = main(["render", "--input", str(work / "adv2e.txt"), "--window", "0,0.29",
             "--output", str(work / "adv2e.png")])
print("render: exit", code, "->", work / "adv2e.png")

# a bad window is a usage error
print("bad window exit code:", main(["render", "--input", str(work / "adv2e.txt"),
                                      "--window", "1,0", "--output", str(work / "x.png")]))
