"""Command-line entry point: ``adv2e simulate | compare | render``.

Exit codes: 0 success, 1 configuration or argument error, 2 I/O error,
3 internal invariant violation. Every failure prints one line to stderr.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
import warnings

import numpy as np

from adv2e import __version__
from adv2e.errors import (Adv2eError, DimensionMismatch, InvalidConfig, InvalidWindow,
                          ManifestError, MissingFile, ParseError)
from adv2e.eventio import read_events, render_accumulation, write_events
from adv2e.ingestion import load_sequence
from adv2e.metrics import DEFAULT_BINS, build_voxel_grid, stream_stats, voxel_distance
from adv2e.pixel import simulate
from adv2e.types import FILTER_MODES, SimConfig, validate_config

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_INTERNAL = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code, message):
        self.code = code
        super().__init__(message)


def _window(text):
    try:
        t0, t1 = (float(v) for v in text.split(","))
    except ValueError:
        raise CliError(EXIT_CONFIG, f"--window expects 't0,t1', got {text!r}") from None
    if not t1 > t0:
        raise CliError(EXIT_CONFIG, f"--window end {t1} must be after start {t0}")
    return t0, t1


def _read_events(path):
    try:
        return read_events(path)
    except (OSError, ParseError, ValueError) as e:
        raise CliError(EXIT_IO, f"cannot read events from {path}: {e}") from None


def load_config(path) -> SimConfig:
    if path is None:
        return SimConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise CliError(EXIT_CONFIG, f"config file not found: {path}") from None
    except (OSError, json.JSONDecodeError) as e:
        raise CliError(EXIT_CONFIG, f"cannot parse config {path}: {e}") from None
    if not isinstance(data, dict):
        raise CliError(EXIT_CONFIG, f"config {path} must hold a JSON object")
    try:
        return SimConfig.from_dict(data)
    except InvalidConfig as e:
        raise CliError(EXIT_CONFIG, f"invalid config: {e}") from None


def run_manifest_path(output) -> str:
    return f"{output}.run.json"


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    overrides = {}
    if args.mode is not None:
        overrides["filter_mode"] = args.mode
    if args.seed is not None:
        overrides["rng_seed"] = args.seed
    cfg = cfg.replace(**overrides)
    try:
        validate_config(cfg)
    except InvalidConfig as e:
        raise CliError(EXIT_CONFIG, f"invalid config: {e}") from None

    started = time.perf_counter()
    try:
        src = load_sequence(args.input, workers=args.workers)
    except (MissingFile, OSError) as e:
        raise CliError(EXIT_IO, str(e)) from None
    except (ManifestError, Adv2eError, ValueError) as e:
        raise CliError(EXIT_IO, f"cannot load {args.input}: {e}") from None

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        stream = simulate(src, cfg, workers=args.workers)
    try:
        stream.check()
    except ValueError as e:
        raise CliError(EXIT_INTERNAL, f"invariant violated: {e}") from None
    if len(stream) and (stream.t.min() < src.timestamps[0] or stream.t.max() > src.timestamps[-1]):
        raise CliError(EXIT_INTERNAL, "invariant violated: event outside frame time span")

    manifest = {
        "tool": "adv2e",
        "version": __version__,
        "config": cfg.to_dict(),
        "seed": cfg.rng_seed,
        "input": {"manifest": os.path.abspath(args.input), "sha256": _sha256(args.input)},
        "outputs": {"events": os.path.abspath(args.output), "format": args.format},
        "event_count": len(stream),
        "wall_clock_s": None,
    }
    try:
        write_events(stream, args.output, args.format)
        manifest["wall_clock_s"] = round(time.perf_counter() - started, 6)
        mpath = run_manifest_path(args.output)
        with open(mpath + ".partial", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(mpath + ".partial", mpath)
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot write output: {e}") from None
    return EXIT_OK


def cmd_compare(args) -> int:
    t0, t1 = _window(args.window)
    if args.bins < 1:
        raise CliError(EXIT_CONFIG, f"--bins must be >= 1, got {args.bins}")
    a = _read_events(args.a)
    b = _read_events(args.b)
    if (a.width, a.height) != (b.width, b.height):
        raise CliError(EXIT_CONFIG, f"sensor sizes differ: {a.width}x{a.height} vs {b.width}x{b.height}")
    try:
        ga = build_voxel_grid(a, args.bins, t0, t1)
        gb = build_voxel_grid(b, args.bins, t0, t1)
        dist = voxel_distance(ga, gb)
    except (InvalidWindow, DimensionMismatch) as e:
        raise CliError(EXIT_CONFIG, str(e)) from None
    report = {
        "voxel_distance": dist,
        "bins": args.bins,
        "window": [t0, t1],
        "a": stream_stats(a, t0, t1).to_dict(),
        "b": stream_stats(b, t0, t1).to_dict(),
    }
    print(json.dumps(report, indent=2))
    return EXIT_OK


def cmd_render(args) -> int:
    t0, t1 = _window(args.window)
    stream = _read_events(args.input)
    try:
        render_accumulation(stream, t0, t1, args.output)
    except OSError as e:
        raise CliError(EXIT_IO, f"cannot write {args.output}: {e}") from None
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adv2e", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"adv2e {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="convert a frame sequence into events")
    p.add_argument("--input", required=True, help="frame manifest file")
    p.add_argument("--config", help="JSON file with SimConfig fields")
    p.add_argument("--output", required=True, help="event file to write")
    p.add_argument("--format", choices=("text", "binary"), default="text")
    p.add_argument("--mode", choices=FILTER_MODES)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1, help="pixel-block worker threads")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="voxel-grid distance between two event files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--bins", type=int, default=DEFAULT_BINS)
    p.add_argument("--window", required=True, help="t0,t1 in seconds")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("render", help="accumulation image of an event file")
    p.add_argument("--input", required=True)
    p.add_argument("--window", required=True, help="t0,t1 in seconds")
    p.add_argument("--output", required=True, help="PNG path")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as e:
        print(f"adv2e {args.command}: {e}", file=sys.stderr)
        return e.code
    except Exception as e:  # noqa: BLE001
        print(f"adv2e {args.command}: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
