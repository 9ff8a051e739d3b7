"""Event stream files and accumulation images.

Text format::

    # adv2e-events v1 <width> <height>
    <t_us>,<x>,<y>,<p>

with integer microsecond timestamps and polarity 0/1 for -1/+1.

Binary format (little-endian): a 16-byte header of an 8-byte magic
(``ADV2E`` padded with NULs), u16 version, u16 width, u16 height, u16
reserved, then 13-byte records of u64 t_us, u16 x, u16 y, u8 p.
"""
from __future__ import annotations

import os

import numpy as np
from PIL import Image

from adv2e.errors import BadMagic, BoundsError, InvalidWindow, ParseError, TruncatedFile
from adv2e.types import EVENT_DTYPE, EventStream

TEXT_HEADER = "# adv2e-events v1"
MAGIC = b"ADV2E\x00\x00\x00"
VERSION = 1
HEADER_DTYPE = np.dtype([("magic", "S8"), ("version", "<u2"), ("width", "<u2"),
                         ("height", "<u2"), ("reserved", "<u2")])
RECORD_DTYPE = np.dtype([("t_us", "<u8"), ("x", "<u2"), ("y", "<u2"), ("p", "u1")])
assert HEADER_DTYPE.itemsize == 16 and RECORD_DTYPE.itemsize == 13

NEUTRAL = np.array([128, 128, 128], dtype=np.float64)
POSITIVE_COLOR = np.array([0, 0, 255], dtype=np.float64)
NEGATIVE_COLOR = np.array([255, 0, 0], dtype=np.float64)
RENDER_CLIP = 3


def to_microseconds(t) -> np.ndarray:
    return np.rint(np.asarray(t, dtype=np.float64) * 1e6).astype(np.int64)


def quantize(stream: EventStream) -> EventStream:
    """Round timestamps to whole microseconds and re-sort, as a file round-trip would.

    Rounding can create timestamp ties, which then fall back to (y, x, p) order.
    """
    ev = stream.events.copy()
    ev["t"] = to_microseconds(ev["t"]) / 1e6
    return EventStream(stream.width, stream.height, ev).sorted()


def _check_bounds(stream: EventStream):
    ev = stream.events
    if len(ev) and (np.any(ev["x"] >= stream.width) or np.any(ev["y"] >= stream.height)):
        raise BoundsError(f"event outside {stream.width}x{stream.height} sensor")


def _atomic_write(path, data: bytes):
    partial = f"{path}.partial"
    with open(partial, "wb") as fh:
        fh.write(data)
    os.replace(partial, path)


def _file_order(stream: EventStream) -> np.ndarray:
    _check_bounds(stream)
    return quantize(stream).events


def format_events_text(stream: EventStream) -> str:
    ev = _file_order(stream)
    lines = [f"{TEXT_HEADER} {stream.width} {stream.height}"]
    if len(ev):
        t_us = to_microseconds(ev["t"])
        if np.any(t_us < 0):
            raise ValueError("negative event timestamp")
        p = (ev["p"] > 0).astype(np.int64)
        cols = np.column_stack([t_us, ev["x"].astype(np.int64), ev["y"].astype(np.int64), p])
        lines.extend(",".join(map(str, row)) for row in cols.tolist())
    return "\n".join(lines) + "\n"


def write_events_text(stream: EventStream, path):
    _atomic_write(path, format_events_text(stream).encode("ascii"))


def read_events_text(path) -> EventStream:
    with open(path, encoding="ascii", errors="replace") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(1, "empty file, expected header")
    head = lines[0].split()
    if len(head) != 5 or " ".join(head[:3]) != TEXT_HEADER:
        raise ParseError(1, f"bad header {lines[0]!r}")
    try:
        width, height = int(head[3]), int(head[4])
    except ValueError:
        raise ParseError(1, f"bad sensor size in header {lines[0]!r}") from None

    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise ParseError(lineno, f"expected 4 fields, got {len(parts)}")
        try:
            t_us, x, y, p = (int(v) for v in parts)
        except ValueError:
            raise ParseError(lineno, f"non-integer field in {line!r}") from None
        if t_us < 0 or p not in (0, 1):
            raise ParseError(lineno, f"invalid timestamp or polarity in {line!r}")
        if not (0 <= x < width and 0 <= y < height):
            raise BoundsError(f"line {lineno}: ({x}, {y}) outside {width}x{height} sensor")
        rows.append((t_us, x, y, p))

    ev = np.zeros(len(rows), dtype=EVENT_DTYPE)
    if rows:
        arr = np.array(rows, dtype=np.int64)
        ev["t"] = arr[:, 0] / 1e6
        ev["x"] = arr[:, 1]
        ev["y"] = arr[:, 2]
        ev["p"] = np.where(arr[:, 3] == 1, 1, -1)
    return EventStream(width, height, ev)


def format_events_binary(stream: EventStream) -> bytes:
    ev = _file_order(stream)
    header = np.zeros(1, dtype=HEADER_DTYPE)
    header["magic"] = MAGIC
    header["version"] = VERSION
    header["width"] = stream.width
    header["height"] = stream.height
    rec = np.zeros(len(ev), dtype=RECORD_DTYPE)
    if len(ev):
        t_us = to_microseconds(ev["t"])
        if np.any(t_us < 0):
            raise ValueError("negative event timestamp")
        rec["t_us"] = t_us
        rec["x"] = ev["x"]
        rec["y"] = ev["y"]
        rec["p"] = ev["p"] > 0
    return header.tobytes() + rec.tobytes()


def write_events_binary(stream: EventStream, path):
    _atomic_write(path, format_events_binary(stream))


def parse_events_binary(data: bytes) -> EventStream:
    if len(data) < HEADER_DTYPE.itemsize:
        if MAGIC.startswith(data[:len(MAGIC)]):
            raise TruncatedFile(f"file is {len(data)} bytes, shorter than the header")
        raise BadMagic("not an adv2e binary event file")
    header = np.frombuffer(data[:16], dtype=HEADER_DTYPE)[0]
    if data[:8] != MAGIC:
        raise BadMagic(f"bad magic {data[:8]!r}")
    if header["version"] != VERSION:
        raise BadMagic(f"unsupported version {int(header['version'])}")
    body = data[16:]
    if len(body) % RECORD_DTYPE.itemsize:
        raise TruncatedFile(f"{len(body) % RECORD_DTYPE.itemsize} trailing bytes after last record")
    rec = np.frombuffer(body, dtype=RECORD_DTYPE)
    width, height = int(header["width"]), int(header["height"])
    if len(rec) and (np.any(rec["x"] >= width) or np.any(rec["y"] >= height)):
        raise BoundsError(f"event outside {width}x{height} sensor")
    if len(rec) and np.any(rec["p"] > 1):
        raise BadMagic("polarity byte other than 0/1; file corrupt")
    ev = np.zeros(len(rec), dtype=EVENT_DTYPE)
    ev["t"] = rec["t_us"] / 1e6
    ev["x"] = rec["x"]
    ev["y"] = rec["y"]
    ev["p"] = np.where(rec["p"] == 1, 1, -1)
    return EventStream(width, height, ev)


def read_events_binary(path) -> EventStream:
    with open(path, "rb") as fh:
        return parse_events_binary(fh.read())


def read_events(path) -> EventStream:
    """Read either format, choosing by the leading magic bytes."""
    with open(path, "rb") as fh:
        head = fh.read(len(MAGIC))
    if head == MAGIC:
        return read_events_binary(path)
    return read_events_text(path)


def write_events(stream: EventStream, path, fmt: str = "text"):
    if fmt == "text":
        write_events_text(stream, path)
    elif fmt == "binary":
        write_events_binary(stream, path)
    else:
        raise ValueError(f"unknown event format {fmt!r}")


def accumulate(stream: EventStream, t0: float, t1: float) -> np.ndarray:
    """Signed per-pixel event count over ``[t0, t1]``, shape ``(height, width)``."""
    if not t1 > t0:
        raise InvalidWindow(f"window end {t1} must be after start {t0}")
    ev = stream.events
    ev = ev[(ev["t"] >= t0) & (ev["t"] <= t1)]
    acc = np.zeros((stream.height, stream.width), dtype=np.int64)
    np.add.at(acc, (ev["y"].astype(np.int64), ev["x"].astype(np.int64)), ev["p"].astype(np.int64))
    return acc


def accumulation_rgb(acc: np.ndarray, clip: int = RENDER_CLIP) -> np.ndarray:
    """Map signed counts to RGB: gray at zero, toward blue for positive and red
    for negative, saturating at ``clip`` events."""
    level = np.clip(acc, -clip, clip).astype(np.float64) / clip
    mag = np.abs(level)[..., None]
    target = np.where((level > 0)[..., None], POSITIVE_COLOR, NEGATIVE_COLOR)
    rgb = NEUTRAL * (1 - mag) + target * mag
    return np.rint(rgb).astype(np.uint8)


def render_accumulation(stream: EventStream, t0: float, t1: float, path) -> np.ndarray:
    """Write the accumulation image of ``[t0, t1]`` as PNG and return its pixels."""
    rgb = accumulation_rgb(accumulate(stream, t0, t1))
    partial = f"{path}.partial"
    Image.fromarray(rgb, mode="RGB").save(partial, format="PNG")
    os.replace(partial, path)
    return rgb
