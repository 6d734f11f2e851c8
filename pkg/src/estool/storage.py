"""Bit-exact serialization of event streams and event-frame tensors.

EVS stream files are little-endian throughout:

    offset  size  field
    0       4     magic "ESEV"
    4       2     version (u16, currently 1)
    6       2     frame width (u16)
    8       2     frame height (u16)
    10      1     steps T (u8)
    11      1     reserved (u8, 0)
    12      4     threshold (f32)
    16      8     event count (u64)
    24      ...   records

Each record is 6 bytes: x (u16), y (u16), t (u8, 1-based), p (i8, +1/-1),
and records are sorted by (t, y, x). Equal streams serialize to identical
bytes, so rewriting a parsed file reproduces it exactly.

Event-frame tensor files carry an analogous 24-byte header with magic
"ESFT" and the total cell count in place of the event count, followed by
one byte per cell in (channel, t, y, x) row-major order; channel 0 holds
positive events, channel 1 negative events.
"""

from __future__ import annotations

import struct

import numpy as np

from .generator import COL_P, COL_T, COL_X, COL_Y, EventStream, empty_events

STREAM_MAGIC = b"ESEV"
FRAMES_MAGIC = b"ESFT"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<4sHHHBBfQ")
HEADER_SIZE = _HEADER.size  # 24

_RECORD_DTYPE = np.dtype([("x", "<u2"), ("y", "<u2"), ("t", "u1"), ("p", "i1")])
RECORD_SIZE = _RECORD_DTYPE.itemsize  # 6


class StorageError(Exception):
    """Base class for event-file format errors."""


class BadMagicError(StorageError):
    pass


class VersionError(StorageError):
    pass


class TruncatedFileError(StorageError):
    pass


class RecordOrderError(StorageError):
    pass


class FieldRangeError(StorageError):
    pass


def _sort_keys(events: np.ndarray, frame_w: int, frame_h: int) -> np.ndarray:
    """Collapse (t, y, x) into one int64 key per event; strictly increasing
    keys certify both sort order and per-(x, y, t) uniqueness."""
    ev = events.astype(np.int64)
    return (ev[:, COL_T] * frame_h + ev[:, COL_Y]) * frame_w + ev[:, COL_X]


def validate_stream(stream: EventStream) -> None:
    """Check the stream invariants; raises FieldRangeError/RecordOrderError."""
    if not 1 <= stream.frame_w <= 0xFFFF or not 1 <= stream.frame_h <= 0xFFFF:
        raise FieldRangeError(f"frame {stream.frame_w}x{stream.frame_h} not storable")
    if not 1 <= stream.steps <= 0xFF:
        raise FieldRangeError(f"steps {stream.steps} outside 1..255")
    ev = stream.events
    if ev.ndim != 2 or ev.shape[1] != 4:
        raise FieldRangeError(f"events must be (N, 4), got {ev.shape}")
    if len(ev) == 0:
        return
    if (ev[:, COL_X] < 0).any() or (ev[:, COL_X] >= stream.frame_w).any():
        raise FieldRangeError("event x outside frame")
    if (ev[:, COL_Y] < 0).any() or (ev[:, COL_Y] >= stream.frame_h).any():
        raise FieldRangeError("event y outside frame")
    if (ev[:, COL_T] < 1).any() or (ev[:, COL_T] > stream.steps).any():
        raise FieldRangeError("event t outside 1..steps")
    if not np.isin(ev[:, COL_P], (-1, 1)).all():
        raise FieldRangeError("polarity must be +1 or -1")
    keys = _sort_keys(ev, stream.frame_w, stream.frame_h)
    if len(keys) > 1 and not (np.diff(keys) > 0).all():
        raise RecordOrderError("events not strictly sorted by (t, y, x)")


def _pack_header(magic: bytes, width: int, height: int, steps: int,
                 thresh: float, count: int) -> bytes:
    return _HEADER.pack(magic, FORMAT_VERSION, width, height, steps, 0,
                        np.float32(thresh), count)


def _unpack_header(data: bytes, magic: bytes, what: str):
    if len(data) < HEADER_SIZE:
        raise TruncatedFileError(f"{what}: {len(data)} bytes, header needs {HEADER_SIZE}")
    got_magic, version, width, height, steps, _, thresh, count = _HEADER.unpack_from(data)
    if got_magic != magic:
        raise BadMagicError(f"{what}: magic {got_magic!r}, expected {magic!r}")
    if version != FORMAT_VERSION:
        raise VersionError(f"{what}: version {version}, expected {FORMAT_VERSION}")
    return width, height, steps, float(thresh), count


def stream_to_bytes(stream: EventStream) -> bytes:
    validate_stream(stream)
    ev = stream.events
    records = np.empty(len(ev), dtype=_RECORD_DTYPE)
    records["x"] = ev[:, COL_X]
    records["y"] = ev[:, COL_Y]
    records["t"] = ev[:, COL_T]
    records["p"] = ev[:, COL_P]
    header = _pack_header(STREAM_MAGIC, stream.frame_w, stream.frame_h,
                          stream.steps, stream.thresh, len(ev))
    return header + records.tobytes()


def stream_from_bytes(data: bytes) -> EventStream:
    width, height, steps, thresh, count = _unpack_header(data, STREAM_MAGIC, "event stream")
    need = HEADER_SIZE + count * RECORD_SIZE
    if len(data) < need:
        raise TruncatedFileError(f"event stream: {len(data)} bytes, need {need}")
    records = np.frombuffer(data, dtype=_RECORD_DTYPE, count=count, offset=HEADER_SIZE)
    events = np.empty((count, 4), dtype=np.int32)
    events[:, COL_X] = records["x"]
    events[:, COL_Y] = records["y"]
    events[:, COL_T] = records["t"]
    events[:, COL_P] = records["p"]
    stream = EventStream(frame_w=width, frame_h=height, steps=steps,
                         thresh=thresh, events=events)
    validate_stream(stream)
    return stream


def write_stream(stream: EventStream, sink) -> None:
    """Serialize to a path or a binary file object."""
    data = stream_to_bytes(stream)
    if hasattr(sink, "write"):
        sink.write(data)
    else:
        with open(sink, "wb") as fh:
            fh.write(data)


def read_stream(source) -> EventStream:
    """Parse from a path or a binary file object."""
    if hasattr(source, "read"):
        data = source.read()
    else:
        with open(source, "rb") as fh:
            data = fh.read()
    return stream_from_bytes(data)


def to_event_frames(stream: EventStream) -> np.ndarray:
    """Densify a stream into a (2, T, H, W) uint8 occupancy tensor.

    Cell (0, t-1, y, x) is 1 for a +1 event at step t, cell (1, t-1, y, x)
    for a -1 event; at most one of the two is set per (t, y, x).
    """
    frames = np.zeros((2, stream.steps, stream.frame_h, stream.frame_w), dtype=np.uint8)
    ev = stream.events
    if len(ev):
        channel = (ev[:, COL_P] < 0).astype(np.int64)
        frames[channel, ev[:, COL_T] - 1, ev[:, COL_Y], ev[:, COL_X]] = 1
    return frames


def from_event_frames(frames: np.ndarray, thresh: float) -> EventStream:
    """Inverse of :func:`to_event_frames`; recovers the sorted stream."""
    if frames.ndim != 4 or frames.shape[0] != 2:
        raise ValueError(f"expected (2, T, H, W) tensor, got {frames.shape}")
    if not np.isin(frames, (0, 1)).all():
        raise FieldRangeError("tensor cells must be 0 or 1")
    if (frames[0] & frames[1]).any():
        raise FieldRangeError("positive and negative cell set at the same (t, y, x)")
    _, steps, height, width = frames.shape
    polarity = frames[0].astype(np.int8) - frames[1].astype(np.int8)
    ts, ys, xs = np.nonzero(polarity)
    events = np.empty((len(xs), 4), dtype=np.int32)
    events[:, COL_X] = xs
    events[:, COL_Y] = ys
    events[:, COL_T] = ts + 1
    events[:, COL_P] = polarity[ts, ys, xs]
    return EventStream(frame_w=width, frame_h=height, steps=steps,
                       thresh=float(np.float32(thresh)), events=events)


def frames_to_bytes(frames: np.ndarray, thresh: float) -> bytes:
    if frames.ndim != 4 or frames.shape[0] != 2:
        raise ValueError(f"expected (2, T, H, W) tensor, got {frames.shape}")
    _, steps, height, width = frames.shape
    if not 1 <= width <= 0xFFFF or not 1 <= height <= 0xFFFF or not 1 <= steps <= 0xFF:
        raise FieldRangeError(f"tensor shape {frames.shape} not storable")
    if not np.isin(frames, (0, 1)).all():
        raise FieldRangeError("tensor cells must be 0 or 1")
    header = _pack_header(FRAMES_MAGIC, width, height, steps, thresh, frames.size)
    return header + np.ascontiguousarray(frames, dtype=np.uint8).tobytes()


def frames_from_bytes(data: bytes) -> tuple[np.ndarray, float]:
    width, height, steps, thresh, count = _unpack_header(data, FRAMES_MAGIC, "event frames")
    if count != 2 * steps * height * width:
        raise FieldRangeError(f"cell count {count} does not match 2x{steps}x{height}x{width}")
    if len(data) < HEADER_SIZE + count:
        raise TruncatedFileError(f"event frames: {len(data)} bytes, need {HEADER_SIZE + count}")
    frames = np.frombuffer(data, dtype=np.uint8, count=count, offset=HEADER_SIZE)
    frames = frames.reshape(2, steps, height, width).copy()
    if not np.isin(frames, (0, 1)).all():
        raise FieldRangeError("tensor cells must be 0 or 1")
    return frames, thresh


def write_frames(frames: np.ndarray, thresh: float, sink) -> None:
    data = frames_to_bytes(frames, thresh)
    if hasattr(sink, "write"):
        sink.write(data)
    else:
        with open(sink, "wb") as fh:
            fh.write(data)


def read_frames(source) -> tuple[np.ndarray, float]:
    if hasattr(source, "read"):
        data = source.read()
    else:
        with open(source, "rb") as fh:
            data = fh.read()
    return frames_from_bytes(data)


def export_csv(stream: EventStream, sink) -> None:
    """Write the quad records as text: header 'x,y,t,p', one row per event."""
    lines = ["x,y,t,p"]
    lines.extend(
        f"{x},{y},{t},{p}" for x, y, t, p in stream.events.tolist()
    )
    text = "\n".join(lines) + "\n"
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="ascii") as fh:
            fh.write(text)


def import_csv(source, frame_w: int, frame_h: int, steps: int, thresh: float) -> EventStream:
    """Parse a quad CSV back into a stream; geometry is supplied by the caller."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="ascii") as fh:
            text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "x,y,t,p":
        raise BadMagicError("quad CSV must start with header 'x,y,t,p'")
    rows = [[int(v) for v in ln.split(",")] for ln in lines[1:]]
    events = np.array(rows, dtype=np.int32).reshape(len(rows), 4)
    stream = EventStream(frame_w=frame_w, frame_h=frame_h, steps=steps,
                         thresh=float(np.float32(thresh)), events=events)
    validate_stream(stream)
    return stream
