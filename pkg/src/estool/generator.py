"""Sliding-window event generator.

Geometry: the input image is resampled to (frame - 2) pixels per side,
converted to a luminance value map, and zero-padded by two pixels, giving
a canvas two pixels larger than the crop frame. A frame-sized window then
slides over the canvas along a trajectory on the {0, 1, 2} offset lattice.
Step t compares the window at offsets[t] against the window at
offsets[t - 1]; a pixel whose value rose by more than the threshold emits
a +1 event, one that fell by more than the threshold emits a -1 event
(strict inequalities). Events carry frame coordinates; the frame border
is polluted by padding moving through it, so consumers usually restrict
to the central region via :func:`valid_region_filter`.

Everything here is a pure function of its inputs: identical images and
configurations produce identical streams regardless of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .color import resize_nearest, value_map, zero_pad
from .trajectory import Trajectory, odg_trajectory

PAD_MARGIN = 2

# Column layout of the event array.
COL_X, COL_Y, COL_T, COL_P = 0, 1, 2, 3


@dataclass(frozen=True)
class ConversionConfig:
    """Hyper-parameters of one image-to-stream conversion."""

    thresh: float = 0.18
    steps: int = 8
    trajectory: Trajectory | None = None
    frame_w: int = 256
    frame_h: int = 256
    valid_margin: int = 16

    def __post_init__(self):
        if self.trajectory is None:
            object.__setattr__(self, "trajectory", odg_trajectory(self.steps))
        if not 0.0 < self.thresh < 1.0:
            raise ValueError(f"thresh must be in (0, 1), got {self.thresh}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.trajectory.steps != self.steps:
            raise ValueError(
                f"trajectory has {self.trajectory.steps} steps, config wants {self.steps}"
            )
        if self.frame_w < 3 or self.frame_h < 3:
            raise ValueError("frame dimensions must be >= 3")
        if self.valid_margin < 0:
            raise ValueError("valid_margin must be >= 0")
        if 2 * self.valid_margin >= min(self.frame_w, self.frame_h):
            raise ValueError("valid margin leaves no interior pixels")


def empty_events() -> np.ndarray:
    return np.empty((0, 4), dtype=np.int32)


@dataclass(frozen=True, eq=False)
class EventStream:
    """An ordered event collection with its frame geometry.

    `events` is an (N, 4) int32 array with columns (x, y, t, p), sorted by
    (t, y, x); polarity p is +1 or -1 and step t runs from 1 to `steps`.
    """

    frame_w: int
    frame_h: int
    steps: int
    thresh: float
    events: np.ndarray = field(default_factory=empty_events)

    def __len__(self) -> int:
        return len(self.events)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventStream):
            return NotImplemented
        return (
            self.frame_w == other.frame_w
            and self.frame_h == other.frame_h
            and self.steps == other.steps
            and self.thresh == other.thresh
            and np.array_equal(self.events, other.events)
        )


def diff_events(prev: np.ndarray, nxt: np.ndarray, thresh: float, t: int) -> np.ndarray:
    """Threshold the difference of two equally sized windows into events.

    Returns an (N, 4) int32 array of (x, y, t, p) rows ordered by (y, x):
    p = +1 where nxt - prev > thresh, p = -1 where nxt - prev < -thresh.
    """
    if prev.shape != nxt.shape:
        raise ValueError(f"window shapes differ: {prev.shape} vs {nxt.shape}")
    diff = nxt - prev
    polarity = (diff > thresh).astype(np.int8) - (diff < -thresh).astype(np.int8)
    ys, xs = np.nonzero(polarity)
    out = np.empty((len(xs), 4), dtype=np.int32)
    out[:, COL_X] = xs
    out[:, COL_Y] = ys
    out[:, COL_T] = t
    out[:, COL_P] = polarity[ys, xs]
    return out


def generate_events(img: np.ndarray, cfg: ConversionConfig | None = None) -> EventStream:
    """Convert one RGB image (uint8, (H, W, 3)) into an event stream."""
    if cfg is None:
        cfg = ConversionConfig()
    if img.size == 0:
        raise ValueError("zero-area image")
    resized = resize_nearest(img, cfg.frame_w - PAD_MARGIN, cfg.frame_h - PAD_MARGIN)
    canvas = zero_pad(value_map(resized), PAD_MARGIN)
    return generate_events_from_canvas(canvas, cfg)


def generate_events_from_canvas(canvas: np.ndarray, cfg: ConversionConfig) -> EventStream:
    """Run the sliding-window loop over an already prepared value canvas.

    The canvas must be at least (frame_h + 2, frame_w + 2) so that every
    lattice offset keeps the window in bounds.
    """
    if canvas.shape[0] < cfg.frame_h + PAD_MARGIN or canvas.shape[1] < cfg.frame_w + PAD_MARGIN:
        raise ValueError(
            f"canvas {canvas.shape} too small for a {cfg.frame_w}x{cfg.frame_h} window "
            f"on the offset lattice"
        )
    offsets = cfg.trajectory.offsets
    ox, oy = offsets[0]
    prev = canvas[oy : oy + cfg.frame_h, ox : ox + cfg.frame_w]
    chunks = []
    for t in range(1, cfg.steps + 1):
        ox, oy = offsets[t]
        nxt = canvas[oy : oy + cfg.frame_h, ox : ox + cfg.frame_w]
        chunks.append(diff_events(prev, nxt, cfg.thresh, t))
        prev = nxt
    events = np.concatenate(chunks) if chunks else empty_events()
    # The stream records its threshold at float32 precision to survive
    # serialization round trips unchanged.
    return EventStream(
        frame_w=cfg.frame_w,
        frame_h=cfg.frame_h,
        steps=cfg.steps,
        thresh=float(np.float32(cfg.thresh)),
        events=events,
    )


def valid_region_filter(stream: EventStream, margin: int) -> EventStream:
    """Keep only events at least `margin` pixels away from the frame border.

    Coordinates are not re-based, so filtered streams stay aligned with
    their reconstructions.
    """
    if margin < 0 or 2 * margin >= min(stream.frame_w, stream.frame_h):
        raise ValueError(f"margin {margin} invalid for {stream.frame_w}x{stream.frame_h}")
    if margin == 0:
        return stream
    ev = stream.events
    keep = (
        (ev[:, COL_X] >= margin)
        & (ev[:, COL_X] < stream.frame_w - margin)
        & (ev[:, COL_Y] >= margin)
        & (ev[:, COL_Y] < stream.frame_h - margin)
    )
    return EventStream(
        frame_w=stream.frame_w,
        frame_h=stream.frame_h,
        steps=stream.steps,
        thresh=stream.thresh,
        events=ev[keep],
    )
