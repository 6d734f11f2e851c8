"""Dataset-quality metrics.

Event rates are reported per polarity class against a shared per-frame
denominator, valid_area * steps, so rate(all) = rate(on) + rate(off).
A coverage variant (fraction of valid pixels that fired at least once)
is exposed alongside for comparison with sensor-style definitions.

The two-dimensional entropy of a gray image is the Shannon entropy of
(pixel value, floor of the 3x3 neighborhood mean) pairs counted over all
non-border pixels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .color import resize_nearest, value_map, zero_pad
from .generator import (
    COL_P,
    PAD_MARGIN,
    ConversionConfig,
    EventStream,
    generate_events,
    valid_region_filter,
)
from .reconstruct import center_crop, edge_integral, to_gray_levels
from .storage import to_event_frames
from .trajectory import make_trajectory

POLARITIES = ("all", "on", "off")


@dataclass(frozen=True)
class EventRateStats:
    """Corpus mean and standard deviation per polarity class."""

    mean_total: float
    sigma_total: float
    mean_on: float
    sigma_on: float
    mean_off: float
    sigma_off: float


@dataclass(frozen=True)
class EntropyResult:
    entropy: float
    levels: int


@dataclass(frozen=True)
class SweepCurve:
    """Ordered (parameter, value) pairs with strictly increasing parameters."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        params = [p for p, _ in self.points]
        if any(b <= a for a, b in zip(params, params[1:])):
            raise ValueError("sweep parameters must be strictly increasing")

    @property
    def parameters(self) -> tuple[float, ...]:
        return tuple(p for p, _ in self.points)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.points)


def event_rate(stream: EventStream, polarity: str = "all", margin: int = 0) -> float:
    """Events of the selected polarity in the valid region, divided by
    valid_area * steps."""
    if polarity not in POLARITIES:
        raise ValueError(f"polarity must be one of {POLARITIES}, got {polarity!r}")
    filtered = valid_region_filter(stream, margin)
    ev = filtered.events
    if polarity == "on":
        count = int((ev[:, COL_P] > 0).sum())
    elif polarity == "off":
        count = int((ev[:, COL_P] < 0).sum())
    else:
        count = len(ev)
    area = (stream.frame_w - 2 * margin) * (stream.frame_h - 2 * margin)
    return count / (area * stream.steps)


def coverage_rate(stream: EventStream, margin: int = 0) -> float:
    """Fraction of valid pixels that triggered at least one event."""
    filtered = valid_region_filter(stream, margin)
    ev = filtered.events
    area = (stream.frame_w - 2 * margin) * (stream.frame_h - 2 * margin)
    if len(ev) == 0:
        return 0.0
    flat = ev[:, 1].astype(np.int64) * stream.frame_w + ev[:, 0]
    return len(np.unique(flat)) / area


def rate_stats(streams: Iterable[EventStream], margin: int = 0) -> EventRateStats:
    """Mean and population sigma of per-stream rates for all three classes."""
    rates = np.array(
        [[event_rate(s, pol, margin) for pol in POLARITIES] for s in streams],
        dtype=np.float64,
    )
    if len(rates) == 0:
        raise ValueError("empty corpus")
    mean = rates.mean(axis=0)
    sigma = rates.std(axis=0)
    return EventRateStats(mean[0], sigma[0], mean[1], sigma[1], mean[2], sigma[2])


def entropy_2d(values: np.ndarray, levels: int) -> EntropyResult:
    """Shannon entropy of (value, floor(3x3 mean)) pairs, in bits.

    `values` must be an integer image of at least 3x3 pixels with entries
    in [0, levels); the one-pixel border only contributes to neighborhood
    means, not as a center pixel.
    """
    if values.ndim != 2 or values.shape[0] < 3 or values.shape[1] < 3:
        raise ValueError(f"image must be at least 3x3, got {values.shape}")
    v = np.asarray(values, dtype=np.int64)
    if v.min() < 0 or v.max() >= levels:
        raise ValueError(f"values outside [0, {levels})")
    window_sum = sum(
        v[1 + dy : v.shape[0] - 1 + dy, 1 + dx : v.shape[1] - 1 + dx]
        for dy in (-1, 0, 1)
        for dx in (-1, 0, 1)
    )
    neighborhood = window_sum // 9
    center = v[1:-1, 1:-1]
    pairs = center * levels + neighborhood
    counts = np.bincount(pairs.ravel())
    counts = counts[counts > 0]
    p = counts / counts.sum()
    return EntropyResult(float(-(p * np.log2(p)).sum()), levels)


def threshold_rates(
    img: np.ndarray, thresholds: Sequence[float], cfg: ConversionConfig
) -> np.ndarray:
    """Per-image event rate at each threshold, sharing one difference stack.

    Equivalent to running the full conversion once per threshold, but the
    window differences are computed a single time.
    """
    _check_thresholds(thresholds)
    resized = resize_nearest(img, cfg.frame_w - PAD_MARGIN, cfg.frame_h - PAD_MARGIN)
    canvas = zero_pad(value_map(resized), PAD_MARGIN)
    offsets = cfg.trajectory.offsets
    m = cfg.valid_margin
    area = (cfg.frame_w - 2 * m) * (cfg.frame_h - 2 * m)

    diffs = []
    ox, oy = offsets[0]
    prev = canvas[oy : oy + cfg.frame_h, ox : ox + cfg.frame_w]
    for t in range(1, cfg.steps + 1):
        ox, oy = offsets[t]
        nxt = canvas[oy : oy + cfg.frame_h, ox : ox + cfg.frame_w]
        diffs.append(np.abs(nxt - prev)[m : cfg.frame_h - m, m : cfg.frame_w - m])
        prev = nxt
    stack = np.stack(diffs)
    return np.array(
        [float((stack > th).sum()) / (area * cfg.steps) for th in thresholds]
    )


def threshold_sweep(
    corpus: Sequence[np.ndarray],
    thresholds: Sequence[float],
    cfg: ConversionConfig | None = None,
) -> SweepCurve:
    """Mean event rate over the corpus at each threshold."""
    if len(corpus) == 0:
        raise ValueError("empty corpus")
    _check_thresholds(thresholds)
    if cfg is None:
        cfg = ConversionConfig()
    total = np.zeros(len(thresholds))
    for img in corpus:
        total += threshold_rates(img, thresholds, cfg)
    means = total / len(corpus)
    return SweepCurve(tuple(zip((float(t) for t in thresholds), means.tolist())))


def _check_thresholds(thresholds: Sequence[float]) -> None:
    if len(thresholds) == 0:
        raise ValueError("no thresholds given")
    if any(not 0.0 < t < 1.0 for t in thresholds):
        raise ValueError("thresholds must lie in (0, 1)")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be strictly increasing")


def reconstruction_entropy(
    img: np.ndarray, kind: str, steps: int, cfg_base: ConversionConfig, seed: int = 0
) -> float:
    """Generate, reconstruct, and measure one image's 2-D entropy.

    The reconstruction is cropped to the valid central region and read at
    its natural 2 * steps + 1 gray levels.
    """
    if steps == 0:
        return 0.0
    traj = make_trajectory(kind, steps, seed)
    cfg = ConversionConfig(
        thresh=cfg_base.thresh,
        steps=steps,
        trajectory=traj,
        frame_w=cfg_base.frame_w,
        frame_h=cfg_base.frame_h,
        valid_margin=cfg_base.valid_margin,
    )
    stream = generate_events(img, cfg)
    recon = edge_integral(to_event_frames(stream), traj)
    m = cfg.valid_margin
    crop = center_crop(recon, cfg.frame_h - 2 * m, cfg.frame_w - 2 * m)
    gray = to_gray_levels(crop, steps)
    return entropy_2d(gray, 2 * steps + 1).entropy


def entropy_vs_steps(
    corpus: Sequence[np.ndarray],
    kinds: Sequence[str],
    step_values: Sequence[int],
    cfg: ConversionConfig | None = None,
    seed: int = 0,
) -> dict[str, SweepCurve]:
    """Mean reconstruction entropy per trajectory kind and step count.

    Random-walk trajectories draw a distinct seed per image so corpus
    means are not tied to a single path; results are a pure function of
    (corpus, kinds, step_values, seed).
    """
    if len(corpus) == 0:
        raise ValueError("empty corpus")
    if any(t < 0 for t in step_values):
        raise ValueError("step counts must be >= 0")
    if any(b <= a for a, b in zip(step_values, step_values[1:])):
        raise ValueError("step counts must be strictly increasing")
    if cfg is None:
        cfg = ConversionConfig()
    curves = {}
    for kind in kinds:
        points = []
        for steps in step_values:
            mean = (
                sum(
                    reconstruction_entropy(img, kind, steps, cfg, seed=seed + i)
                    for i, img in enumerate(corpus)
                )
                / len(corpus)
            )
            points.append((float(steps), mean))
        curves[kind] = SweepCurve(tuple(points))
    return curves


def event_rate_histogram(
    rates: Sequence[float], bins: int
) -> tuple[np.ndarray, np.ndarray]:
    """Counts per equal-width bin over [0, max rate]; returns (counts, edges)."""
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    rates = np.asarray(rates, dtype=np.float64)
    if len(rates) == 0:
        raise ValueError("no rates given")
    top = float(rates.max())
    if top == 0.0:
        top = 1.0  # degenerate all-zero corpus still bins somewhere
    return np.histogram(rates, bins=bins, range=(0.0, top))


def write_curve_csv(curve: SweepCurve, sink, header: tuple[str, str] = ("parameter", "value")) -> None:
    """One (parameter, value) row per point."""
    lines = [",".join(header)]
    lines.extend(f"{p:.10g},{v:.10g}" for p, v in curve.points)
    text = "\n".join(lines) + "\n"
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        with open(sink, "w", encoding="ascii") as fh:
            fh.write(text)


def pair_alphabet_bound(levels: int) -> float:
    """Upper bound on the 2-D entropy: two symbols from `levels` values."""
    return 2.0 * math.log2(levels)
