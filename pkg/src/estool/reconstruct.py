"""Gray-image reconstruction from event-frame tensors.

The edge-accumulating reconstruction undoes the window motion: each
step's signed event frame (positive channel minus negative channel) is
placed on a canvas four pixels larger than the frame at origin
(2 + ox, 2 + oy), where (ox, oy) is the window offset that produced the
step's new window. A scene feature that sits at window coordinate
u - offset for every offset therefore lands on one canvas cell for all
steps, so edges accumulate registered instead of smeared. Because at
most one event exists per pixel and step, every canvas cell stays
within [-T, T].

The naive baseline simply sums the signed frames with no alignment.
"""

from __future__ import annotations

import numpy as np

from .trajectory import Trajectory

RECON_PAD = 2  # canvas grows by this much on every side


def edge_integral(frames: np.ndarray, traj: Trajectory) -> np.ndarray:
    """Accumulate signed event frames registered against the window motion.

    `frames` is a (2, T, H, W) occupancy tensor; the result is an
    (H + 4, W + 4) int32 image with values in [-T, T].
    """
    if frames.ndim != 4 or frames.shape[0] != 2:
        raise ValueError(f"expected (2, T, H, W) tensor, got {frames.shape}")
    steps, height, width = frames.shape[1:]
    if steps != traj.steps:
        raise ValueError(f"tensor has {steps} steps, trajectory has {traj.steps}")
    total = np.zeros((height + 2 * RECON_PAD, width + 2 * RECON_PAD), dtype=np.int32)
    for t in range(1, steps + 1):
        ox, oy = traj.offsets[t]
        target = total[RECON_PAD + oy : RECON_PAD + oy + height,
                       RECON_PAD + ox : RECON_PAD + ox + width]
        target += frames[0, t - 1]
        target -= frames[1, t - 1]
    return total


def naive_sum(frames: np.ndarray) -> np.ndarray:
    """Sum signed event frames over time with no spatial alignment."""
    if frames.ndim != 4 or frames.shape[0] != 2:
        raise ValueError(f"expected (2, T, H, W) tensor, got {frames.shape}")
    return frames[0].astype(np.int32).sum(axis=0) - frames[1].astype(np.int32).sum(axis=0)


def to_gray_levels(signed: np.ndarray, steps: int) -> np.ndarray:
    """Shift a signed reconstruction into gray levels 0 .. 2 * steps."""
    if np.abs(signed).max(initial=0) > steps:
        raise ValueError(f"values exceed +-{steps}")
    return signed + steps


def center_crop(img: np.ndarray, height: int, width: int) -> np.ndarray:
    """Central (height, width) crop, used to drop border and padding noise."""
    h, w = img.shape[:2]
    if height > h or width > w:
        raise ValueError(f"crop {height}x{width} larger than image {h}x{w}")
    top = (h - height) // 2
    left = (w - width) // 2
    return img[top : top + height, left : left + width]
