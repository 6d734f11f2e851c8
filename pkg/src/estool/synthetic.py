"""Procedural photograph-like scenes for demos and self-contained tests.

Each scene is a smooth background gradient carrying a few dozen shaded,
partly textured shapes (ellipses and rotated rectangles) plus mild
lighting variation. Shape density, edge sharpness and fill texture are
tuned so the local-contrast statistics land in the same band as casual
photographs, giving event-rate and entropy experiments a realistic
corpus without shipping image data.

Run as a module to materialize a corpus on disk::

    python -m estool.synthetic --out corpus/ --count 50 --seed 0
"""

from __future__ import annotations

import argparse
import os

import numpy as np

from .color import write_ppm

_GRID_CACHE: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}


def _grid(height: int, width: int) -> tuple[np.ndarray, np.ndarray]:
    if (height, width) not in _GRID_CACHE:
        ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
        _GRID_CACHE[(height, width)] = (ys / height, xs / width)
    return _GRID_CACHE[(height, width)]


def _smooth_noise(rng: np.random.Generator, height: int, width: int, cells: int) -> np.ndarray:
    """Low-frequency noise in [0, 1]: bilinear upsampling of a coarse grid."""
    coarse = rng.random((cells + 1, cells + 1))
    ys = np.linspace(0, cells, height, endpoint=False)
    xs = np.linspace(0, cells, width, endpoint=False)
    y0 = ys.astype(int)
    x0 = xs.astype(int)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    a = coarse[y0][:, x0]
    b = coarse[y0][:, x0 + 1]
    c = coarse[y0 + 1][:, x0]
    d = coarse[y0 + 1][:, x0 + 1]
    return a * (1 - fy) * (1 - fx) + b * (1 - fy) * fx + c * fy * (1 - fx) + d * fy * fx


def _blur3(channel: np.ndarray) -> np.ndarray:
    """Separable 3-tap (1/4, 1/2, 1/4) blur with edge replication."""
    padded = np.pad(channel, 1, mode="edge")
    horiz = 0.25 * padded[1:-1, :-2] + 0.5 * padded[1:-1, 1:-1] + 0.25 * padded[1:-1, 2:]
    pad2 = np.pad(horiz, ((1, 1), (0, 0)), mode="edge")
    return 0.25 * pad2[:-2] + 0.5 * pad2[1:-1] + 0.25 * pad2[2:]


def _paint_shape(img: np.ndarray, rng: np.random.Generator) -> None:
    """Composite one shaded shape in place, touching only its bounding box."""
    height, width = img.shape[:2]
    color = rng.random(3)
    cx = rng.uniform(0.02, 0.98)
    cy = rng.uniform(0.02, 0.98)
    theta = rng.uniform(0, np.pi)
    ru = rng.uniform(0.03, 0.22)
    rv = rng.uniform(0.03, 0.22)
    soft_px = rng.uniform(0.3, 1.8)
    soft = soft_px / min(width, height)

    reach = float(np.hypot(ru, rv) + 4 * soft)
    x_lo = max(int((cx - reach) * width) - 1, 0)
    x_hi = min(int((cx + reach) * width) + 2, width)
    y_lo = max(int((cy - reach) * height) - 1, 0)
    y_hi = min(int((cy + reach) * height) + 2, height)
    if x_lo >= x_hi or y_lo >= y_hi:
        return

    ys_all, xs_all = _grid(height, width)
    ys = ys_all[y_lo:y_hi, x_lo:x_hi]
    xs = xs_all[y_lo:y_hi, x_lo:x_hi]
    u = (xs - cx) * np.cos(theta) + (ys - cy) * np.sin(theta)
    v = -(xs - cx) * np.sin(theta) + (ys - cy) * np.cos(theta)
    if rng.random() < 0.6:
        dist = (np.sqrt((u / ru) ** 2 + (v / rv) ** 2) - 1.0) * min(ru, rv)
    else:
        dist = np.maximum(np.abs(u) - ru, np.abs(v) - rv)
    alpha = np.clip(0.5 - dist / (2 * soft), 0.0, 1.0)
    if not alpha.any():
        return

    shade = 1.0 - 0.3 * (u / max(ru, 1e-6) + 1.0) / 2.0  # simple side lighting
    fill = color[None, None, :] * shade[..., None]
    if rng.random() < 0.55:
        # A textured surface: fine-grained value noise, sometimes split into
        # two crisp tones the way foliage or fabric clumps are.
        amp = rng.uniform(0.3, 0.8)
        cells = int(rng.integers(12, 40))
        texture = _smooth_noise(rng, y_hi - y_lo, x_hi - x_lo, cells)
        if rng.random() < 0.5:
            texture = (texture > 0.5).astype(np.float64)
        fill = fill * (1.0 + amp * (texture[..., None] - 0.5))

    region = img[y_lo:y_hi, x_lo:x_hi]
    region *= 1 - alpha[..., None]
    region += fill * alpha[..., None]


def synth_photo(seed: int, width: int = 320, height: int = 240) -> np.ndarray:
    """Render one deterministic photograph-like RGB scene as (H, W, 3) uint8."""
    rng = np.random.default_rng(seed)
    ys, xs = _grid(height, width)

    # Background: a linear color gradient between two random colors.
    c0 = rng.random(3)
    c1 = rng.random(3)
    angle = rng.uniform(0, 2 * np.pi)
    ramp = xs * np.cos(angle) + ys * np.sin(angle)
    ramp = (ramp - ramp.min()) / max(np.ptp(ramp), 1e-9)
    img = c0[None, None, :] + ramp[..., None] * (c1 - c0)[None, None, :]

    for _ in range(int(rng.integers(28, 64))):
        _paint_shape(img, rng)

    # Gentle large-scale lighting variation plus sensor-like grain.
    img *= (0.85 + 0.3 * _smooth_noise(rng, height, width, 4))[..., None]
    img += (rng.random((height, width, 1)) - 0.5) * 0.02

    if rng.random() < 0.35:
        img = np.stack([_blur3(img[..., ch]) for ch in range(3)], axis=-1)

    return (np.clip(img, 0.0, 1.0) * 255).astype(np.uint8)


def synth_corpus(count: int, seed: int = 0, width: int = 320, height: int = 240) -> list[np.ndarray]:
    """A list of `count` deterministic scenes; image i uses seed `seed + i`."""
    return [synth_photo(seed + i, width, height) for i in range(count)]


def write_corpus(out_dir, count: int, seed: int = 0, width: int = 320,
                 height: int = 240) -> str:
    """Write PPM scenes plus a `manifest.tsv` (path TAB label); returns the
    manifest path."""
    os.makedirs(out_dir, exist_ok=True)
    lines = []
    for i in range(count):
        name = f"scene_{i:04d}.ppm"
        write_ppm(os.path.join(out_dir, name), synth_photo(seed + i, width, height))
        lines.append(f"{name}\tsynthetic")
    manifest = os.path.join(out_dir, "manifest.tsv")
    with open(manifest, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    return manifest


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Generate a demo image corpus.")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--count", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--width", type=int, default=320)
    parser.add_argument("--height", type=int, default=240)
    args = parser.parse_args(argv)
    manifest = write_corpus(args.out, args.count, args.seed, args.width, args.height)
    print(manifest)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
