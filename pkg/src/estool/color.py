"""Image ingestion and color primitives.

Rasters are numpy arrays in row-major (height, width[, channel]) layout:
8-bit RGB images as uint8 arrays of shape (H, W, 3), luminance value maps
as float64 arrays of shape (H, W) with values in [0, 1], and gray images
as small non-negative integer arrays.

File I/O is limited to the binary netpbm formats: P6 (PPM) for color
input and P5 (PGM) for gray output.
"""

from __future__ import annotations

import numpy as np

GRAY_WEIGHTS = (0.299, 0.587, 0.114)

_WHITESPACE = b" \t\r\n"


class ImageFormatError(ValueError):
    """Raised when a raster file cannot be decoded."""


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read `count` whitespace-separated header tokens, skipping # comments.

    Returns the tokens and the offset of the first byte after the last
    token (which must be a single whitespace byte before raster data).
    """
    tokens: list[bytes] = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        if i >= n:
            raise ImageFormatError("truncated header")
        c = data[i]
        if c in _WHITESPACE:
            i += 1
        elif c == ord("#"):
            while i < n and data[i] not in b"\r\n":
                i += 1
        else:
            j = i
            while j < n and data[j] not in _WHITESPACE and data[j] != ord("#"):
                j += 1
            tokens.append(data[i:j])
            i = j
    return tokens, i


def decode_ppm(data: bytes) -> np.ndarray:
    """Decode a binary PPM (P6, maxval 255) byte string to (H, W, 3) uint8."""
    tokens, offset = _header_tokens(data, 4)
    if tokens[0] != b"P6":
        raise ImageFormatError(f"not a binary PPM (magic {tokens[0]!r})")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ImageFormatError("non-numeric header field") from None
    if width < 1 or height < 1:
        raise ImageFormatError(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise ImageFormatError(f"unsupported maxval {maxval} (need 255)")
    if offset >= len(data) or data[offset] not in _WHITESPACE:
        raise ImageFormatError("missing raster separator")
    raster = data[offset + 1 : offset + 1 + width * height * 3]
    if len(raster) < width * height * 3:
        raise ImageFormatError("truncated raster data")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3).copy()


def read_ppm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_ppm(fh.read())


def write_ppm(path, img: np.ndarray) -> None:
    """Write a (H, W, 3) uint8 array as binary PPM (P6, maxval 255)."""
    img = np.ascontiguousarray(img, dtype=np.uint8)
    if img.ndim != 3 or img.shape[2] != 3 or img.size == 0:
        raise ValueError(f"expected non-empty (H, W, 3) array, got {img.shape}")
    h, w = img.shape[:2]
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (w, h))
        fh.write(img.tobytes())


def write_pgm(path, img: np.ndarray) -> None:
    """Write a (H, W) uint8 array as binary PGM (P5, maxval 255)."""
    img = np.ascontiguousarray(img, dtype=np.uint8)
    if img.ndim != 2 or img.size == 0:
        raise ValueError(f"expected non-empty (H, W) array, got {img.shape}")
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (w, h))
        fh.write(img.tobytes())


def read_pgm(path) -> np.ndarray:
    """Decode a binary PGM (P5, maxval 255) file to a (H, W) uint8 array."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, offset = _header_tokens(data, 4)
    if tokens[0] != b"P5":
        raise ImageFormatError(f"not a binary PGM (magic {tokens[0]!r})")
    width, height, maxval = (int(t) for t in tokens[1:])
    if maxval != 255:
        raise ImageFormatError(f"unsupported maxval {maxval} (need 255)")
    raster = data[offset + 1 : offset + 1 + width * height]
    if len(raster) < width * height:
        raise ImageFormatError("truncated raster data")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def resize_nearest(img: np.ndarray, target_w: int, target_h: int) -> np.ndarray:
    """Nearest-neighbor resample to (target_h, target_w).

    Output pixel (x, y) copies source pixel
    (floor(x * src_w / target_w), floor(y * src_h / target_h)).
    """
    if target_w < 1 or target_h < 1:
        raise ValueError(f"target dimensions must be >= 1, got {target_w}x{target_h}")
    if img.size == 0:
        raise ValueError("empty source image")
    src_h, src_w = img.shape[:2]
    rows = (np.arange(target_h) * src_h) // target_h
    cols = (np.arange(target_w) * src_w) // target_w
    return img[rows][:, cols]


def rgb_to_hsv(r: int, g: int, b: int) -> tuple[float, float, float]:
    """Convert one 8-bit RGB triplet to (hue, saturation, value).

    Hue is in degrees, canonicalized into [0, 360); saturation and value
    are in [0, 1] with value = max(R, G, B) / 255.
    """
    hi = max(r, g, b)
    lo = min(r, g, b)
    delta = hi - lo
    if delta == 0:
        h = 0.0
    elif hi == r:
        h = (60.0 * (g - b) / delta) % 360.0
    elif hi == g:
        h = 60.0 * (b - r) / delta + 120.0
    else:
        h = 60.0 * (r - g) / delta + 240.0
    s = 0.0 if hi == 0 else delta / hi
    return h, s, hi / 255.0


def value_map(img: np.ndarray) -> np.ndarray:
    """Luminance proxy per pixel: max(R, G, B) / 255 as float64 (H, W)."""
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) array, got {img.shape}")
    return img.max(axis=2).astype(np.float64) / 255.0


def rgb_to_gray(img: np.ndarray, levels: int) -> np.ndarray:
    """Weighted-sum gray conversion quantized to `levels` gray levels.

    gray = round((0.299 R + 0.587 G + 0.114 B) / 255 * (levels - 1)),
    giving integers in [0, levels - 1].
    """
    if levels < 2:
        raise ValueError(f"levels must be >= 2, got {levels}")
    wr, wg, wb = GRAY_WEIGHTS
    y = (wr * img[..., 0] + wg * img[..., 1] + wb * img[..., 2]) / 255.0
    return np.rint(y * (levels - 1)).astype(np.int64)


def zero_pad(values: np.ndarray, margin: int) -> np.ndarray:
    """Grow a 2-D map by `margin` zero-valued pixels on every side."""
    if margin < 0:
        raise ValueError(f"margin must be >= 0, got {margin}")
    if margin == 0:
        return values
    return np.pad(values, margin, mode="constant")
