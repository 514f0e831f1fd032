"""Grayscale ingestion and binary raster preprocessing.

Images are plain 2-D NumPy arrays: grayscale rasters hold intensities in
[0, 255], binary rasters are boolean with True = foreground ink.  The
canonical glyph canvas is 100x100.

Conventions fixed here (they are load-bearing for every downstream feature):

* Binarization starts at threshold 128 and repeatedly replaces it with the
  average of the foreground and background means; a pixel strictly below
  the threshold is ink, at or above it is background.  The loop stops when
  the relative threshold change drops below 2%.  If an update would leave
  one side empty the threshold freezes at its current value.
* Scaling to the canvas samples nearest-neighbor with endpoints aligned:
  destination row 0 / 99 always read the first / last source row, so a
  tight input stays tight after scaling, whatever the crop size.
* Smoothing is one 3x3 dilation followed by one 3x3 closing.  Erosion
  treats pixels beyond the border as foreground, which keeps the closing
  extensive (it never erases input ink).
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import AllBackground, NoForeground, UnreadableImage

CANVAS_SIZE = 100

_MAX_THRESHOLD_ITERATIONS = 64


class Rect(NamedTuple):
    """Axis-aligned rectangle; ``left``/``top`` index columns/rows."""

    left: int
    top: int
    width: int
    height: int


def iterative_threshold(img: np.ndarray) -> float:
    """Converged mean-of-means threshold for a grayscale raster."""
    t, _ = _iterative_threshold(img)
    return t


def _iterative_threshold(img):
    pixels = np.asarray(img, dtype=np.float64)
    if pixels.size == 0:
        raise ValueError("empty image")
    t = 128.0
    for iteration in range(_MAX_THRESHOLD_ITERATIONS):
        fg = pixels[pixels < t]
        bg = pixels[pixels >= t]
        if fg.size == 0 or bg.size == 0:
            return t, iteration
        t_new = (fg.mean() + bg.mean()) / 2.0
        if abs(t_new - t) / t < 0.02:
            return t_new, iteration + 1
        t = t_new
    return t, _MAX_THRESHOLD_ITERATIONS


def binarize(img: np.ndarray) -> np.ndarray:
    """Split a grayscale raster into ink (True) and background (False).

    Raises AllBackground when no pixel falls below the converged threshold.
    """
    pixels = np.asarray(img, dtype=np.float64)
    t = iterative_threshold(pixels)
    mask = pixels < t
    if not mask.any():
        raise AllBackground(f"no pixel below threshold {t:.2f}")
    return mask


def tight_bbox(mask: np.ndarray) -> Rect:
    """Smallest rectangle containing every foreground pixel."""
    rows = np.flatnonzero(mask.any(axis=1))
    if rows.size == 0:
        raise NoForeground("mask has no foreground pixel")
    cols = np.flatnonzero(mask.any(axis=0))
    top, bottom = int(rows[0]), int(rows[-1])
    left, right = int(cols[0]), int(cols[-1])
    return Rect(left=left, top=top, width=right - left + 1, height=bottom - top + 1)


def scale_to_canvas(mask: np.ndarray, box: Rect) -> np.ndarray:
    """Stretch the boxed region onto the 100x100 canvas (aspect not kept)."""
    h, w = mask.shape
    if not (0 <= box.left and 0 <= box.top and box.width >= 1 and box.height >= 1
            and box.left + box.width <= w and box.top + box.height <= h):
        raise ValueError(f"box {box} not inside {h}x{w} raster")
    dest = np.arange(CANVAS_SIZE)
    # round(i * (n-1) / 99) with integer arithmetic; endpoints map exactly.
    rows = box.top + (2 * dest * (box.height - 1) + (CANVAS_SIZE - 1)) // (2 * (CANVAS_SIZE - 1))
    cols = box.left + (2 * dest * (box.width - 1) + (CANVAS_SIZE - 1)) // (2 * (CANVAS_SIZE - 1))
    return mask[np.ix_(rows, cols)].copy()


def _dilate(mask: np.ndarray) -> np.ndarray:
    p = np.pad(mask, 1, constant_values=False)
    out = np.zeros_like(mask)
    h, w = mask.shape
    for dr in (0, 1, 2):
        for dc in (0, 1, 2):
            out |= p[dr:dr + h, dc:dc + w]
    return out


def _erode(mask: np.ndarray) -> np.ndarray:
    p = np.pad(mask, 1, constant_values=True)
    out = np.ones_like(mask)
    h, w = mask.shape
    for dr in (0, 1, 2):
        for dc in (0, 1, 2):
            out &= p[dr:dr + h, dc:dc + w]
    return out


def _close(mask: np.ndarray) -> np.ndarray:
    return _erode(_dilate(mask))


def smooth(canvas: np.ndarray) -> np.ndarray:
    """One dilation then one closing; fills pinholes, bridges 1-px gaps."""
    return _close(_dilate(canvas))


def read_pgm(path) -> np.ndarray:
    """Read an 8-bit P2/P5 portable graymap as a uint8 raster."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise UnreadableImage(f"{path}: {exc}") from exc
    try:
        return _parse_pgm(data)
    except UnreadableImage:
        raise
    except Exception as exc:
        raise UnreadableImage(f"{path}: {exc}") from exc


def _parse_pgm(data: bytes) -> np.ndarray:
    tokens = []
    pos = 0
    # Header: magic, width, height, maxval, with '#' comments allowed.
    while len(tokens) < 4:
        if pos >= len(data):
            raise UnreadableImage("truncated header")
        ch = data[pos:pos + 1]
        if ch.isspace():
            pos += 1
        elif ch == b"#":
            nl = data.find(b"\n", pos)
            pos = len(data) if nl < 0 else nl + 1
        else:
            end = pos
            while end < len(data) and not data[end:end + 1].isspace():
                end += 1
            tokens.append(data[pos:end])
            pos = end
    magic = tokens[0]
    if magic not in (b"P2", b"P5"):
        raise UnreadableImage(f"not a PGM file (magic {magic!r})")
    width, height, maxval = (int(t) for t in tokens[1:4])
    if width < 1 or height < 1:
        raise UnreadableImage(f"bad dimensions {width}x{height}")
    if not 0 < maxval <= 255:
        raise UnreadableImage(f"unsupported maxval {maxval}")
    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        raw = data[pos:pos + width * height]
        if len(raw) < width * height:
            raise UnreadableImage("truncated pixel data")
        img = np.frombuffer(raw, dtype=np.uint8).reshape(height, width)
    else:
        values = data[pos:].split()
        if len(values) < width * height:
            raise UnreadableImage("truncated pixel data")
        img = np.array([int(v) for v in values[:width * height]],
                       dtype=np.uint8).reshape(height, width)
    if img.max(initial=0) > maxval:
        raise UnreadableImage("pixel value exceeds declared maxval")
    return img.copy()


def write_pgm(path, img: np.ndarray) -> None:
    """Write a uint8 raster as binary P5."""
    arr = np.asarray(img, dtype=np.uint8)
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (arr.shape[1], arr.shape[0]))
        fh.write(arr.tobytes())
