"""Thinning and skeleton point classification.

``thin`` runs two-subiteration parallel thinning followed by a 2x2-block
cleanup until the raster is a stable unit-width skeleton.  Deletions are
re-checked sequentially against the live raster, so the number of
8-connected components never changes and the result is idempotent under a
second pass.

Skeleton points are classified purely from their 8-neighborhood: one
foreground neighbor is an open end, more than two is a junction.
"""
from __future__ import annotations

import enum

import numpy as np

from . import accel, _kernels_np
from .errors import OutOfBounds


class PointClass(enum.Enum):
    BACKGROUND = "background"
    ISOLATED = "isolated"
    OPEN_END = "open_end"
    REGULAR = "regular"
    JUNCTION = "junction"


def thin(mask: np.ndarray) -> np.ndarray:
    """Thin a binary raster to a unit-width skeleton (subset of the input)."""
    m = np.ascontiguousarray(mask, dtype=np.uint8)
    return accel.thin_mask(m).astype(bool)


def prune_to_unit_width(mask: np.ndarray) -> np.ndarray:
    """Remove safe pixels of full 2x2 blocks until none remains.

    Row-major sweeps; a pixel goes only if it is not an open end and its
    neighborhood ring is a single foreground run, so connectivity is kept.
    """
    m = np.ascontiguousarray(mask, dtype=np.uint8)
    changed = True
    while changed:
        changed = False
        for r, c in _kernels_np._prune_candidates(m):
            if _kernels_np._prune_ok(m, r, c):
                m[r, c] = 0
                changed = True
    return m.astype(bool)


def neighbor_count(mask: np.ndarray, r: int, c: int) -> int:
    h, w = mask.shape
    if not (0 <= r < h and 0 <= c < w):
        raise OutOfBounds(f"({r}, {c}) outside {h}x{w} raster")
    r0, r1 = max(r - 1, 0), min(r + 2, h)
    c0, c1 = max(c - 1, 0), min(c + 2, w)
    return int(mask[r0:r1, c0:c1].sum()) - int(mask[r, c])


def classify_point(mask: np.ndarray, r: int, c: int) -> PointClass:
    """Classify one raster point from its 8-neighborhood."""
    n = neighbor_count(mask, r, c)
    if not mask[r, c]:
        return PointClass.BACKGROUND
    if n == 0:
        return PointClass.ISOLATED
    if n == 1:
        return PointClass.OPEN_END
    if n == 2:
        return PointClass.REGULAR
    return PointClass.JUNCTION
