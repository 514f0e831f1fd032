"""The three glyph feature extractors: shadow, chain-code histogram,
intersection counts.

Geometry conventions, all on the 100x100 canvas:

* Shadow: the canvas is cut into 8 triangular octants by its two diagonals
  and its horizontal/vertical center lines.  Octants are indexed clockwise
  starting from the upper triangle of the top-left quadrant; each octant's
  ink is projected onto its two perpendicular straight edges (the half box
  side it touches, then the half center line), and each shadow is the
  number of distinct covered positions divided by the 50-pixel edge length.
  Octants are closed regions over pixel centers, so a pixel exactly on a
  diagonal shadows both octants it borders.
* Chain codes: directions are 0=E, 1=NE, 2=N, 3=NW, 4=W, 5=SW, 6=S, 7=SE
  with rows growing downward.  Each 8-connected component of contour
  pixels is traced once, starting at its topmost-then-leftmost pixel with
  the smallest legal code, then following the boundary clockwise until the
  walk re-enters its start.  Contour pixels the walk cannot reach are
  emitted as single-pixel traces with no codes.  Traces are ordered by
  start pixel, topmost then leftmost.
* Histogram: 5x5 blocks of 20x20 pixels, row-major; each code is binned in
  the block of the pixel it leaves, 8 directions per block, and the 200
  counts are divided by the total number of codes.
* Intersections: 4x4 segments of 25x25 pixels, row-major; features 0-15
  count open ends per segment, features 16-31 count junctions.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .raster import CANVAS_SIZE
from .skeleton import PointClass, classify_point

SHADOW = "shadow"
CHAINCODE = "chaincode"
INTERSECTION = "intersection"

FEATURE_LENGTHS = {SHADOW: 16, CHAINCODE: 200, INTERSECTION: 32}
FEATURE_KINDS = (SHADOW, CHAINCODE, INTERSECTION)

# Step vectors (drow, dcol) indexed by chain code.
CODE_STEPS = ((0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1))


@dataclass(frozen=True)
class FeatureVector:
    kind: str
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in FEATURE_LENGTHS:
            raise DimensionMismatch(f"unknown feature kind {self.kind!r}")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (FEATURE_LENGTHS[self.kind],):
            raise DimensionMismatch(
                f"{self.kind} vector must have {FEATURE_LENGTHS[self.kind]} "
                f"entries, got shape {vals.shape}")
        object.__setattr__(self, "values", vals)


@dataclass
class ChainTrace:
    """One traced contour: a start pixel plus the codes leaving each pixel."""

    start: tuple[int, int]
    codes: list[int] = field(default_factory=list)
    points: list[tuple[int, int]] = field(default_factory=list)


def _require_canvas(mask):
    if mask.shape != (CANVAS_SIZE, CANVAS_SIZE):
        raise DimensionMismatch(
            f"expected {CANVAS_SIZE}x{CANVAS_SIZE} canvas, got {mask.shape}")


def _octant_masks() -> np.ndarray:
    """Closed-triangle membership masks for the 8 octants.

    Pixel centers never sit on the center lines, but they do sit on the
    diagonals; a diagonal pixel belongs to both octants it borders (the
    octants are closed regions, so a fully inked canvas shadows every
    segment completely).
    """
    half = CANVAS_SIZE / 2.0 - 0.5
    offs = np.arange(CANVAS_SIZE, dtype=np.float64) - half
    dy = offs[:, None] + np.zeros(CANVAS_SIZE)
    dx = np.zeros((CANVAS_SIZE, 1)) + offs[None, :]
    return np.stack((
        (dx <= 0) & (dy <= dx),
        (dx >= 0) & (dy <= -dx),
        (dx >= 0) & (-dx <= dy) & (dy <= 0),
        (dx >= 0) & (0 <= dy) & (dy <= dx),
        (dx >= 0) & (dy >= dx),
        (dx <= 0) & (dy >= -dx),
        (dx <= 0) & (0 <= dy) & (dy <= -dx),
        (dx <= 0) & (dx <= dy) & (dy <= 0),
    ))


_OCTANT_MASKS = _octant_masks()

# Per octant: axis whose distinct indices form the box-side projection
# ("row" or "col"); the center-line projection uses the other axis.
_BOX_AXIS = ("col", "col", "row", "row", "col", "col", "row", "row")
_HALF = CANVAS_SIZE // 2


def shadow_features(canvas: np.ndarray) -> FeatureVector:
    """16 projection lengths, two per octant, each normalized to [0, 1]."""
    _require_canvas(canvas)
    values = np.zeros(16)
    for o in range(8):
        sel = canvas & _OCTANT_MASKS[o]
        r_cov = int(sel.any(axis=1).sum()) / _HALF
        c_cov = int(sel.any(axis=0).sum()) / _HALF
        if _BOX_AXIS[o] == "col":
            values[2 * o] = c_cov
            values[2 * o + 1] = r_cov
        else:
            values[2 * o] = r_cov
            values[2 * o + 1] = c_cov
    return FeatureVector(SHADOW, values)


def extract_contour(mask: np.ndarray) -> np.ndarray:
    """Foreground pixels with at least one background 4-neighbor.

    The raster border counts as background.
    """
    m = mask.astype(bool)
    p = np.pad(m, 1, constant_values=False)
    interior = p[:-2, 1:-1] & p[2:, 1:-1] & p[1:-1, :-2] & p[1:-1, 2:]
    return m & ~interior


def _components(pixels: set[tuple[int, int]]) -> list[list[tuple[int, int]]]:
    """8-connected components, each listed with its pixels, ordered by the
    topmost-then-leftmost member."""
    seen = set()
    comps = []
    for start in sorted(pixels):
        if start in seen:
            continue
        stack = [start]
        seen.add(start)
        comp = [start]
        while stack:
            r, c = stack.pop()
            for dr, dc in CODE_STEPS:
                q = (r + dr, c + dc)
                if q in pixels and q not in seen:
                    seen.add(q)
                    stack.append(q)
                    comp.append(q)
        comps.append(comp)
    return comps


def _clockwise_walk(pixels, start):
    """Moore boundary walk from ``start``; returns (codes, points, visited).

    First move takes the smallest legal code; afterwards the scan resumes
    one step clockwise past the backtrack direction.  The walk stops on
    re-entering the start pixel.
    """
    codes: list[int] = []
    points: list[tuple[int, int]] = []
    visited = {start}
    first = None
    for code in range(8):
        dr, dc = CODE_STEPS[code]
        if (start[0] + dr, start[1] + dc) in pixels:
            first = code
            break
    if first is None:
        return codes, points, visited
    cur = start
    move = first
    limit = 8 * len(pixels) + 8
    for _ in range(limit):
        points.append(cur)
        codes.append(move)
        cur = (cur[0] + CODE_STEPS[move][0], cur[1] + CODE_STEPS[move][1])
        if cur == start:
            return codes, points, visited
        visited.add(cur)
        scan = (move + 4 - 1) % 8
        move = -1
        for k in range(8):
            code = (scan - k) % 8
            dr, dc = CODE_STEPS[code]
            if (cur[0] + dr, cur[1] + dc) in pixels:
                move = code
                break
        if move < 0:  # unreachable: cur has at least its predecessor
            break
    return None, None, visited


def chain_trace(contour: np.ndarray) -> list[ChainTrace]:
    """Trace every 8-connected contour component clockwise."""
    pixels = {(int(r), int(c)) for r, c in np.argwhere(contour)}
    traces = []
    for comp in _components(pixels):
        start = min(comp)
        codes, points, visited = _clockwise_walk(pixels, start)
        if codes is None:  # walk failed to close; emit the component as singles
            visited = set()
        elif codes or len(comp) == 1:
            traces.append(ChainTrace(start=start, codes=codes, points=points))
        for p in sorted(set(comp) - visited):
            traces.append(ChainTrace(start=p))
    traces.sort(key=lambda t: t.start)
    return traces


def chaincode_histogram_features(traces) -> FeatureVector:
    """200 relative code frequencies over 5x5 blocks of the canvas."""
    counts = np.zeros(200)
    total = 0
    for trace in traces:
        for (r, c), code in zip(trace.points, trace.codes):
            if not (0 <= r < CANVAS_SIZE and 0 <= c < CANVAS_SIZE):
                raise DimensionMismatch(f"trace pixel ({r}, {c}) off canvas")
            block = (r // 20) * 5 + c // 20
            counts[block * 8 + code] += 1
            total += 1
    if total:
        counts /= total
    return FeatureVector(CHAINCODE, counts)


def intersection_features(skel: np.ndarray) -> FeatureVector:
    """Open-end and junction counts over the 4x4 segment grid."""
    _require_canvas(skel)
    values = np.zeros(32)
    for r, c in np.argwhere(skel):
        cls = classify_point(skel, int(r), int(c))
        seg = (r // 25) * 4 + c // 25
        if cls is PointClass.OPEN_END:
            values[seg] += 1
        elif cls is PointClass.JUNCTION:
            values[16 + seg] += 1
    return FeatureVector(INTERSECTION, values)


def classifier_input(kind: str, values: np.ndarray) -> np.ndarray:
    """Feature values as fed to the classifiers.

    Intersection counts are divided by 10 so all three inputs live on a
    comparable [0, 1]-ish scale; the other two kinds are already normalized.
    """
    vals = np.asarray(values, dtype=np.float64)
    if kind == INTERSECTION:
        return vals / 10.0
    return vals.copy()
