"""Shared test helpers: random blob rasters, an independent union-find
component counter, and a synthetic glyph corpus renderer.

Glyph classes are stroke patterns that stay distinct after the pipeline's
tight-crop-and-stretch normalization (solid bars all normalize to a full
canvas, so every class differs in internal structure instead).
"""
from __future__ import annotations

import os

import numpy as np
import pytest

from devnagari_ocr.raster import write_pgm


def random_blob(rng, size=100, max_disks=9):
    """Union of a few random disks; sometimes sparse, sometimes chunky."""
    mask = np.zeros((size, size), dtype=bool)
    rr, cc = np.mgrid[0:size, 0:size]
    for _ in range(rng.integers(1, max_disks)):
        r, c = rng.integers(5, size - 5, 2)
        rad = rng.integers(1, 9)
        mask |= (rr - r) ** 2 + (cc - c) ** 2 <= rad * rad
    return mask


def count_components(mask) -> int:
    """8-connected foreground component count via union-find."""
    coords = [(int(r), int(c)) for r, c in np.argwhere(mask)]
    index = {p: i for i, p in enumerate(coords)}
    parent = list(range(len(coords)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (r, c), i in index.items():
        for dr, dc in ((0, 1), (1, -1), (1, 0), (1, 1)):
            j = index.get((r + dr, c + dc))
            if j is not None:
                ra, rb = find(i), find(j)
                if ra != rb:
                    parent[ra] = rb
    return len({find(i) for i in range(len(coords))})


def _stamp(ink, r, c, thickness):
    h, w = ink.shape
    r0, c0 = max(r, 0), max(c, 0)
    r1, c1 = min(r + thickness, h), min(c + thickness, w)
    if r0 < r1 and c0 < c1:
        ink[r0:r1, c0:c1] = True


def _line(ink, r0, c0, r1, c1, thickness):
    steps = 2 * int(max(abs(r1 - r0), abs(c1 - c0))) + 1
    for t in np.linspace(0.0, 1.0, steps):
        _stamp(ink, int(round(r0 + t * (r1 - r0))),
               int(round(c0 + t * (c1 - c0))), thickness)


def draw_glyph_mask(shape_id, thickness=2, size=64, offset=(12, 12), box=39):
    """Ink mask for one of ten stroke patterns inside a design box."""
    ink = np.zeros((size, size), dtype=bool)
    oy, ox = offset
    b = box
    m = b // 2
    segs = {
        0: [(0, m, b, m), (m, 0, m, b)],                      # plus
        1: [(0, 0, b, b), (0, b, b, 0)],                      # X
        2: [(0, 0, 0, b), (b, 0, b, b), (0, 0, b, 0), (0, b, b, b)],  # box
        3: [(0, 0, 0, b), (0, m, b, m)],                      # T
        4: [(0, 0, b, 0), (b, 0, b, b)],                      # L
        5: [(0, 0, 0, b), (0, b, b, 0), (b, 0, b, b)],        # Z
        6: [(0, m, m, b), (m, b, b, m), (b, m, m, 0), (m, 0, 0, m)],  # diamond
        7: [(0, 0, b, 0), (0, b, b, b), (m, 0, m, b)],        # H
        8: [(0, 0, b, 0), (0, b, b, b), (b, 0, b, b)],        # U
        9: [(0, 0, b, 0), (b, 0, b, b), (0, 0, b, b)],        # right triangle
    }
    for r0, c0, r1, c1 in segs[shape_id]:
        _line(ink, oy + r0, ox + c0, oy + r1, ox + c1, thickness)
    return ink


def render_glyph(shape_id, rng=None, size=64):
    """Grayscale rendering; with an rng the stroke pattern is shifted and
    thickened at random, pixels get intensity noise, small ink speckles
    appear near the glyph, and one stroke patch may drop out."""
    if rng is None:
        ink = draw_glyph_mask(shape_id, size=size)
        noise_bg = noise_fg = 0
    else:
        offset = (12 + int(rng.integers(-4, 5)), 12 + int(rng.integers(-4, 5)))
        thickness = int(rng.integers(1, 4))
        ink = draw_glyph_mask(shape_id, thickness=thickness, size=size,
                              offset=offset)
        for _ in range(int(rng.integers(0, 3))):  # stray ink specks
            r, c = rng.integers(10, size - 12, 2)
            ink[r:r + 2, c:c + 2] = True
        if rng.random() < 0.3:  # a missing patch of stroke
            r, c = rng.integers(16, 48, 2)
            ink[r:r + 3, c:c + 3] = False
        noise_bg = rng.integers(-15, 16, (size, size))
        noise_fg = rng.integers(-15, 16, (size, size))
    img = np.full((size, size), 220, dtype=np.int64) + noise_bg
    img[ink] = (np.full((size, size), 30, dtype=np.int64) + noise_fg)[ink]
    return np.clip(img, 0, 255).astype(np.uint8)


def build_corpus(root, n_classes, n_variants, seed, noisy=True):
    """Write a one-directory-per-class PGM dataset; returns its path."""
    rng = np.random.default_rng(seed)
    for cls in range(n_classes):
        class_dir = os.path.join(root, f"class_{cls:02d}")
        os.makedirs(class_dir, exist_ok=True)
        for i in range(n_variants):
            img = render_glyph(cls % 10, rng if noisy else None)
            write_pgm(os.path.join(class_dir, f"g{i:03d}.pgm"), img)
    return str(root)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """3 easily separable classes x 12 near-identical variants."""
    root = tmp_path_factory.mktemp("corpus3")
    rng = np.random.default_rng(77)
    for cls in range(3):
        class_dir = root / f"class_{cls:02d}"
        class_dir.mkdir()
        for i in range(12):
            shift = (12 + int(rng.integers(-1, 2)), 12 + int(rng.integers(-1, 2)))
            ink = draw_glyph_mask(cls, thickness=2, offset=shift)
            img = np.full((64, 64), 220, dtype=np.uint8)
            img[ink] = 30
            write_pgm(str(class_dir / f"g{i:03d}.pgm"), img)
    return str(root)
