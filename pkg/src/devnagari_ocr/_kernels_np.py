"""Pure-NumPy implementations of the hot kernels.

These are the fallback twins of the jitted kernels in ``_kernels_nb``; the
active pair is chosen in ``accel``.  Thinning must produce bit-identical
masks on both backends (pure integer logic, same scan order).  The training
kernel performs the same arithmetic but accumulates dot products through
BLAS, so its floats may differ from the jitted path in the last ulps.
"""
from __future__ import annotations

import numpy as np

# 8-neighborhood ring in the order N, NE, E, SE, S, SW, W, NW.
_RING = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))


def _ring_values(mask, r, c):
    h, w = mask.shape
    out = []
    for dr, dc in _RING:
        rr, cc = r + dr, c + dc
        out.append(int(mask[rr, cc]) if 0 <= rr < h and 0 <= cc < w else 0)
    return out

def _runs(ring):
    """Number of cyclic runs of foreground in an 8-neighborhood ring.

    A full ring has no 0-to-1 transition but is still one run.
    """
    n = 0
    for i in range(8):
        if ring[i] == 1 and ring[i - 1] == 0:
            n += 1
    if n == 0 and ring[0] == 1:
        return 1
    return n


def _zs_ok(mask, r, c, phase):
    """Zhang-Suen deletion test for one pixel against the current mask."""
    if mask[r, c] == 0:
        return False
    ring = _ring_values(mask, r, c)
    b = sum(ring)
    if b < 2 or b > 6 or _runs(ring) != 1:
        return False
    n, e, s, w = ring[0], ring[2], ring[4], ring[6]
    if phase == 0:
        return n * e * s == 0 and e * s * w == 0
    return n * e * w == 0 and n * s * w == 0


def _prune_ok(mask, r, c):
    """Unit-width cleanup test: pixel sits in a full 2x2 block, is not an
    open end, and its ring is a single run (removal keeps connectivity)."""
    if mask[r, c] == 0:
        return False
    h, w = mask.shape
    in_block = False
    for dr in (-1, 0):
        for dc in (-1, 0):
            r0, c0 = r + dr, c + dc
            if 0 <= r0 and r0 + 1 < h and 0 <= c0 and c0 + 1 < w:
                if (mask[r0, c0] and mask[r0, c0 + 1]
                        and mask[r0 + 1, c0] and mask[r0 + 1, c0 + 1]):
                    in_block = True
                    break
        if in_block:
            break
    if not in_block:
        return False
    ring = _ring_values(mask, r, c)
    return sum(ring) != 1 and _runs(ring) == 1


def _neighbor_planes(m):
    p = np.pad(m, 1)
    return (p[:-2, 1:-1], p[:-2, 2:], p[1:-1, 2:], p[2:, 2:],
            p[2:, 1:-1], p[2:, :-2], p[1:-1, :-2], p[:-2, :-2])


def _zs_candidates(m, phase):
    """Vectorized Zhang-Suen candidate detection on a snapshot of the mask."""
    n8 = _neighbor_planes(m)
    b = np.zeros(m.shape, dtype=np.int32)
    for pl in n8:
        b += pl
    a = np.zeros(m.shape, dtype=np.int32)
    for i in range(8):
        a += (n8[i - 1] == 0) & (n8[i] == 1)
    n, e, s, w = n8[0], n8[2], n8[4], n8[6]
    cond = (m == 1) & (b >= 2) & (b <= 6) & (a == 1)
    if phase == 0:
        cond &= (n * e * s == 0) & (e * s * w == 0)
    else:
        cond &= (n * e * w == 0) & (n * s * w == 0)
    return np.argwhere(cond)


def _prune_candidates(m):
    h, w = m.shape
    blk = m[:-1, :-1] & m[:-1, 1:] & m[1:, :-1] & m[1:, 1:]
    in_block = np.zeros((h, w), dtype=bool)
    in_block[:-1, :-1] |= blk.astype(bool)
    in_block[:-1, 1:] |= blk.astype(bool)
    in_block[1:, :-1] |= blk.astype(bool)
    in_block[1:, 1:] |= blk.astype(bool)
    n8 = _neighbor_planes(m)
    b = np.zeros(m.shape, dtype=np.int32)
    for pl in n8:
        b += pl
    a = np.zeros(m.shape, dtype=np.int32)
    for i in range(8):
        a += (n8[i - 1] == 0) & (n8[i] == 1)
    a[b == 8] = 1
    return np.argwhere((m == 1) & in_block & (b != 1) & (a == 1))


def thin_mask(mask: np.ndarray) -> np.ndarray:
    """Thin a 0/1 uint8 raster to a unit-width skeleton.

    Candidates are detected in parallel on a snapshot (Zhang-Suen rules,
    then the 2x2-block cleanup rule) and applied sequentially in row-major
    order, each re-checked against the live mask so no deletion can break
    8-connectivity.  Both stages run to a joint fixpoint.
    """
    m = mask.copy()
    while True:
        zs_changed = True
        while zs_changed:
            zs_changed = False
            for phase in (0, 1):
                for r, c in _zs_candidates(m, phase):
                    if _zs_ok(m, r, c, phase):
                        m[r, c] = 0
                        zs_changed = True
        pruned = False
        pr_changed = True
        while pr_changed:
            pr_changed = False
            for r, c in _prune_candidates(m):
                if _prune_ok(m, r, c):
                    m[r, c] = 0
                    pr_changed = True
                    pruned = True
        if not pruned:
            return m


def _sigmoid_vec(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def train_epochs(w1, b1, w2, b2, x, t, lr, momentum, max_epochs, tol):
    """Online backprop with momentum; mutates the weight arrays in place.

    One pass over the samples in the given order per epoch.  Returns the
    per-epoch sum of squared errors.  Stops early once an epoch improves on
    the previous one by less than ``tol`` without getting worse (online SSE
    fluctuates; a transient increase is not convergence).  tol <= 0 disables
    the early stop.
    """
    n = x.shape[0]
    vw1 = np.zeros_like(w1)
    vb1 = np.zeros_like(b1)
    vw2 = np.zeros_like(w2)
    vb2 = np.zeros_like(b2)
    history = np.empty(max_epochs)
    prev = 0.0
    done = 0
    for epoch in range(max_epochs):
        sse = 0.0
        for s in range(n):
            xs = x[s]
            ts = t[s]
            hid = _sigmoid_vec(w1 @ xs + b1)
            out = _sigmoid_vec(w2 @ hid + b2)
            err = ts - out
            sse += float(err @ err)
            dout = (out - ts) * out * (1.0 - out)
            dhid = (w2.T @ dout) * hid * (1.0 - hid)
            vw2 *= momentum
            vw2 -= lr * np.outer(dout, hid)
            vb2 *= momentum
            vb2 -= lr * dout
            vw1 *= momentum
            vw1 -= lr * np.outer(dhid, xs)
            vb1 *= momentum
            vb1 -= lr * dhid
            w2 += vw2
            b2 += vb2
            w1 += vw1
            b1 += vb1
        history[epoch] = sse
        done = epoch + 1
        if tol > 0.0 and epoch > 0 and prev >= sse and prev - sse < tol:
            break
        prev = sse
    return history[:done].copy()
