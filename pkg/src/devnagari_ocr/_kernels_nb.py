"""Numba-jitted twins of the kernels in ``_kernels_np``.

Same algorithms, explicit loops.  Thinning is bit-identical to the NumPy
path; training differs only in float accumulation order.
"""
from __future__ import annotations

import math

import numba
import numpy as np


@numba.njit(cache=True)
def _ring_into(mask, r, c, ring):
    h, w = mask.shape
    ring[0] = mask[r - 1, c] if r > 0 else 0
    ring[1] = mask[r - 1, c + 1] if r > 0 and c + 1 < w else 0
    ring[2] = mask[r, c + 1] if c + 1 < w else 0
    ring[3] = mask[r + 1, c + 1] if r + 1 < h and c + 1 < w else 0
    ring[4] = mask[r + 1, c] if r + 1 < h else 0
    ring[5] = mask[r + 1, c - 1] if r + 1 < h and c > 0 else 0
    ring[6] = mask[r, c - 1] if c > 0 else 0
    ring[7] = mask[r - 1, c - 1] if r > 0 and c > 0 else 0


@numba.njit(cache=True)
def _runs(ring):
    # a full ring has no 0-to-1 transition but is still one run
    n = 0
    for i in range(8):
        if ring[i] == 1 and ring[i - 1] == 0:
            n += 1
    if n == 0 and ring[0] == 1:
        return 1
    return n


@numba.njit(cache=True)
def _zs_ok(mask, r, c, phase, ring):
    if mask[r, c] == 0:
        return False
    _ring_into(mask, r, c, ring)
    b = 0
    for i in range(8):
        b += ring[i]
    if b < 2 or b > 6 or _runs(ring) != 1:
        return False
    n, e, s, w = ring[0], ring[2], ring[4], ring[6]
    if phase == 0:
        return n * e * s == 0 and e * s * w == 0
    return n * e * w == 0 and n * s * w == 0


@numba.njit(cache=True)
def _in_block(mask, r, c):
    h, w = mask.shape
    for dr in range(-1, 1):
        for dc in range(-1, 1):
            r0 = r + dr
            c0 = c + dc
            if r0 >= 0 and r0 + 1 < h and c0 >= 0 and c0 + 1 < w:
                if (mask[r0, c0] == 1 and mask[r0, c0 + 1] == 1
                        and mask[r0 + 1, c0] == 1 and mask[r0 + 1, c0 + 1] == 1):
                    return True
    return False


@numba.njit(cache=True)
def _prune_ok(mask, r, c, ring):
    if mask[r, c] == 0 or not _in_block(mask, r, c):
        return False
    _ring_into(mask, r, c, ring)
    b = 0
    for i in range(8):
        b += ring[i]
    return b != 1 and _runs(ring) == 1


@numba.njit(cache=True)
def thin_mask(mask: np.ndarray) -> np.ndarray:
    m = mask.copy()
    h, w = m.shape
    ring = np.zeros(8, dtype=np.uint8)
    cand_r = np.empty(h * w, dtype=np.int64)
    cand_c = np.empty(h * w, dtype=np.int64)
    while True:
        zs_changed = True
        while zs_changed:
            zs_changed = False
            for phase in range(2):
                k = 0
                for r in range(h):
                    for c in range(w):
                        if _zs_ok(m, r, c, phase, ring):
                            cand_r[k] = r
                            cand_c[k] = c
                            k += 1
                for i in range(k):
                    if _zs_ok(m, cand_r[i], cand_c[i], phase, ring):
                        m[cand_r[i], cand_c[i]] = 0
                        zs_changed = True
        pruned = False
        pr_changed = True
        while pr_changed:
            pr_changed = False
            k = 0
            for r in range(h):
                for c in range(w):
                    if _prune_ok(m, r, c, ring):
                        cand_r[k] = r
                        cand_c[k] = c
                        k += 1
            for i in range(k):
                if _prune_ok(m, cand_r[i], cand_c[i], ring):
                    m[cand_r[i], cand_c[i]] = 0
                    pr_changed = True
                    pruned = True
        if not pruned:
            return m


@numba.njit(cache=True)
def _sigmoid(z):
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


@numba.njit(cache=True)
def train_epochs(w1, b1, w2, b2, x, t, lr, momentum, max_epochs, tol):
    n, n_in = x.shape
    n_h = w1.shape[0]
    n_out = w2.shape[0]
    vw1 = np.zeros_like(w1)
    vb1 = np.zeros_like(b1)
    vw2 = np.zeros_like(w2)
    vb2 = np.zeros_like(b2)
    hid = np.empty(n_h)
    out = np.empty(n_out)
    dout = np.empty(n_out)
    history = np.empty(max_epochs)
    prev = 0.0
    done = 0
    for epoch in range(max_epochs):
        sse = 0.0
        for s in range(n):
            for j in range(n_h):
                z = b1[j]
                for i in range(n_in):
                    z += w1[j, i] * x[s, i]
                hid[j] = _sigmoid(z)
            for k in range(n_out):
                z = b2[k]
                for j in range(n_h):
                    z += w2[k, j] * hid[j]
                o = _sigmoid(z)
                out[k] = o
                err = t[s, k] - o
                sse += err * err
                dout[k] = (o - t[s, k]) * o * (1.0 - o)
            for j in range(n_h):
                acc = 0.0
                for k in range(n_out):
                    acc += w2[k, j] * dout[k]
                dh = acc * hid[j] * (1.0 - hid[j])
                for i in range(n_in):
                    vw1[j, i] = momentum * vw1[j, i] - lr * dh * x[s, i]
                    w1[j, i] += vw1[j, i]
                vb1[j] = momentum * vb1[j] - lr * dh
                b1[j] += vb1[j]
            for k in range(n_out):
                for j in range(n_h):
                    vw2[k, j] = momentum * vw2[k, j] - lr * dout[k] * hid[j]
                    w2[k, j] += vw2[k, j]
                vb2[k] = momentum * vb2[k] - lr * dout[k]
                b2[k] += vb2[k]
        history[epoch] = sse
        done = epoch + 1
        if tol > 0.0 and epoch > 0 and prev >= sse and prev - sse < tol:
            break
        prev = sse
    return history[:done].copy()
