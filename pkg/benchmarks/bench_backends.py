"""Time the numba kernels against their pure-NumPy fallbacks.

Runs skeleton thinning over a batch of random blob rasters and online
backprop over a synthetic classification set, with both backends, and
checks that the two thinning paths produce identical masks.

Usage: python benchmarks/bench_backends.py [--blobs N] [--epochs N]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from devnagari_ocr import _kernels_np

try:
    from devnagari_ocr import _kernels_nb
except ImportError:
    _kernels_nb = None


def random_blob(rng, size=100):
    mask = np.zeros((size, size), dtype=np.uint8)
    rr, cc = np.mgrid[0:size, 0:size]
    for _ in range(rng.integers(3, 9)):
        r, c = rng.integers(10, size - 10, 2)
        rad = rng.integers(2, 9)
        mask[(rr - r) ** 2 + (cc - c) ** 2 <= rad * rad] = 1
    return mask


def bench_thin(n_blobs, seed=0):
    rng = np.random.default_rng(seed)
    blobs = [random_blob(rng) for _ in range(n_blobs)]
    results = {}
    for name, mod in backends():
        mod.thin_mask(blobs[0])  # warm JIT / caches
        t0 = time.perf_counter()
        results[name] = [mod.thin_mask(b) for b in blobs]
        print(f"thin      {name:>6}: {time.perf_counter() - t0:8.3f} s "
              f"({n_blobs} rasters)")
    if len(results) == 2:
        same = all(
            np.array_equal(a, b)
            for a, b in zip(results["numba"], results["numpy"]))
        print(f"thin masks identical across backends: {same}")


def bench_train(epochs, seed=0):
    rng = np.random.default_rng(seed)
    n, n_in, n_h, n_out = 200, 64, 30, 10
    x = rng.random((n, n_in))
    labels = rng.integers(0, n_out, n)
    t = np.full((n, n_out), 0.1)
    t[np.arange(n), labels] = 0.9
    final = {}
    for name, mod in backends():
        w1 = rng.uniform(-0.5, 0.5, (n_h, n_in))
        b1 = rng.uniform(-0.5, 0.5, n_h)
        w2 = rng.uniform(-0.5, 0.5, (n_out, n_h))
        b2 = rng.uniform(-0.5, 0.5, n_out)
        mod.train_epochs(w1.copy(), b1.copy(), w2.copy(), b2.copy(),
                         x, t, 0.8, 0.7, 1, 0.0)  # warm JIT
        t0 = time.perf_counter()
        hist = mod.train_epochs(w1, b1, w2, b2, x, t, 0.8, 0.7, epochs, 0.0)
        print(f"train     {name:>6}: {time.perf_counter() - t0:8.3f} s "
              f"({epochs} epochs x {n} samples), final SSE {hist[-1]:.4f}")
        final[name] = hist[-1]
    if len(final) == 2:
        print(f"final SSE spread across backends: "
              f"{abs(final['numba'] - final['numpy']):.2e}")


def backends():
    out = [("numpy", _kernels_np)]
    if _kernels_nb is not None:
        out.insert(0, ("numba", _kernels_nb))
    else:
        print("numba unavailable; benchmarking the NumPy path only")
    return out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--blobs", type=int, default=60)
    parser.add_argument("--epochs", type=int, default=300)
    args = parser.parse_args()
    bench_thin(args.blobs)
    bench_train(args.epochs)


if __name__ == "__main__":
    main()
