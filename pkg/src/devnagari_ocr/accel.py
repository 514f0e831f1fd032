"""Kernel backend selection.

The hot inner loops (skeleton thinning, online backprop) exist twice: a
numba-jitted version and a pure-NumPy fallback.  The jitted path is used
when numba imports cleanly, unless ``DEVNAGARI_OCR_NO_NUMBA=1`` is set in
the environment.  ``benchmarks/bench_backends.py`` times the two against
each other.
"""
from __future__ import annotations

import os

from . import _kernels_np

_DISABLED = os.environ.get("DEVNAGARI_OCR_NO_NUMBA", "").strip().lower() in (
    "1", "true", "yes")

if _DISABLED:
    HAS_NUMBA = False
else:
    try:
        from . import _kernels_nb

        HAS_NUMBA = True
    except ImportError:
        HAS_NUMBA = False

_active = _kernels_nb if HAS_NUMBA else _kernels_np

thin_mask = _active.thin_mask
train_epochs = _active.train_epochs


def backend_name() -> str:
    return "numba" if HAS_NUMBA else "numpy"
