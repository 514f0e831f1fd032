"""Three-layer perceptron with sigmoid units, trained by online
backpropagation with momentum.

Targets encode the true class as 0.9 and every other class as 0.1, which
keeps the sigmoids out of saturation.  The per-sample objective is the
conventional half sum of squared errors; the reported history is the raw
epoch SSE.  Training order is the dataset order, so a (seed, data, config)
triple fully determines the trained network.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import accel
from .errors import (DimensionMismatch, EmptyDataset, FormatError,
                     InvalidSizes, VersionMismatch)

MODEL_FORMAT_VERSION = 1

TARGET_ON = 0.9
TARGET_OFF = 0.1


@dataclass
class Mlp:
    """Weights of an input->hidden->output sigmoid network.

    ``w1`` is (hidden x inputs), ``w2`` is (outputs x hidden); biases are
    1-D.  Outputs are per-class confidences in (0, 1).
    """

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray

    @property
    def sizes(self) -> tuple[int, int, int]:
        return self.w1.shape[1], self.w1.shape[0], self.w2.shape[0]

    def copy(self) -> "Mlp":
        return Mlp(self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy())


@dataclass
class TrainConfig:
    learning_rate: float = 0.8
    momentum: float = 0.7
    max_epochs: int = 1000
    sse_tolerance: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0 <= self.momentum < 1:
            raise ValueError("momentum must be in [0, 1)")
        if self.max_epochs < 0:
            raise ValueError("max_epochs must be nonnegative")


def init(sizes: tuple[int, int, int], seed: int) -> Mlp:
    """Fresh network with weights drawn uniformly from [-0.5, 0.5]."""
    try:
        n_in, n_h, n_out = (int(s) for s in sizes)
    except (TypeError, ValueError) as exc:
        raise InvalidSizes(f"bad sizes {sizes!r}") from exc
    if n_in < 1 or n_h < 1 or n_out < 2:
        raise InvalidSizes(
            f"sizes {sizes!r}: need inputs >= 1, hidden >= 1, outputs >= 2")
    rng = np.random.default_rng(seed)
    return Mlp(
        w1=rng.uniform(-0.5, 0.5, (n_h, n_in)),
        b1=rng.uniform(-0.5, 0.5, n_h),
        w2=rng.uniform(-0.5, 0.5, (n_out, n_h)),
        b2=rng.uniform(-0.5, 0.5, n_out),
    )


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def forward(net: Mlp, x) -> np.ndarray:
    """Per-class confidence scores for one input vector."""
    vec = np.asarray(x, dtype=np.float64)
    if vec.shape != (net.sizes[0],):
        raise DimensionMismatch(
            f"input has shape {vec.shape}, network expects ({net.sizes[0]},)")
    hidden = _sigmoid(net.w1 @ vec + net.b1)
    return _sigmoid(net.w2 @ hidden + net.b2)


def one_hot_targets(labels, n_out: int) -> np.ndarray:
    t = np.full((len(labels), n_out), TARGET_OFF)
    for i, label in enumerate(labels):
        t[i, label] = TARGET_ON
    return t


def train(net: Mlp, samples, cfg: TrainConfig) -> tuple[Mlp, list[float]]:
    """Train a copy of ``net`` on (values, label) pairs; returns it with the
    per-epoch SSE history."""
    n_in, _, n_out = net.sizes
    samples = list(samples)
    if not samples:
        raise EmptyDataset("no training samples")
    x = np.empty((len(samples), n_in))
    labels = []
    for i, (values, label) in enumerate(samples):
        vec = np.asarray(values, dtype=np.float64)
        if vec.shape != (n_in,):
            raise DimensionMismatch(
                f"sample {i} has shape {vec.shape}, network expects ({n_in},)")
        if not 0 <= int(label) < n_out:
            raise ValueError(f"sample {i} label {label} outside [0, {n_out})")
        x[i] = vec
        labels.append(int(label))
    t = one_hot_targets(labels, n_out)
    trained = net.copy()
    history = accel.train_epochs(
        trained.w1, trained.b1, trained.w2, trained.b2, x, t,
        float(cfg.learning_rate), float(cfg.momentum),
        int(cfg.max_epochs), float(cfg.sse_tolerance))
    return trained, [float(v) for v in history]


def _backprop(net: Mlp, x, target):
    """Analytic gradients of E = 0.5 * sum((target - output)^2)."""
    vec = np.asarray(x, dtype=np.float64)
    tgt = np.asarray(target, dtype=np.float64)
    hidden = _sigmoid(net.w1 @ vec + net.b1)
    out = _sigmoid(net.w2 @ hidden + net.b2)
    dout = (out - tgt) * out * (1.0 - out)
    dhid = (net.w2.T @ dout) * hidden * (1.0 - hidden)
    return (np.outer(dhid, vec), dhid.copy(), np.outer(dout, hidden), dout.copy())


def _loss(net: Mlp, x, target):
    err = np.asarray(target, dtype=np.float64) - forward(net, x)
    return 0.5 * float(err @ err)


def _fd_gradients(net: Mlp, x, target, step: float = 1e-5):
    """Central finite differences of the same loss over every parameter."""
    grads = []
    for arr in (net.w1, net.b1, net.w2, net.b2):
        g = np.zeros_like(arr)
        flat = arr.ravel()
        gflat = g.ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            plus = _loss(net, x, target)
            flat[i] = orig - step
            minus = _loss(net, x, target)
            flat[i] = orig
            gflat[i] = (plus - minus) / (2.0 * step)
        grads.append(g)
    return tuple(grads)


def max_gradient_error(analytic, numeric) -> float:
    """Largest per-parameter relative error, floored at unit scale 1e-3."""
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.abs(a) + np.abs(n) + 1e-3
        worst = max(worst, float((np.abs(a - n) / denom).max()))
    return worst


def gradient_check(net: Mlp, sample, step: float = 1e-5) -> float:
    """Compare backprop gradients with central finite differences."""
    x, target = sample
    analytic = _backprop(net, x, target)
    numeric = _fd_gradients(net.copy(), x, target, step)
    return max_gradient_error(analytic, numeric)


def save(net: Mlp, path) -> None:
    """Write the network as a line-oriented text file (exact roundtrip)."""
    n_in, n_h, n_out = net.sizes
    lines = [f"mlp {MODEL_FORMAT_VERSION}", f"sizes {n_in} {n_h} {n_out}"]
    for name, arr in (("w1", net.w1), ("b1", net.b1), ("w2", net.w2), ("b2", net.b2)):
        lines.append(name)
        rows = arr if arr.ndim == 2 else arr[None, :]
        for row in rows:
            lines.append(" ".join(repr(float(v)) for v in row))
    lines.append("end")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load(path) -> Mlp:
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(lines):
            raise FormatError(f"{path}: truncated model file")
        line = lines[pos]
        pos += 1
        return line

    header = take().split()
    if len(header) != 2 or header[0] != "mlp":
        raise FormatError(f"{path}: not a model file")
    if header[1] != str(MODEL_FORMAT_VERSION):
        raise VersionMismatch(f"{path}: unsupported model version {header[1]}")
    sizes_line = take().split()
    if len(sizes_line) != 4 or sizes_line[0] != "sizes":
        raise FormatError(f"{path}: missing sizes line")
    try:
        n_in, n_h, n_out = (int(v) for v in sizes_line[1:])
    except ValueError as exc:
        raise FormatError(f"{path}: bad sizes line") from exc

    def block(name, shape):
        if take() != name:
            raise FormatError(f"{path}: expected section {name!r}")
        rows = []
        for _ in range(shape[0]):
            parts = take().split()
            if len(parts) != shape[1]:
                raise FormatError(f"{path}: wrong row length in {name}")
            try:
                rows.append([float(v) for v in parts])
            except ValueError as exc:
                raise FormatError(f"{path}: bad number in {name}") from exc
        return np.array(rows)

    if n_in < 1 or n_h < 1 or n_out < 2:
        raise FormatError(f"{path}: invalid sizes {n_in} {n_h} {n_out}")
    w1 = block("w1", (n_h, n_in))
    b1 = block("b1", (1, n_h))[0]
    w2 = block("w2", (n_out, n_h))
    b2 = block("b2", (1, n_out))[0]
    if take() != "end":
        raise FormatError(f"{path}: missing end marker")
    return Mlp(w1=w1, b1=b1, w2=w2, b2=b2)
