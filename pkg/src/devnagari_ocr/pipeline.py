"""Dataset ingestion, end-to-end feature extraction, three-fold
cross-validation, and report serialization.

A dataset is a directory with one subdirectory per class; class indices
follow the sorted subdirectory names.  Unreadable files are skipped with a
warning and counted; blank images are rejected per sample during
extraction and excluded from every accuracy denominator.

Each cross-validation rotation trains the three classifiers on two parts
and tests on the third.  Fusion weights come from the classifiers'
accuracies on a calibration slice (the final 20% of the shuffled training
part, held out from training), never from the test part.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from . import mlp
from .ensemble import (EnsembleWeights, combine, derive_weights, top_k,
                       union_top1_hit)
from .errors import (AllBackground, AllZeroAccuracies, DataError, EmptyDataset,
                     FormatError, LengthMismatch, NoForeground, TooFewClasses,
                     TooFewSamples, UnreadableImage)
from .features import (CHAINCODE, FEATURE_KINDS, FEATURE_LENGTHS, INTERSECTION,
                       SHADOW, chain_trace, chaincode_histogram_features,
                       classifier_input, extract_contour, intersection_features,
                       shadow_features)
from .raster import binarize, read_pgm, scale_to_canvas, smooth, tight_bbox
from .skeleton import thin

REPORT_FORMAT_VERSION = 1

DEFAULT_HIDDEN = {SHADOW: 30, CHAINCODE: 70, INTERSECTION: 20}

TOP_K_MAX = 5


@dataclass
class Sample:
    id: str
    label: int
    label_name: str
    path: str
    features: dict = field(default_factory=dict)
    gray: np.ndarray | None = None


@dataclass(frozen=True)
class FoldSplit:
    """Three disjoint id tuples covering the dataset."""

    parts: tuple[tuple[str, ...], ...]

    def rotations(self):
        """Train/test id pairs: parts 1+2/3, then 1+3/2, then 2+3/1."""
        a, b, c = self.parts
        yield a + b, c
        yield a + c, b
        yield b + c, a


@dataclass
class FoldResult:
    test_size: int
    calibration_acc: dict
    weights: dict
    classifier_top1: dict
    topk: dict
    union_top1: float


@dataclass
class EvalReport:
    class_names: list
    n_samples: int
    n_rejected: int
    n_skipped: int
    seed: int
    folds: list
    classifier_top1: dict
    topk: dict
    union_top1: float
    weights: dict
    confusion: np.ndarray


@dataclass
class CvConfig:
    data_dir: str
    hidden: dict = field(default_factory=lambda: dict(DEFAULT_HIDDEN))
    learning_rate: float = 0.8
    momentum: float = 0.7
    max_epochs: int = 1000
    sse_tolerance: float = 1e-4
    seed: int = 0


def _read_gray(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic in (b"P2", b"P5"):
        return read_pgm(path)
    try:
        from PIL import Image
    except ImportError as exc:
        raise UnreadableImage(
            f"{path}: not a PGM file and pillow is not installed") from exc
    try:
        with Image.open(path) as img:
            return np.asarray(img.convert("L"), dtype=np.uint8)
    except Exception as exc:
        raise UnreadableImage(f"{path}: {exc}") from exc


def load_dataset(root_dir, on_skip=None):
    """Load every readable grayscale image under one-directory-per-class.

    Returns (samples, class_names, skipped_count).  Class indices follow
    the sorted subdirectory names.  Unreadable files are passed to
    ``on_skip`` (or warned about) and counted, not fatal.
    """
    if not os.path.isdir(root_dir):
        raise EmptyDataset(f"{root_dir} is not a directory")
    class_names = sorted(
        d for d in os.listdir(root_dir)
        if os.path.isdir(os.path.join(root_dir, d)))
    if not class_names:
        raise EmptyDataset(f"{root_dir} contains no class subdirectories")
    samples = []
    skipped = 0
    for label, name in enumerate(class_names):
        class_dir = os.path.join(root_dir, name)
        for fname in sorted(os.listdir(class_dir)):
            path = os.path.join(class_dir, fname)
            if not os.path.isfile(path):
                continue
            try:
                img = _read_gray(path)
            except UnreadableImage as exc:
                skipped += 1
                if on_skip is not None:
                    on_skip(path, exc)
                else:
                    import warnings

                    warnings.warn(f"skipping {path}: {exc}")
                continue
            samples.append(Sample(
                id=f"{name}/{fname}", label=label, label_name=name,
                path=path, gray=img))
    if not samples:
        raise EmptyDataset(f"{root_dir} contains no readable images")
    return samples, class_names, skipped


def process_image(gray: np.ndarray) -> dict:
    """Run one grayscale raster through the full feature chain."""
    mask = binarize(gray)
    canvas = smooth(scale_to_canvas(mask, tight_bbox(mask)))
    traces = chain_trace(extract_contour(canvas))
    return {
        SHADOW: shadow_features(canvas).values,
        CHAINCODE: chaincode_histogram_features(traces).values,
        INTERSECTION: intersection_features(thin(canvas)).values,
    }


def extract_all(samples):
    """Fill sample features; returns (kept, rejected) where rejected pairs
    each unprocessable sample with the error that rejected it."""
    kept, rejected = [], []
    for sample in samples:
        gray = sample.gray if sample.gray is not None else _read_gray(sample.path)
        try:
            feats = process_image(gray)
        except (AllBackground, NoForeground) as exc:
            rejected.append((sample, exc))
            continue
        sample.features = feats
        sample.gray = None
        kept.append(sample)
    return kept, rejected


def three_fold_split(samples, seed: int) -> FoldSplit:
    """Stratified split into three parts via seeded shuffle + round-robin."""
    if len(samples) < 3:
        raise TooFewSamples(f"need at least 3 samples, got {len(samples)}")
    rng = np.random.default_rng(seed)
    by_class = {}
    for sample in samples:
        by_class.setdefault(sample.label, []).append(sample.id)
    parts = ([], [], [])
    counter = 0
    for label in sorted(by_class):
        ids = by_class[label]
        order = rng.permutation(len(ids))
        for idx in order:
            parts[counter % 3].append(ids[idx])
            counter += 1
    return FoldSplit(parts=tuple(tuple(p) for p in parts))


def topk_accuracy(decisions, labels, k: int) -> float:
    """Percentage of samples whose label is among the k best classes."""
    if len(decisions) != len(labels):
        raise LengthMismatch(
            f"{len(decisions)} decisions vs {len(labels)} labels")
    if not decisions:
        return 0.0
    hits = sum(
        1 for dec, label in zip(decisions, labels) if label in top_k(dec, k))
    return 100.0 * hits / len(decisions)


def confusion_matrix(decisions, labels, n_classes=None) -> np.ndarray:
    """Rows are true classes, columns are fused top-1 predictions."""
    if len(decisions) != len(labels):
        raise LengthMismatch(
            f"{len(decisions)} decisions vs {len(labels)} labels")
    if n_classes is None:
        if not decisions:
            raise LengthMismatch("cannot size confusion matrix of nothing")
        n_classes = decisions[0].scores.size
    matrix = np.zeros((n_classes, n_classes), dtype=np.int64)
    for dec, label in zip(decisions, labels):
        matrix[label, dec.winner] += 1
    return matrix


def _derive_or_uniform(accuracies) -> EnsembleWeights:
    try:
        return derive_weights(accuracies)
    except AllZeroAccuracies:
        return EnsembleWeights(
            accuracies=tuple(float(a) for a in accuracies),
            weights=np.full(3, 1.0 / 3.0))


def _train_fold(by_id, train_ids, n_out: int, cfg: CvConfig, fold_idx: int):
    """Train the three classifiers on the training part minus a held-out
    calibration slice; returns (nets, calibration accuracies, weights)."""
    rng = np.random.default_rng(cfg.seed * 9973 + fold_idx * 131 + 17)
    order = [train_ids[i] for i in rng.permutation(len(train_ids))]
    n_cal = max(1, len(order) // 5)
    fit_ids, cal_ids = order[:-n_cal], order[-n_cal:]
    if not fit_ids:
        raise TooFewSamples("training part too small for a calibration slice")
    nets = {}
    cal_acc = {}
    for kind_idx, kind in enumerate(FEATURE_KINDS):
        net = mlp.init(
            (FEATURE_LENGTHS[kind], cfg.hidden[kind], n_out),
            seed=cfg.seed * 7919 + fold_idx * 101 + kind_idx)
        pairs = [
            (classifier_input(kind, by_id[i].features[kind]), by_id[i].label)
            for i in fit_ids]
        train_cfg = mlp.TrainConfig(
            learning_rate=cfg.learning_rate, momentum=cfg.momentum,
            max_epochs=cfg.max_epochs, sse_tolerance=cfg.sse_tolerance,
            seed=cfg.seed)
        nets[kind], _ = mlp.train(net, pairs, train_cfg)
        hits = sum(
            1 for i in cal_ids
            if int(np.argmax(mlp.forward(
                nets[kind],
                classifier_input(kind, by_id[i].features[kind])))) == by_id[i].label)
        cal_acc[kind] = 100.0 * hits / len(cal_ids)
    weights = _derive_or_uniform([cal_acc[k] for k in FEATURE_KINDS])
    return nets, cal_acc, weights


def _scores_for(nets, sample):
    return [
        mlp.forward(nets[kind], classifier_input(kind, sample.features[kind]))
        for kind in FEATURE_KINDS]


def run_cv(cfg: CvConfig) -> EvalReport:
    """Full cross-validation over the dataset directory in the config."""
    skips = []
    samples, class_names, n_skipped = load_dataset(
        cfg.data_dir, on_skip=lambda path, exc: skips.append(path))
    kept, rejected = extract_all(samples)
    return _cv_on_samples(kept, class_names, cfg,
                          n_rejected=len(rejected), n_skipped=n_skipped)


def _cv_on_samples(kept, class_names, cfg: CvConfig,
                   n_rejected: int = 0, n_skipped: int = 0) -> EvalReport:
    if len({s.label for s in kept}) < 2:
        raise TooFewClasses("cross-validation needs at least two classes")
    n_out = len(class_names)
    split = three_fold_split(kept, cfg.seed)
    by_id = {s.id: s for s in kept}
    folds = []
    confusion = np.zeros((n_out, n_out), dtype=np.int64)
    total = 0
    total_topk = {k: 0 for k in range(1, TOP_K_MAX + 1)}
    total_union = 0
    total_clf = {kind: 0 for kind in FEATURE_KINDS}
    cal_weighted = {kind: 0.0 for kind in FEATURE_KINDS}
    for fold_idx, (train_ids, test_ids) in enumerate(split.rotations()):
        nets, cal_acc, weights = _train_fold(by_id, train_ids, n_out, cfg, fold_idx)
        decisions, labels = [], []
        fold_topk = {k: 0 for k in range(1, TOP_K_MAX + 1)}
        fold_union = 0
        fold_clf = {kind: 0 for kind in FEATURE_KINDS}
        for sid in test_ids:
            sample = by_id[sid]
            scores = _scores_for(nets, sample)
            decision = combine(scores, weights)
            decisions.append(decision)
            labels.append(sample.label)
            for k in range(1, TOP_K_MAX + 1):
                if sample.label in top_k(decision, min(k, n_out)):
                    fold_topk[k] += 1
            if union_top1_hit(scores, sample.label):
                fold_union += 1
            for kind, vec in zip(FEATURE_KINDS, scores):
                if int(np.argmax(vec)) == sample.label:
                    fold_clf[kind] += 1
        n_test = len(test_ids)
        confusion += confusion_matrix(decisions, labels, n_classes=n_out)
        folds.append(FoldResult(
            test_size=n_test,
            calibration_acc=dict(cal_acc),
            weights={k: float(w) for k, w in zip(FEATURE_KINDS, weights.weights)},
            classifier_top1={k: 100.0 * fold_clf[k] / n_test for k in FEATURE_KINDS},
            topk={k: 100.0 * fold_topk[k] / n_test for k in range(1, TOP_K_MAX + 1)},
            union_top1=100.0 * fold_union / n_test,
        ))
        total += n_test
        for k in range(1, TOP_K_MAX + 1):
            total_topk[k] += fold_topk[k]
        total_union += fold_union
        for kind in FEATURE_KINDS:
            total_clf[kind] += fold_clf[kind]
            cal_weighted[kind] += cal_acc[kind] * n_test
    agg_cal = [cal_weighted[kind] / total for kind in FEATURE_KINDS]
    agg_weights = _derive_or_uniform(agg_cal)
    return EvalReport(
        class_names=list(class_names),
        n_samples=total,
        n_rejected=n_rejected,
        n_skipped=n_skipped,
        seed=cfg.seed,
        folds=folds,
        classifier_top1={k: 100.0 * total_clf[k] / total for k in FEATURE_KINDS},
        topk={k: 100.0 * total_topk[k] / total for k in range(1, TOP_K_MAX + 1)},
        union_top1=100.0 * total_union / total,
        weights={k: float(w) for k, w in zip(FEATURE_KINDS, agg_weights.weights)},
        confusion=confusion,
    )


def write_features(path, samples) -> None:
    """Dump extracted vectors, one line per (sample, kind):
    label, kind tag, then the values in decimal text, comma-separated."""
    with open(path, "w", encoding="ascii") as fh:
        for sample in samples:
            for kind in FEATURE_KINDS:
                values = ",".join(repr(float(v)) for v in sample.features[kind])
                fh.write(f"{sample.label},{kind},{values}\n")


def read_features(path):
    """Parse a feature dump into (label, kind, values) triples."""
    triples = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) < 3:
                raise FormatError(f"{path}:{lineno}: too few fields")
            try:
                label = int(parts[0])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad label") from exc
            if label < 0:
                raise FormatError(f"{path}:{lineno}: negative label")
            kind = parts[1]
            if kind not in FEATURE_LENGTHS:
                raise FormatError(f"{path}:{lineno}: unknown kind {kind!r}")
            try:
                values = np.array([float(v) for v in parts[2:]])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: bad value") from exc
            if values.size != FEATURE_LENGTHS[kind]:
                raise FormatError(
                    f"{path}:{lineno}: expected {FEATURE_LENGTHS[kind]} values")
            triples.append((label, kind, values))
    if not triples:
        raise EmptyDataset(f"{path}: no feature lines")
    return triples


def write_report(report: EvalReport, path) -> None:
    """Serialize a report: header, key=value lines, confusion CSV."""
    lines = [f"cv-report {REPORT_FORMAT_VERSION}"]
    lines.append("classes=" + ",".join(report.class_names))
    lines.append(f"n_samples={report.n_samples}")
    lines.append(f"n_rejected={report.n_rejected}")
    lines.append(f"n_skipped={report.n_skipped}")
    lines.append(f"seed={report.seed}")
    lines.append(f"folds={len(report.folds)}")
    for i, fold in enumerate(report.folds, 1):
        p = f"fold{i}."
        lines.append(f"{p}test_size={fold.test_size}")
        for kind in FEATURE_KINDS:
            lines.append(f"{p}cal_{kind}={fold.calibration_acc[kind]!r}")
        for kind in FEATURE_KINDS:
            lines.append(f"{p}weight_{kind}={fold.weights[kind]!r}")
        for kind in FEATURE_KINDS:
            lines.append(f"{p}acc_{kind}={fold.classifier_top1[kind]!r}")
        for k in sorted(fold.topk):
            lines.append(f"{p}top{k}={fold.topk[k]!r}")
        lines.append(f"{p}union_top1={fold.union_top1!r}")
    for kind in FEATURE_KINDS:
        lines.append(f"aggregate.acc_{kind}={report.classifier_top1[kind]!r}")
    for k in sorted(report.topk):
        lines.append(f"aggregate.top{k}={report.topk[k]!r}")
    lines.append(f"aggregate.union_top1={report.union_top1!r}")
    for kind in FEATURE_KINDS:
        lines.append(f"aggregate.weight_{kind}={report.weights[kind]!r}")
    lines.append("confusion")
    for row in report.confusion:
        lines.append(",".join(str(int(v)) for v in row))
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_report_keys(path):
    """Parse a report file into (keys dict, class names, confusion matrix)."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    if not lines or lines[0].split() != ["cv-report", str(REPORT_FORMAT_VERSION)]:
        raise FormatError(f"{path}: not a cv report")
    keys = {}
    confusion_rows = []
    in_confusion = False
    for line in lines[1:]:
        if not line:
            continue
        if line == "confusion":
            in_confusion = True
            continue
        if in_confusion:
            confusion_rows.append([int(v) for v in line.split(",")])
        else:
            if "=" not in line:
                raise FormatError(f"{path}: bad line {line!r}")
            key, _, value = line.partition("=")
            keys[key] = value
    classes = keys.get("classes", "").split(",") if keys.get("classes") else []
    confusion = np.array(confusion_rows, dtype=np.int64) if confusion_rows else None
    return keys, classes, confusion


def weights_from_report(path) -> EnsembleWeights:
    """Recover the aggregate fusion weights stored in a report file."""
    keys, _, _ = read_report_keys(path)
    try:
        w = [float(keys[f"aggregate.weight_{kind}"]) for kind in FEATURE_KINDS]
        acc = [float(keys.get(f"aggregate.acc_{kind}", "0")) for kind in FEATURE_KINDS]
    except (KeyError, ValueError) as exc:
        raise FormatError(f"{path}: missing aggregate weights") from exc
    return EnsembleWeights(accuracies=tuple(acc), weights=np.array(w))


def parse_config_file(path, data_dir) -> CvConfig:
    """key=value config: hidden_<kind>, learning_rate, momentum, max_epochs,
    sse_tolerance, seed.  Unknown keys are rejected."""
    cfg = CvConfig(data_dir=data_dir)
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise DataError(f"{path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"{path}:{lineno}: expected key=value")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        try:
            if key == "learning_rate":
                cfg.learning_rate = float(value)
            elif key == "momentum":
                cfg.momentum = float(value)
            elif key == "max_epochs":
                cfg.max_epochs = int(value)
            elif key == "sse_tolerance":
                cfg.sse_tolerance = float(value)
            elif key == "seed":
                cfg.seed = int(value)
            elif key.startswith("hidden_") and key[len("hidden_"):] in FEATURE_LENGTHS:
                cfg.hidden[key[len("hidden_"):]] = int(value)
            else:
                raise FormatError(f"{path}:{lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: bad value for {key}") from exc
    return cfg
