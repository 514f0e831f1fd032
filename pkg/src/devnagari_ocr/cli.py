"""Command-line interface.

Subcommands: ``extract`` dumps feature vectors for a dataset directory,
``train`` fits one classifier from a feature dump, ``cv`` runs the full
three-fold cross-validation and writes a report, ``predict`` classifies a
single image with three trained models and report-derived weights.

Exit codes: 0 success, 1 usage error, 2 data error, 3 training failure.
"""
from __future__ import annotations

import argparse
import sys

from . import mlp, pipeline
from .ensemble import combine, top_k
from .errors import BadK, DataError, RecognizerError
from .features import FEATURE_KINDS, FEATURE_LENGTHS, classifier_input

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_TRAINING = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="devnagari-ocr",
                     description="Handwritten glyph recognition pipeline.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", parents=[], help="extract feature vectors",
                       add_help=True)
    p.add_argument("--data", required=True, help="dataset root directory")
    p.add_argument("--out", required=True, help="feature dump output path")

    p = sub.add_parser("train", help="train one classifier from a dump")
    p.add_argument("--features", required=True, help="feature dump path")
    p.add_argument("--classifier", required=True, choices=list(FEATURE_KINDS))
    p.add_argument("--hidden", type=int, default=None,
                   help="hidden layer size (default per classifier)")
    p.add_argument("--epochs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lr", type=float, default=0.8)
    p.add_argument("--momentum", type=float, default=0.7)
    p.add_argument("--out", required=True, help="model output path")

    p = sub.add_parser("cv", help="run 3-fold cross-validation")
    p.add_argument("--data", required=True, help="dataset root directory")
    p.add_argument("--config", required=True, help="key=value config file")
    p.add_argument("--report", required=True, help="report output path")

    p = sub.add_parser("predict", help="classify one image")
    p.add_argument("--models", nargs=3, required=True,
                   metavar=("M1", "M2", "M3"))
    p.add_argument("--weights-from", required=True, help="cv report path")
    p.add_argument("--image", required=True)
    p.add_argument("--top", type=int, default=1)
    return parser


def _cmd_extract(args) -> int:
    samples, _, skipped = pipeline.load_dataset(
        args.data,
        on_skip=lambda path, exc: print(f"skipping {path}: {exc}",
                                        file=sys.stderr))
    kept, rejected = pipeline.extract_all(samples)
    for sample, exc in rejected:
        print(f"rejected {sample.id}: {exc}", file=sys.stderr)
    if not kept:
        print("error: no extractable samples", file=sys.stderr)
        return EXIT_DATA
    pipeline.write_features(args.out, kept)
    print(f"wrote {3 * len(kept)} vectors for {len(kept)} samples to "
          f"{args.out} ({skipped} skipped, {len(rejected)} rejected)")
    return 0


def _cmd_train(args) -> int:
    triples = pipeline.read_features(args.features)
    pairs = [
        (classifier_input(kind, values), label)
        for label, kind, values in triples if kind == args.classifier]
    if not pairs:
        print(f"error: no {args.classifier} vectors in {args.features}",
              file=sys.stderr)
        return EXIT_DATA
    n_out = max(label for _, label in pairs) + 1
    if n_out < 2:
        print("error: training needs at least two classes", file=sys.stderr)
        return EXIT_DATA
    hidden = args.hidden or pipeline.DEFAULT_HIDDEN[args.classifier]
    net = mlp.init((FEATURE_LENGTHS[args.classifier], hidden, n_out),
                   seed=args.seed)
    cfg = mlp.TrainConfig(learning_rate=args.lr, momentum=args.momentum,
                          max_epochs=args.epochs, seed=args.seed)
    try:
        trained, history = mlp.train(net, pairs, cfg)
    except RecognizerError as exc:
        print(f"training failed: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    mlp.save(trained, args.out)
    final = history[-1] if history else float("nan")
    print(f"trained {args.classifier} classifier "
          f"({FEATURE_LENGTHS[args.classifier]}/{hidden}/{n_out}) for "
          f"{len(history)} epochs, final SSE {final:.4f}; saved to {args.out}")
    return 0


def _cmd_cv(args) -> int:
    cfg = pipeline.parse_config_file(args.config, data_dir=args.data)
    skips = []
    samples, class_names, n_skipped = pipeline.load_dataset(
        args.data, on_skip=lambda path, exc: skips.append((path, exc)))
    for path, exc in skips:
        print(f"skipping {path}: {exc}", file=sys.stderr)
    kept, rejected = pipeline.extract_all(samples)
    for sample, exc in rejected:
        print(f"rejected {sample.id}: {exc}", file=sys.stderr)
    try:
        report = pipeline._cv_on_samples(
            kept, class_names, cfg,
            n_rejected=len(rejected), n_skipped=n_skipped)
    except DataError:
        raise
    except RecognizerError as exc:
        print(f"training failed: {exc}", file=sys.stderr)
        return EXIT_TRAINING
    pipeline.write_report(report, args.report)
    print(f"cross-validation on {report.n_samples} samples, "
          f"{len(report.class_names)} classes")
    for k in sorted(report.topk):
        print(f"top-{k} accuracy: {report.topk[k]:.2f}%")
    print(f"union top-1 accuracy: {report.union_top1:.2f}%")
    print(f"report written to {args.report}")
    return 0


def _load_models(paths):
    """Map each model file to its feature kind via the input layer size."""
    by_size = {FEATURE_LENGTHS[kind]: kind for kind in FEATURE_KINDS}
    nets = {}
    for path in paths:
        net = mlp.load(path)
        kind = by_size.get(net.sizes[0])
        if kind is None:
            raise DataError(
                f"{path}: input size {net.sizes[0]} matches no feature kind "
                f"(expected one of {sorted(by_size)})")
        if kind in nets:
            raise DataError(f"{path}: duplicate {kind} model")
        nets[kind] = net
    return nets


def _cmd_predict(args) -> int:
    if args.top < 1:
        raise BadK(f"--top must be >= 1, got {args.top}")
    nets = _load_models(args.models)
    weights = pipeline.weights_from_report(args.weights_from)
    _, classes, _ = pipeline.read_report_keys(args.weights_from)
    gray = pipeline._read_gray(args.image)
    feats = pipeline.process_image(gray)
    scores = [
        mlp.forward(nets[kind], classifier_input(kind, feats[kind]))
        for kind in FEATURE_KINDS]
    decision = combine(scores, weights)
    k = min(args.top, decision.ranking.size)
    for rank, cls in enumerate(top_k(decision, k), 1):
        name = classes[cls] if cls < len(classes) else str(cls)
        print(f"{rank} {cls} {name} {decision.scores[cls]:.6f}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "extract": _cmd_extract,
        "train": _cmd_train,
        "cv": _cmd_cv,
        "predict": _cmd_predict,
    }
    try:
        return handlers[args.command](args)
    except BadK as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except RecognizerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TRAINING


if __name__ == "__main__":
    sys.exit(main())
