"""Accuracy-weighted score fusion across the three classifiers.

Weights are the classifier accuracies normalized to sum to one; the fused
score of a class is the weighted sum of the three per-class confidences.
Ties always break toward the lower class index so decisions are
reproducible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllZeroAccuracies, BadK, LengthMismatch


@dataclass(frozen=True)
class EnsembleWeights:
    accuracies: tuple[float, float, float]
    weights: np.ndarray


@dataclass(frozen=True)
class CombinedDecision:
    scores: np.ndarray
    winner: int
    ranking: np.ndarray


def derive_weights(accuracies) -> EnsembleWeights:
    """Normalize three accuracies into fusion weights."""
    acc = tuple(float(a) for a in accuracies)
    if len(acc) != 3:
        raise LengthMismatch(f"need exactly 3 accuracies, got {len(acc)}")
    if any(a < 0 for a in acc):
        raise ValueError(f"accuracies must be nonnegative: {acc}")
    total = sum(acc)
    if total == 0:
        raise AllZeroAccuracies("cannot derive weights from all-zero accuracies")
    return EnsembleWeights(accuracies=acc, weights=np.array(acc) / total)


def _check_scores(scores):
    vecs = [np.asarray(s, dtype=np.float64) for s in scores]
    if len(vecs) != 3:
        raise LengthMismatch(f"need exactly 3 score vectors, got {len(vecs)}")
    m = vecs[0].shape
    if any(v.ndim != 1 for v in vecs) or any(v.shape != m for v in vecs):
        raise LengthMismatch(
            f"score vectors disagree in shape: {[v.shape for v in vecs]}")
    return vecs


def rank_scores(scores: np.ndarray) -> np.ndarray:
    """Class indices sorted by score descending, index ascending on ties."""
    order = np.lexsort((np.arange(scores.size), -scores))
    return order


def combine(scores, weights: EnsembleWeights) -> CombinedDecision:
    """Fuse three per-class score vectors into one decision."""
    vecs = _check_scores(scores)
    fused = sum(w * v for w, v in zip(weights.weights, vecs))
    ranking = rank_scores(fused)
    return CombinedDecision(scores=fused, winner=int(ranking[0]), ranking=ranking)


def top_k(decision: CombinedDecision, k: int) -> np.ndarray:
    """The k best classes of a decision, best first."""
    m = decision.ranking.size
    if not 1 <= k <= m:
        raise BadK(f"k={k} outside [1, {m}]")
    return decision.ranking[:k]


def union_top1_hit(scores, label: int) -> bool:
    """True when any of the three classifiers puts the label first."""
    vecs = _check_scores(scores)
    return any(int(np.argmax(v)) == label for v in vecs)
