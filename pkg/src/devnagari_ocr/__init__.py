"""Offline handwritten Devnagari character recognition.

Preprocessing (binarize, crop, scale, smooth), three feature extractors
(shadow projections, chain-code histograms, skeleton intersections), three
sigmoid MLP classifiers, and accuracy-weighted score fusion, plus a
three-fold cross-validation harness and CLI.
"""

from . import accel, ensemble, features, mlp, pipeline, raster, skeleton
from .ensemble import (CombinedDecision, EnsembleWeights, combine,
                       derive_weights, top_k, union_top1_hit)
from .features import (FeatureVector, chain_trace,
                       chaincode_histogram_features, extract_contour,
                       intersection_features, shadow_features)
from .mlp import Mlp, TrainConfig, forward, gradient_check, init, load, save, train
from .pipeline import (CvConfig, EvalReport, Sample, confusion_matrix,
                       extract_all, load_dataset, run_cv, three_fold_split,
                       topk_accuracy)
from .raster import Rect, binarize, scale_to_canvas, smooth, tight_bbox
from .skeleton import PointClass, classify_point, prune_to_unit_width, thin

__version__ = "0.1.0"
