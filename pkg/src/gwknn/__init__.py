"""Gaussian-weighted k-nearest-neighbor classification and benchmarking."""

from .bootstrap import hamamoto_bootstrap, hamamoto_bootstrap_sweep
from .classifiers import (FAMILIES, RULES, Decision, KnnClassifier,
                          class_scores, estimate_posteriors, gaussian_weight,
                          gwknn_classify, knnc_classify, make_classifier,
                          neighbor_weights, nnc_classify, wknnc_classify)
from .data import (DataError, LabeledDataset, NormalizationStats,
                   apply_normalization, compute_normalization, load_csv,
                   random_split, save_csv)
from .evaluation import (DEFAULT_SEED, CVGrid, DatasetSpec, EvalReport,
                         bootstrap_resample_eval, classification_accuracy,
                         cross_validate, reports_to_json, reports_to_table,
                         run_comparison, zero_one_loss)
from .neighbors import NeighborList, euclidean_distance, knn_query, knn_search

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_SEED",
    "FAMILIES",
    "RULES",
    "CVGrid",
    "DataError",
    "DatasetSpec",
    "Decision",
    "EvalReport",
    "KnnClassifier",
    "LabeledDataset",
    "NeighborList",
    "NormalizationStats",
    "apply_normalization",
    "bootstrap_resample_eval",
    "class_scores",
    "classification_accuracy",
    "compute_normalization",
    "cross_validate",
    "estimate_posteriors",
    "euclidean_distance",
    "gaussian_weight",
    "gwknn_classify",
    "hamamoto_bootstrap",
    "hamamoto_bootstrap_sweep",
    "knn_query",
    "knn_search",
    "knnc_classify",
    "load_csv",
    "make_classifier",
    "neighbor_weights",
    "nnc_classify",
    "random_split",
    "reports_to_json",
    "reports_to_table",
    "run_comparison",
    "save_csv",
    "wknnc_classify",
    "zero_one_loss",
]
