"""Decision rules over one shared neighbor list: NNC, k-NNC, wk-NNC and Gwk-NNC.

All four rules are weighted votes; they differ only in the weight given
to the i-th nearest neighbor:

    NNC      weight 1 for the nearest neighbor, 0 for the rest
    k-NNC    weight 1 for every neighbor (majority vote)
    wk-NNC   Dudani weights, linear in distance between the 1st and k-th
    Gwk-NNC  Gaussian weights exp(-h^2 / (2 sigma^2))

The winning class is the one with the largest cumulative weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bootstrap import hamamoto_bootstrap
from .data import LabeledDataset
from .neighbors import NeighborList, knn_query, knn_search

__all__ = [
    "Decision",
    "KnnClassifier",
    "RULES",
    "FAMILIES",
    "gaussian_weight",
    "neighbor_weights",
    "class_scores",
    "nnc_classify",
    "knnc_classify",
    "wknnc_classify",
    "gwknn_classify",
    "estimate_posteriors",
    "make_classifier",
]

RULES = ("nnc", "knnc", "wknnc", "gwknnc")
# benchmark families: the four rules plus k-NNC on a Hamamoto-bootstrapped
# training set
FAMILIES = ("nnc", "knnc", "wknnc", "knnc-hbs", "gwknnc")

_DISPLAY = {"nnc": "NNC", "knnc": "k-NNC", "wknnc": "wk-NNC",
            "knnc-hbs": "k-NNC(HBS)", "gwknnc": "Gwk-NNC"}


@dataclass(frozen=True)
class Decision:
    """Predicted class id, per-class scores and whether the argmax was tied."""

    predicted: int
    scores: np.ndarray
    tie: bool


def gaussian_weight(h: float, sigma: float = 1.0) -> float:
    """Weight exp(-h^2 / (2 sigma^2)) of a neighbor at distance h >= 0."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if h < 0:
        raise ValueError(f"distance must be non-negative, got {h}")
    return math.exp(-(h * h) / (2.0 * sigma * sigma))


def neighbor_weights(rule: str, distances: np.ndarray,
                     sigma: float = 1.0) -> np.ndarray:
    """Per-neighbor voting weights for a (m, k) matrix of sorted distances."""
    if rule == "nnc":
        w = np.zeros_like(distances)
        w[:, 0] = 1.0
        return w
    if rule == "knnc":
        return np.ones_like(distances)
    if rule == "wknnc":
        h1 = distances[:, :1]
        hk = distances[:, -1:]
        span = hk - h1
        w = np.ones_like(distances)
        rows = span[:, 0] > 0.0
        w[rows] = (hk[rows] - distances[rows]) / span[rows]
        return w
    if rule == "gwknnc":
        if sigma <= 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        return np.exp(-(distances * distances) / (2.0 * sigma * sigma))
    raise ValueError(f"unknown rule {rule!r}; expected one of {RULES}")


def class_scores(labels: np.ndarray, weights: np.ndarray,
                 n_classes: int) -> np.ndarray:
    """Sum neighbor weights per class: (m, k) labels/weights -> (m, c)."""
    scores = np.empty((labels.shape[0], n_classes), dtype=np.float64)
    for ci in range(n_classes):
        scores[:, ci] = np.sum(weights * (labels == ci), axis=1)
    return scores


def _decide(scores: np.ndarray) -> Decision:
    best = scores.max()
    winners = np.flatnonzero(scores == best)
    return Decision(predicted=int(winners[0]), scores=scores,
                    tie=winners.size > 1)


def _rule_decision(rule: str, neighbors: NeighborList, n_classes: int,
                   sigma: float = 1.0) -> Decision:
    if len(neighbors) == 0:
        raise ValueError("neighbor list is empty")
    w = neighbor_weights(rule, neighbors.distances[None, :], sigma)
    scores = class_scores(neighbors.labels[None, :], w, n_classes)[0]
    return _decide(scores)


def nnc_classify(neighbors: NeighborList, n_classes: int) -> Decision:
    """Class of the single nearest neighbor (one-hot scores)."""
    return _rule_decision("nnc", neighbors, n_classes)


def knnc_classify(neighbors: NeighborList, n_classes: int) -> Decision:
    """Majority vote among the neighbors; argmax ties go to the smallest
    class id and set the tie flag."""
    return _rule_decision("knnc", neighbors, n_classes)


def wknnc_classify(neighbors: NeighborList, n_classes: int) -> Decision:
    """Dudani distance-weighted vote.

    Neighbor i gets weight (h_k - h_i) / (h_k - h_1), so the nearest
    neighbor weighs 1 and the k-th weighs 0.  When all neighbors are
    equidistant (including k = 1) the formula is 0/0; every weight is
    then 1 and the rule degenerates to the majority vote.
    """
    return _rule_decision("wknnc", neighbors, n_classes)


def gwknn_classify(neighbors: NeighborList, n_classes: int,
                   sigma: float = 1.0) -> Decision:
    """Gaussian-weighted vote: scores are the cumulative per-class sums
    of exp(-h^2 / (2 sigma^2)) over the neighbors."""
    return _rule_decision("gwknnc", neighbors, n_classes, sigma)


def estimate_posteriors(neighbors: NeighborList, n_classes: int, k: int,
                        dim: int, sigma: float = 1.0) -> np.ndarray:
    """Unnormalized class posteriors from the truncated Gaussian kernel
    density estimate with neighbor-count priors.

    The class-conditional density over the k_i in-class neighbors times
    the prior k_i/k reduces, after the class-independent evidence is
    dropped, to W_i / (k (2 pi)^(d/2) sigma^d) where W_i is the Gwk-NNC
    cumulative weight.  Classes absent from the list get 0, and the
    argmax always coincides with the Gwk-NNC prediction.
    """
    if len(neighbors) == 0:
        raise ValueError("neighbor list is empty")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    w = neighbor_weights("gwknnc", neighbors.distances[None, :], sigma)
    cumulative = class_scores(neighbors.labels[None, :], w, n_classes)[0]
    return cumulative / (k * (2.0 * math.pi) ** (dim / 2.0) * sigma**dim)


class KnnClassifier:
    """A nearest-neighbor classifier with a configurable voting rule.

    rule is one of RULES; "nnc" forces k = 1.  With hamamoto_r set, fit
    replaces the training set by its Hamamoto bootstrap before searching
    (the k-NNC(HBS) benchmark entry uses rule="knnc" plus hamamoto_r).
    fit stores immutable data only, so a fitted classifier may serve
    many concurrent predict calls.
    """

    def __init__(self, rule: str = "knnc", k: int = 1, sigma: float = 1.0,
                 hamamoto_r: int | None = None, include_self: bool = False):
        if rule not in RULES:
            raise ValueError(f"unknown rule {rule!r}; expected one of {RULES}")
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if sigma <= 0:
            raise ValueError(f"sigma must be positive, got {sigma}")
        if hamamoto_r is not None and hamamoto_r < 1:
            raise ValueError(f"hamamoto_r must be >= 1, got {hamamoto_r}")
        self.rule = rule
        self.k = 1 if rule == "nnc" else int(k)
        self.sigma = float(sigma)
        self.hamamoto_r = hamamoto_r
        self.include_self = include_self
        self.train_: LabeledDataset | None = None

    @property
    def name(self) -> str:
        if self.rule == "knnc" and self.hamamoto_r is not None:
            return _DISPLAY["knnc-hbs"]
        return _DISPLAY[self.rule]

    def fit(self, train: LabeledDataset) -> "KnnClassifier":
        if self.hamamoto_r is not None:
            train = hamamoto_bootstrap(train, self.hamamoto_r,
                                       self.include_self)
        self.train_ = train
        return self

    def _check_fitted(self) -> LabeledDataset:
        if self.train_ is None:
            raise ValueError("classifier is not fitted; call fit() first")
        return self.train_

    def predict(self, features: np.ndarray) -> np.ndarray:
        """Predicted class ids for an (m, d) block of query patterns."""
        train = self._check_fitted()
        dists, idx = knn_query(train.features, features, self.k)
        w = neighbor_weights(self.rule, dists, self.sigma)
        scores = class_scores(train.labels[idx], w, train.n_classes)
        return scores.argmax(axis=1)

    def decide(self, pattern) -> Decision:
        """Full Decision (scores and tie flag) for a single query."""
        train = self._check_fitted()
        neighbors = knn_search(train, pattern, self.k)
        return _rule_decision(self.rule, neighbors, train.n_classes,
                              self.sigma)


def make_classifier(family: str, k: int = 1, r: int | None = None,
                    sigma: float = 1.0,
                    include_self: bool = False) -> KnnClassifier:
    """Classifier for one of the benchmark FAMILIES."""
    if family == "knnc-hbs":
        if r is None:
            raise ValueError("knnc-hbs needs the bootstrap neighbor count r")
        return KnnClassifier("knnc", k=k, hamamoto_r=r,
                             include_self=include_self)
    if family not in RULES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    return KnnClassifier(family, k=k, sigma=sigma)
