"""Exact brute-force k-nearest-neighbor search with deterministic ties."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import LabeledDataset

__all__ = ["NeighborList", "euclidean_distance", "knn_search", "knn_query"]

# Cap on the scratch block used when forming (queries x train) difference
# tensors; keeps peak memory flat for large benchmarks.
_BLOCK_ELEMENTS = 4_000_000


@dataclass(frozen=True)
class NeighborList:
    """The k nearest training patterns of one query.

    Entries are sorted by (distance ascending, training index ascending),
    so equidistant neighbors always appear in training-set order.  The
    list holds min(k, n) entries; k records the requested count.
    """

    indices: np.ndarray
    distances: np.ndarray
    labels: np.ndarray
    k: int

    def __len__(self) -> int:
        return self.indices.shape[0]


def euclidean_distance(a, b) -> float:
    """Euclidean distance between two equal-length feature vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"dimensionality mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    return float(np.sqrt(np.sum(diff * diff)))


def _topk_row_exact(row: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k smallest values, ties resolved by smaller index."""
    part = np.argpartition(row, k - 1)[:k]
    kth = row[part].max()
    strict = np.flatnonzero(row < kth)
    tied = np.flatnonzero(row == kth)[: k - strict.size]
    idx = np.concatenate([strict, tied])
    return idx[np.argsort(row[idx], kind="stable")]


def _topk_rows(dist_sq: np.ndarray, k: int) -> np.ndarray:
    """Row-wise top-k selection on a (m, n) matrix of squared distances.

    Returns (m, k) training indices per row, sorted by (value, index).
    Exact: boundary ties at the k-th place go to the smaller index, the
    same order a full stable sort of (value, index) pairs would give.
    """
    m, n = dist_sq.shape
    if k >= n:
        return np.argsort(dist_sq, axis=1, kind="stable")
    part = np.argpartition(dist_sq, k - 1, axis=1)[:, :k]
    # order candidates by index first, then stably by value: equal values
    # end up in ascending index order
    order = np.argsort(part, axis=1)
    part = np.take_along_axis(part, order, axis=1)
    vals = np.take_along_axis(dist_sq, part, axis=1)
    order = np.argsort(vals, axis=1, kind="stable")
    part = np.take_along_axis(part, order, axis=1)
    vals = np.take_along_axis(vals, order, axis=1)
    # a non-selected value equal to the k-th one may deserve the slot by
    # the index rule; rebuild those rows exactly
    kth = vals[:, -1]
    eq_total = np.count_nonzero(dist_sq == kth[:, None], axis=1)
    eq_selected = np.count_nonzero(vals == kth[:, None], axis=1)
    for r in np.flatnonzero(eq_total != eq_selected):
        part[r] = _topk_row_exact(dist_sq[r], k)
    return part


def knn_query(train_features: np.ndarray, queries: np.ndarray,
              k: int) -> tuple[np.ndarray, np.ndarray]:
    """Brute-force nearest neighbors of many queries at once.

    Returns (distances, indices), each of shape (m, min(k, n)), row i
    holding the neighbors of queries[i] sorted by (distance, index).
    Selection happens on squared distances; the square root is applied
    only to the returned values.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    train_features = np.asarray(train_features, dtype=np.float64)
    queries = np.asarray(queries, dtype=np.float64)
    if queries.ndim != 2 or train_features.ndim != 2:
        raise ValueError("features must be 2-D arrays")
    if queries.shape[1] != train_features.shape[1]:
        raise ValueError(
            f"dimensionality mismatch: train has {train_features.shape[1]} "
            f"features, queries have {queries.shape[1]}")
    n, d = train_features.shape
    m = queries.shape[0]
    kk = min(k, n)
    indices = np.empty((m, kk), dtype=np.int64)
    distances = np.empty((m, kk), dtype=np.float64)
    block = max(1, _BLOCK_ELEMENTS // max(1, n * d))
    for start in range(0, m, block):
        stop = min(start + block, m)
        diff = queries[start:stop, None, :] - train_features[None, :, :]
        dist_sq = np.sum(diff * diff, axis=2)
        idx = _topk_rows(dist_sq, kk)
        indices[start:stop] = idx
        distances[start:stop] = np.sqrt(np.take_along_axis(dist_sq, idx, axis=1))
    return distances, indices


def knn_search(train: LabeledDataset, query, k: int) -> NeighborList:
    """The min(k, n) nearest training patterns of a single query.

    Exact and deterministic: distance ties are broken by the smaller
    training index.  A training pattern identical to the query is still
    an eligible neighbor (at distance 0).
    """
    query = np.asarray(query, dtype=np.float64)
    if query.ndim != 1 or query.shape[0] != train.dim:
        raise ValueError(
            f"dimensionality mismatch: query has shape {query.shape}, "
            f"train has {train.dim} features")
    distances, indices = knn_query(train.features, query[None, :], k)
    return NeighborList(indices=indices[0], distances=distances[0],
                        labels=train.labels[indices[0]], k=k)
