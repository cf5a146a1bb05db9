"""Hamamoto bootstrap: replace each pattern by the mean of its r same-class neighbors."""

from __future__ import annotations

import numpy as np

from .data import DataError, LabeledDataset
from .neighbors import _topk_rows

__all__ = ["hamamoto_bootstrap", "hamamoto_bootstrap_sweep"]

_BLOCK_ELEMENTS = 4_000_000


def _same_class_neighbor_table(feats: np.ndarray, r_max: int,
                               include_self: bool) -> np.ndarray:
    """(n_j, min(r_max, pool)) nearest within-class neighbor rows per pattern.

    Rows are sorted by (distance, index), so the first r columns are the
    r nearest neighbors for any r <= r_max.
    """
    n = feats.shape[0]
    pool = n if include_self else n - 1
    k = min(r_max, pool)
    table = np.empty((n, k), dtype=np.int64)
    block = max(1, _BLOCK_ELEMENTS // max(1, n * feats.shape[1]))
    for start in range(0, n, block):
        stop = min(start + block, n)
        diff = feats[start:stop, None, :] - feats[None, :, :]
        dist_sq = np.sum(diff * diff, axis=2)
        if not include_self:
            dist_sq[np.arange(stop - start), np.arange(start, stop)] = np.inf
        table[start:stop] = _topk_rows(dist_sq, k)
    return table


def hamamoto_bootstrap_sweep(train: LabeledDataset, r_values,
                             include_self: bool = False
                             ) -> dict[int, LabeledDataset]:
    """Bootstrapped training sets for several r values at once.

    The same-class neighbor search is shared across the r values, which
    is what makes cross-validating r affordable; each returned dataset
    is identical to a direct hamamoto_bootstrap call with that r.
    """
    r_values = sorted(set(int(r) for r in r_values))
    if not r_values or r_values[0] < 1:
        raise ValueError(f"r values must be >= 1, got {r_values}")
    counts = train.class_counts()
    if not include_self:
        for ci in np.flatnonzero(counts == 1):
            raise DataError(
                f"class {train.class_names[ci]!r} has a single pattern; "
                "it has no same-class neighbors (include_self=False)")
    out = {r: np.empty_like(train.features) for r in r_values}
    for ci in range(train.n_classes):
        rows = np.flatnonzero(train.labels == ci)
        if rows.size == 0:
            continue
        feats = train.features[rows]
        table = _same_class_neighbor_table(feats, r_values[-1], include_self)
        for r in r_values:
            # clamp r to the per-class neighbor pool
            sel = np.sort(table[:, : min(r, table.shape[1])], axis=1)
            out[r][rows] = feats[sel].mean(axis=1)
    return {r: LabeledDataset(out[r], train.labels, train.class_names,
                              name=train.name)
            for r in r_values}


def hamamoto_bootstrap(train: LabeledDataset, r: int,
                       include_self: bool = False) -> LabeledDataset:
    """Artificial training set smoothing each pattern toward its class.

    Pattern i becomes the unweighted mean of its min(r, pool) nearest
    same-class neighbors, where the pool excludes the pattern itself
    unless include_self is set.  Labels and row order are preserved;
    neighbor distance ties are broken by the smaller training index.
    """
    return hamamoto_bootstrap_sweep(train, [r], include_self)[int(r)]
