"""Dataset container, CSV ingestion, z-score normalization and random splits."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "DataError",
    "LabeledDataset",
    "NormalizationStats",
    "load_csv",
    "save_csv",
    "compute_normalization",
    "apply_normalization",
    "random_split",
]


class DataError(ValueError):
    """A dataset file or its contents violate the expected format."""


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class LabeledDataset:
    """Immutable collection of labeled feature vectors.

    features is an (n, d) float64 array, labels an (n,) int64 array of
    class ids indexing into class_names.  Class ids are dense: every id
    is < len(class_names).  All feature values must be finite.
    """

    features: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        feats = np.array(self.features, dtype=np.float64, copy=True)
        labs = np.array(self.labels, dtype=np.int64, copy=True)
        if feats.ndim != 2:
            raise DataError("features must be a 2-D array")
        if feats.shape[0] == 0:
            raise DataError("dataset must contain at least one pattern")
        if labs.shape != (feats.shape[0],):
            raise DataError("labels must be one id per pattern")
        if not np.all(np.isfinite(feats)):
            row, col = np.argwhere(~np.isfinite(feats))[0]
            raise DataError(f"non-finite feature value at row {row}, column {col}")
        if labs.size and (labs.min() < 0 or labs.max() >= len(self.class_names)):
            raise DataError("label id outside the class registry")
        object.__setattr__(self, "features", _readonly(feats))
        object.__setattr__(self, "labels", _readonly(labs))
        object.__setattr__(self, "class_names", tuple(self.class_names))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def class_counts(self) -> np.ndarray:
        """Number of patterns per class id (length n_classes)."""
        return np.bincount(self.labels, minlength=self.n_classes)

    def select(self, indices) -> "LabeledDataset":
        """New dataset made of the given rows, in the given order."""
        idx = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(self.features[idx], self.labels[idx],
                              self.class_names, name=self.name)

    def with_class_names(self, class_names) -> "LabeledDataset":
        """Same patterns under an extended registry (a superset, ids unchanged)."""
        names = tuple(class_names)
        if names[: self.n_classes] != self.class_names:
            raise DataError("extended registry must keep existing ids")
        return LabeledDataset(self.features, self.labels, names, name=self.name)


@dataclass(frozen=True)
class NormalizationStats:
    """Per-feature mean and population standard deviation."""

    mean: np.ndarray
    std: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=np.float64, copy=True)
        std = np.array(self.std, dtype=np.float64, copy=True)
        if mean.ndim != 1 or mean.shape != std.shape:
            raise DataError("mean and std must be 1-D arrays of equal length")
        if np.any(std < 0):
            raise DataError("standard deviations must be non-negative")
        object.__setattr__(self, "mean", _readonly(mean))
        object.__setattr__(self, "std", _readonly(std))

    def save_csv(self, path) -> None:
        """Write a two-row CSV (means row, stds row) for audit."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([repr(v) for v in self.mean.tolist()])
            writer.writerow([repr(v) for v in self.std.tolist()])

    @classmethod
    def load_csv(cls, path) -> "NormalizationStats":
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
        if len(rows) != 2:
            raise DataError(f"{path}: expected exactly two rows (means, stds)")
        return cls(np.array(rows[0], dtype=np.float64),
                   np.array(rows[1], dtype=np.float64))


def _resolve_label_column(label_column, header_row, width, path):
    if isinstance(label_column, str):
        if header_row is None:
            raise DataError(
                f"{path}: label column given by name {label_column!r} "
                "requires a header row")
        try:
            return header_row.index(label_column)
        except ValueError:
            raise DataError(
                f"{path}: no column named {label_column!r} in header") from None
    col = int(label_column)
    if col < 0:
        col += width
    if not 0 <= col < width:
        raise DataError(f"{path}: label column {label_column} out of range")
    return col


def load_csv(path, label_column=-1, delimiter=",", header=False,
             class_names=None, name=None) -> LabeledDataset:
    """Read a labeled dataset from a delimited text file.

    Every non-label cell must parse as a finite real number.  Class ids
    are assigned in first-appearance order; pass class_names to extend
    an existing registry instead (so train and test files share ids).
    label_column may be a (possibly negative) index or, with header=True,
    a column name.  Row order is preserved.
    """
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        rows = [row for row in reader if row and any(cell.strip() for cell in row)]
    header_row = None
    if header:
        if not rows:
            raise DataError(f"{path}: empty file")
        header_row = [cell.strip() for cell in rows[0]]
        rows = rows[1:]
    if not rows:
        raise DataError(f"{path}: no data rows")

    width = len(rows[0])
    if width < 2:
        raise DataError(f"{path}: rows need at least one feature and a label")
    label_col = _resolve_label_column(label_column, header_row, width, path)

    registry: list[str] = list(class_names) if class_names is not None else []
    ids = {label: i for i, label in enumerate(registry)}
    features = np.empty((len(rows), width - 1), dtype=np.float64)
    labels = np.empty(len(rows), dtype=np.int64)
    for r, row in enumerate(rows):
        if len(row) != width:
            raise DataError(
                f"{path}: row {r + 1} has {len(row)} cells, expected {width}")
        label = row[label_col].strip()
        if label not in ids:
            ids[label] = len(registry)
            registry.append(label)
        labels[r] = ids[label]
        c = 0
        for j, cell in enumerate(row):
            if j == label_col:
                continue
            try:
                value = float(cell)
            except ValueError:
                raise DataError(
                    f"{path}: cannot parse {cell!r} at row {r + 1}, "
                    f"column {j + 1}") from None
            if not np.isfinite(value):
                raise DataError(
                    f"{path}: non-finite value at row {r + 1}, column {j + 1}")
            features[r, c] = value
            c += 1
    return LabeledDataset(features, labels, tuple(registry),
                          name=name if name is not None else path.stem)


def save_csv(ds: LabeledDataset, path, delimiter=",") -> None:
    """Write a dataset back to CSV, label in the last column.

    Feature values use repr formatting, so a load/save/load round trip
    reproduces the dataset exactly.
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        for row, lab in zip(ds.features, ds.labels):
            writer.writerow([repr(v) for v in row.tolist()] + [ds.class_names[lab]])


def compute_normalization(*datasets: LabeledDataset) -> NormalizationStats:
    """Per-feature mean and population std over the pooled datasets.

    Pooling train and test together is the default benchmark protocol;
    pass a single dataset for train-only statistics.
    """
    if not datasets:
        raise DataError("need at least one dataset")
    dim = datasets[0].dim
    for ds in datasets:
        if ds.dim != dim:
            raise DataError(
                f"dimensionality mismatch: {ds.dim} features, expected {dim}")
    pooled = np.concatenate([ds.features for ds in datasets], axis=0)
    return NormalizationStats(pooled.mean(axis=0), pooled.std(axis=0))


def apply_normalization(ds: LabeledDataset,
                        stats: NormalizationStats) -> LabeledDataset:
    """Standardize each feature to (x - mean) / std.

    Zero-variance features carry no class information and map to
    exactly 0.  Labels are unchanged.
    """
    if stats.mean.shape[0] != ds.dim:
        raise DataError(
            f"dimensionality mismatch: stats for {stats.mean.shape[0]} "
            f"features, dataset has {ds.dim}")
    safe = np.where(stats.std == 0.0, 1.0, stats.std)
    feats = (ds.features - stats.mean) / safe
    feats[:, stats.std == 0.0] = 0.0
    return LabeledDataset(feats, ds.labels, ds.class_names, name=ds.name)


def random_split(ds: LabeledDataset, train_count: int,
                 seed: int) -> tuple[LabeledDataset, LabeledDataset]:
    """Partition into (train, rest) of sizes (train_count, n - train_count).

    The draw is uniform without stratification and deterministic for a
    given seed.  Each side preserves the original row order.
    """
    if not 1 <= train_count < ds.n:
        raise DataError(
            f"train_count must be in [1, {ds.n - 1}], got {train_count}")
    perm = np.random.default_rng(seed).permutation(ds.n)
    train_idx = np.sort(perm[:train_count])
    test_idx = np.sort(perm[train_count:])
    return ds.select(train_idx), ds.select(test_idx)
