"""Benchmark protocol: accuracy, 3-fold CV selection and resampled test CA."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .bootstrap import hamamoto_bootstrap_sweep
from .classifiers import (FAMILIES, KnnClassifier, class_scores,
                          make_classifier, neighbor_weights)
from .data import (DataError, LabeledDataset, apply_normalization,
                   compute_normalization, load_csv, random_split)
from .neighbors import knn_query

__all__ = [
    "DEFAULT_SEED",
    "CVGrid",
    "EvalReport",
    "DatasetSpec",
    "zero_one_loss",
    "classification_accuracy",
    "cross_validate",
    "bootstrap_resample_eval",
    "evaluate_dataset",
    "run_comparison",
    "reports_to_json",
    "reports_to_table",
]

log = logging.getLogger(__name__)

DEFAULT_SEED = 42
# odd k values reduce vote ties; the r grid mirrors typical bootstrap
# neighborhood sizes
DEFAULT_K_GRID = tuple(range(1, 32, 2))
DEFAULT_R_GRID = (1, 2, 3, 5, 7, 10)


@dataclass(frozen=True)
class CVGrid:
    """Hyperparameter candidates: k for every rule, r only for k-NNC(HBS)."""

    k_candidates: tuple[int, ...] = DEFAULT_K_GRID
    r_candidates: tuple[int, ...] = DEFAULT_R_GRID

    def __post_init__(self):
        for name in ("k_candidates", "r_candidates"):
            values = tuple(sorted(set(int(v) for v in getattr(self, name))))
            if not values:
                raise ValueError(f"{name} must not be empty")
            if values[0] < 1:
                raise ValueError(f"{name} must all be >= 1, got {values}")
            object.__setattr__(self, name, values)


@dataclass(frozen=True)
class EvalReport:
    """One Table-2 style cell: a classifier's resampled CA on one dataset."""

    dataset: str
    classifier: str
    selected_k: int
    selected_r: int | None
    ca_values: tuple[float, ...]
    mean_ca: float
    std_ca: float
    seed: int


@dataclass(frozen=True)
class DatasetSpec:
    """Where to find a benchmark dataset and how to split it.

    Provide either test_path (separate test file) or split_train (hold
    out n - split_train random patterns for testing).
    """

    name: str
    train_path: str
    test_path: str | None = None
    split_train: int | None = None
    label_column: int | str = -1
    delimiter: str = ","
    header: bool = False

    def __post_init__(self):
        if (self.test_path is None) == (self.split_train is None):
            raise ValueError(
                f"dataset {self.name!r}: give exactly one of test_path "
                "or split_train")


def zero_one_loss(predicted: int, actual: int) -> int:
    """0 for a correct prediction, 1 otherwise."""
    return int(predicted != actual)


def _check_registries(train: LabeledDataset, test: LabeledDataset) -> None:
    shared = min(train.n_classes, test.n_classes)
    if train.class_names[:shared] != test.class_names[:shared]:
        raise DataError(
            "train and test label registries disagree; load the test set "
            "with the training registry (class_names=...)")


def classification_accuracy(clf: KnnClassifier, train: LabeledDataset,
                            test: LabeledDataset) -> float:
    """Percentage of test patterns the fitted rule classifies correctly."""
    _check_registries(train, test)
    clf.fit(train)
    predictions = clf.predict(test.features)
    return 100.0 * float(np.mean(predictions == test.labels))


def _fold_indices(n: int, folds: int, seed: int) -> list[np.ndarray]:
    perm = np.random.default_rng(seed).permutation(n)
    return np.array_split(perm, folds)


def cross_validate(train: LabeledDataset, grid: CVGrid, family: str,
                   folds: int = 3, seed: int = DEFAULT_SEED, *,
                   sigma: float = 1.0,
                   include_self: bool = False) -> tuple[int, int | None]:
    """Pick (k, r) by mean held-out accuracy over unstratified folds.

    r is searched only for the bootstrapped family, jointly with k; the
    bootstrap is regenerated from each fold's training portion.  Ties
    are broken toward the smaller k, then the smaller r, independent of
    the order the grid lists candidates.  NNC has no hyperparameter and
    returns (1, None) without searching.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if family == "nnc":
        return 1, None
    if folds < 2:
        raise ValueError(f"folds must be >= 2, got {folds}")
    if train.n < folds:
        raise ValueError(f"need at least {folds} patterns, got {train.n}")

    uses_r = family == "knnc-hbs"
    rule = "knnc" if uses_r else family
    r_values: tuple[int | None, ...] = grid.r_candidates if uses_r else (None,)
    k_values = grid.k_candidates
    k_max = max(k_values)

    ca_sum = {(k, r): 0.0 for k in k_values for r in r_values}
    for fold in _fold_splits(train.n, folds, seed):
        fold_train = train.select(fold[0])
        fold_val = train.select(fold[1])
        if uses_r:
            boots = hamamoto_bootstrap_sweep(fold_train, grid.r_candidates,
                                             include_self)
        for r in r_values:
            reference = boots[r] if uses_r else fold_train
            dists, idx = knn_query(reference.features, fold_val.features,
                                   k_max)
            labels = reference.labels[idx]
            for k in k_values:
                kk = min(k, dists.shape[1])
                weights = neighbor_weights(rule, dists[:, :kk], sigma)
                scores = class_scores(labels[:, :kk], weights,
                                      train.n_classes)
                correct = scores.argmax(axis=1) == fold_val.labels
                ca_sum[(k, r)] += 100.0 * float(np.mean(correct))

    best_ca, best_k, best_r = -1.0, None, None
    for k in k_values:
        for r in r_values:
            ca = ca_sum[(k, r)] / folds
            if ca > best_ca:
                best_ca, best_k, best_r = ca, k, r
    return best_k, best_r


def _fold_splits(n, folds, seed):
    parts = _fold_indices(n, folds, seed)
    for held_out in range(folds):
        train_idx = np.concatenate(
            [parts[g] for g in range(folds) if g != held_out])
        yield np.sort(train_idx), np.sort(parts[held_out])


def bootstrap_resample_eval(clf: KnnClassifier, train: LabeledDataset,
                            test: LabeledDataset, resamples: int = 10,
                            seed: int = DEFAULT_SEED,
                            dataset_name: str | None = None) -> EvalReport:
    """Mean and std-dev of CA over test sets resampled with replacement.

    Every distinct test pattern is classified exactly once; each of the
    `resamples` synthetic test sets (same size as the original, drawn
    with replacement) reuses those cached per-pattern outcomes.  The
    reported spread is the sample (n-1) standard deviation.
    """
    if resamples < 2:
        raise ValueError(f"resamples must be >= 2, got {resamples}")
    _check_registries(train, test)
    clf.fit(train)
    outcomes = clf.predict(test.features) == test.labels
    rng = np.random.default_rng(seed)
    ca_values = tuple(
        100.0 * float(np.mean(outcomes[rng.integers(0, test.n, test.n)]))
        for _ in range(resamples))
    return EvalReport(
        dataset=dataset_name if dataset_name is not None else test.name,
        classifier=clf.name,
        selected_k=clf.k,
        selected_r=clf.hamamoto_r,
        ca_values=ca_values,
        mean_ca=float(np.mean(ca_values)),
        std_ca=float(np.std(ca_values, ddof=1)),
        seed=seed)


def _load_train_test(spec: DatasetSpec, seed: int
                     ) -> tuple[LabeledDataset, LabeledDataset]:
    train = load_csv(spec.train_path, label_column=spec.label_column,
                     delimiter=spec.delimiter, header=spec.header,
                     name=spec.name)
    if spec.test_path is not None:
        test = load_csv(spec.test_path, label_column=spec.label_column,
                        delimiter=spec.delimiter, header=spec.header,
                        class_names=train.class_names, name=spec.name)
        if test.n_classes > train.n_classes:
            train = train.with_class_names(test.class_names)
        return train, test
    return random_split(train, spec.split_train, seed)


def evaluate_dataset(spec: DatasetSpec, classifiers=FAMILIES,
                     grid: CVGrid = CVGrid(), seed: int = DEFAULT_SEED, *,
                     sigma: float = 1.0, resamples: int = 10,
                     normalization: str = "pooled",
                     include_self: bool = False) -> list[EvalReport]:
    """Benchmark every classifier family on one dataset.

    Load (splitting if asked), z-normalize with pooled train+test
    statistics (or train-only ones), select hyperparameters by
    cross-validation per family, then evaluate on resampled test sets.
    """
    if normalization not in ("pooled", "train"):
        raise ValueError(f"normalization must be 'pooled' or 'train', "
                         f"got {normalization!r}")
    train, test = _load_train_test(spec, seed)
    if normalization == "pooled":
        stats = compute_normalization(train, test)
    else:
        stats = compute_normalization(train)
    train = apply_normalization(train, stats)
    test = apply_normalization(test, stats)
    reports = []
    for family in classifiers:
        k, r = cross_validate(train, grid, family, seed=seed,
                              sigma=sigma, include_self=include_self)
        clf = make_classifier(family, k=k, r=r, sigma=sigma,
                              include_self=include_self)
        reports.append(bootstrap_resample_eval(
            clf, train, test, resamples=resamples, seed=seed,
            dataset_name=spec.name))
    return reports


def run_comparison(datasets, classifiers=FAMILIES, grid: CVGrid = CVGrid(),
                   seed: int = DEFAULT_SEED, *, sigma: float = 1.0,
                   resamples: int = 10, normalization: str = "pooled",
                   include_self: bool = False) -> list[EvalReport]:
    """Full benchmark: one EvalReport per (dataset, classifier) pair.

    A dataset that fails to load is logged and skipped; the rest still
    run.
    """
    if normalization not in ("pooled", "train"):
        raise ValueError(f"normalization must be 'pooled' or 'train', "
                         f"got {normalization!r}")
    reports: list[EvalReport] = []
    for spec in datasets:
        try:
            reports.extend(evaluate_dataset(
                spec, classifiers, grid, seed, sigma=sigma,
                resamples=resamples, normalization=normalization,
                include_self=include_self))
        except (DataError, OSError) as exc:
            log.error("skipping dataset %r: %s", spec.name, exc)
    return reports


def reports_to_json(reports, **metadata) -> str:
    """Deterministic JSON document for a list of EvalReports."""
    payload = dict(metadata)
    payload["reports"] = [asdict(r) for r in reports]
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def reports_to_table(reports) -> str:
    """Aligned text table: datasets as rows, classifiers as columns,
    cells showing mean +/- std CA in percent."""
    datasets, columns = [], []
    cells = {}
    for r in reports:
        if r.dataset not in datasets:
            datasets.append(r.dataset)
        if r.classifier not in columns:
            columns.append(r.classifier)
        cells[(r.dataset, r.classifier)] = f"{r.mean_ca:.2f} ± {r.std_ca:.2f}"
    header = ["Dataset"] + columns
    rows = [[ds] + [cells.get((ds, c), "-") for c in columns]
            for ds in datasets]
    widths = [max(len(line[i]) for line in [header] + rows)
              for i in range(len(header))]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*header), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*row) for row in rows]
    return "\n".join(lines) + "\n"
