"""Shared fixtures: tiny synthetic datasets, the bundled WINE data, and
discovery of locally fetched UCI benchmark files."""

from pathlib import Path

import numpy as np
import pytest

from gwknn import LabeledDataset, save_csv

REPO_ROOT = Path(__file__).resolve().parents[1]
DATA_DIR = REPO_ROOT / "data"

# canonical CSV names written by scripts/fetch_uci.py
UCI_FILES = {
    "pendigits": ("pendigits_train.csv", "pendigits_test.csv"),
    "thyroid": ("thyroid_train.csv", "thyroid_test.csv"),
}


def uci_paths(dataset: str):
    """(train, test) paths for a fetched UCI dataset, or None if absent."""
    train, test = (DATA_DIR / name for name in UCI_FILES[dataset])
    if train.exists() and test.exists():
        return train, test
    return None


def require_uci(dataset: str):
    paths = uci_paths(dataset)
    if paths is None:
        pytest.skip(f"{dataset} data not found under {DATA_DIR}; "
                    "run scripts/fetch_uci.py on a machine with network "
                    "access and copy the CSVs there")
    return paths


@pytest.fixture
def two_cluster_1d():
    """Separable 1-D toy problem: class a near -2, class b near +2."""
    train = LabeledDataset(
        np.array([[-2.0], [-2.1], [2.0], [2.1]]),
        np.array([0, 0, 1, 1]), ("a", "b"))
    test = LabeledDataset(
        np.array([[-1.9], [1.9]]), np.array([0, 1]), ("a", "b"))
    return train, test


@pytest.fixture(scope="session")
def wine_dataset():
    """The 178-pattern wine dataset bundled with scikit-learn."""
    sklearn_datasets = pytest.importorskip("sklearn.datasets")
    raw = sklearn_datasets.load_wine()
    labels = np.asarray(raw.target, dtype=np.int64)
    return LabeledDataset(np.asarray(raw.data, dtype=np.float64), labels,
                          tuple(str(c) for c in raw.target_names),
                          name="WINE")


@pytest.fixture(scope="session")
def wine_csv(wine_dataset, tmp_path_factory):
    path = tmp_path_factory.mktemp("wine") / "wine.csv"
    save_csv(wine_dataset, path)
    return path


@pytest.fixture
def small_train_csv(tmp_path):
    """Ten 2-D patterns, two well-separated classes, as a CSV file."""
    rng = np.random.default_rng(7)
    a = rng.normal(loc=(-3.0, 0.0), scale=0.3, size=(5, 2))
    b = rng.normal(loc=(3.0, 0.0), scale=0.3, size=(5, 2))
    ds = LabeledDataset(np.vstack([a, b]),
                        np.array([0] * 5 + [1] * 5), ("neg", "pos"))
    path = tmp_path / "train.csv"
    save_csv(ds, path)
    return path, ds
