import json
import math

import numpy as np
import pytest

from gwknn import (CVGrid, DataError, DatasetSpec, KnnClassifier,
                   LabeledDataset, bootstrap_resample_eval,
                   classification_accuracy, cross_validate, load_csv,
                   make_classifier, reports_to_json, reports_to_table,
                   run_comparison, save_csv, zero_one_loss)


class FixedOutcomeClassifier:
    """Stub: predicts the true label except on a fixed set of rows."""

    def __init__(self, truth, wrong_rows):
        self.truth = np.asarray(truth)
        self.wrong_rows = set(wrong_rows)
        self.name = "stub"
        self.k = 1
        self.hamamoto_r = None
        self.predict_calls = 0

    def fit(self, train):
        return self

    def predict(self, features):
        self.predict_calls += 1
        out = self.truth.copy()
        for row in self.wrong_rows:
            out[row] = self.truth[row] + 1
        return out


def cluster_dataset(n_per_class=10, noise=0.3, seed=2):
    rng = np.random.default_rng(seed)
    a = rng.normal((-2.0, 0.0), noise, size=(n_per_class, 2))
    b = rng.normal((2.0, 0.0), noise, size=(n_per_class, 2))
    return LabeledDataset(np.vstack([a, b]),
                          np.array([0] * n_per_class + [1] * n_per_class),
                          ("a", "b"))


class TestZeroOneLoss:
    def test_match(self):
        assert zero_one_loss(1, 1) == 0

    def test_mismatch(self):
        assert zero_one_loss(0, 2) == 1

    def test_accuracy_is_complement_of_mean_loss(self, two_cluster_1d):
        train, test = two_cluster_1d
        clf = KnnClassifier("nnc").fit(train)
        losses = [zero_one_loss(clf.decide(p).predicted, int(l))
                  for p, l in zip(test.features, test.labels)]
        ca = classification_accuracy(KnnClassifier("nnc"), train, test)
        assert ca == pytest.approx(100.0 * (1.0 - np.mean(losses)))


class TestClassificationAccuracy:
    def test_train_as_test_with_distinct_patterns_is_perfect(self):
        ds = cluster_dataset()
        assert classification_accuracy(KnnClassifier("nnc"), ds, ds) == 100.0

    def test_two_cluster_synthetic(self, two_cluster_1d):
        train, test = two_cluster_1d
        assert classification_accuracy(
            KnnClassifier("knnc", k=1), train, test) == 100.0

    def test_all_wrong_is_zero(self):
        train = LabeledDataset(np.array([[0.0], [10.0]]),
                               np.array([0, 1]), ("a", "b"))
        test = LabeledDataset(np.array([[0.1], [9.9]]),
                              np.array([1, 0]), ("a", "b"))
        assert classification_accuracy(KnnClassifier("nnc"), train, test) == 0.0

    def test_registry_mismatch_rejected(self, tmp_path):
        (tmp_path / "tr.csv").write_text("0,a\n1,b\n")
        (tmp_path / "te.csv").write_text("1,b\n0,a\n")
        train = load_csv(tmp_path / "tr.csv")
        test = load_csv(tmp_path / "te.csv")
        with pytest.raises(DataError, match="registries"):
            classification_accuracy(KnnClassifier("nnc"), train, test)
        aligned = load_csv(tmp_path / "te.csv", class_names=train.class_names)
        assert classification_accuracy(
            KnnClassifier("nnc"), train, aligned) == 100.0


class TestCrossValidate:
    def test_singleton_grid_returned_unchanged(self):
        ds = cluster_dataset()
        grid = CVGrid(k_candidates=(3,), r_candidates=(2,))
        assert cross_validate(ds, grid, "knnc") == (3, None)
        assert cross_validate(ds, grid, "knnc-hbs") == (3, 2)

    def test_separable_data_prefers_smallest_k(self):
        # every candidate reaches 100% CA; the tie rule picks k=1
        ds = cluster_dataset(n_per_class=12, noise=0.1)
        grid = CVGrid(k_candidates=(1, 3), r_candidates=(1,))
        assert cross_validate(ds, grid, "knnc") == (1, None)
        assert cross_validate(ds, grid, "gwknnc") == (1, None)

    def test_nnc_skips_search(self):
        ds = cluster_dataset()
        assert cross_validate(ds, CVGrid(), "nnc") == (1, None)

    def test_deterministic(self):
        ds = cluster_dataset(n_per_class=15, noise=1.5, seed=9)
        grid = CVGrid(k_candidates=(1, 3, 5), r_candidates=(1, 2))
        first = cross_validate(ds, grid, "knnc-hbs", seed=5)
        second = cross_validate(ds, grid, "knnc-hbs", seed=5)
        assert first == second

    def test_candidate_order_does_not_matter(self):
        ds = cluster_dataset(n_per_class=15, noise=1.5, seed=9)
        shuffled = CVGrid(k_candidates=(5, 1, 3), r_candidates=(2, 1))
        ordered = CVGrid(k_candidates=(1, 3, 5), r_candidates=(1, 2))
        assert (cross_validate(ds, shuffled, "knnc-hbs", seed=5)
                == cross_validate(ds, ordered, "knnc-hbs", seed=5))

    def test_matches_exhaustive_per_candidate_evaluation(self):
        ds = cluster_dataset(n_per_class=15, noise=1.2, seed=13)
        grid = CVGrid(k_candidates=(1, 3, 5), r_candidates=(1,))
        from gwknn.evaluation import _fold_splits
        best = None
        for k in grid.k_candidates:
            cas = []
            for tr_idx, val_idx in _fold_splits(ds.n, 3, 42):
                tr, val = ds.select(tr_idx), ds.select(val_idx)
                clf = KnnClassifier("gwknnc", k=k).fit(tr)
                cas.append(100.0 * np.mean(clf.predict(val.features)
                                           == val.labels))
            ca = float(np.mean(cas))
            if best is None or ca > best[0]:
                best = (ca, k)
        assert cross_validate(ds, grid, "gwknnc", seed=42) == (best[1], None)

    def test_validation(self):
        ds = cluster_dataset()
        with pytest.raises(ValueError, match="folds"):
            cross_validate(ds, CVGrid(), "knnc", folds=1)
        with pytest.raises(ValueError, match="unknown family"):
            cross_validate(ds, CVGrid(), "forest")
        with pytest.raises(ValueError):
            CVGrid(k_candidates=())
        with pytest.raises(ValueError):
            CVGrid(k_candidates=(0, 1))


class TestBootstrapResampleEval:
    def _test_set(self, n=40):
        rng = np.random.default_rng(3)
        return LabeledDataset(rng.normal(size=(n, 2)),
                              rng.integers(0, 2, size=n), ("a", "b"))

    def test_perfect_classifier(self):
        test = self._test_set()
        clf = FixedOutcomeClassifier(test.labels, wrong_rows=())
        report = bootstrap_resample_eval(clf, test, test, resamples=10, seed=0)
        assert report.mean_ca == 100.0
        assert report.std_ca == 0.0
        assert len(report.ca_values) == 10

    def test_single_pattern_test_set_has_zero_spread(self):
        test = LabeledDataset(np.array([[0.0, 0.0]]), np.array([0]), ("a",))
        clf = FixedOutcomeClassifier(test.labels, wrong_rows=())
        report = bootstrap_resample_eval(clf, test, test, resamples=5, seed=1)
        assert report.std_ca == 0.0

    def test_classifies_each_pattern_exactly_once(self):
        test = self._test_set()
        clf = FixedOutcomeClassifier(test.labels, wrong_rows=(0, 1))
        bootstrap_resample_eval(clf, test, test, resamples=25, seed=2)
        assert clf.predict_calls == 1

    def test_mean_within_resample_range(self):
        test = self._test_set()
        clf = FixedOutcomeClassifier(test.labels, wrong_rows=range(7))
        report = bootstrap_resample_eval(clf, test, test, resamples=10, seed=3)
        assert min(report.ca_values) <= report.mean_ca <= max(report.ca_values)

    def test_binomial_sampling_behavior(self):
        # drawing |test| outcomes with replacement from a pool with accuracy
        # p makes each resample CA an average of Bernoulli(p) draws; the
        # resample mean stays within 3 standard errors of 100 p
        n, errors, resamples = 400, 40, 50
        truth = np.zeros(n, dtype=np.int64)
        test = LabeledDataset(np.arange(n, dtype=float)[:, None], truth, ("a",
                                                                          "b"))
        clf = FixedOutcomeClassifier(truth, wrong_rows=range(errors))
        report = bootstrap_resample_eval(clf, test, test,
                                         resamples=resamples, seed=4)
        p = 1.0 - errors / n
        tolerance = 3.0 * (100.0 * math.sqrt(p * (1 - p) / n)) \
            / math.sqrt(resamples)
        assert abs(report.mean_ca - 100.0 * p) < tolerance

    def test_deterministic_by_seed(self):
        test = self._test_set()
        clf = FixedOutcomeClassifier(test.labels, wrong_rows=(5,))
        a = bootstrap_resample_eval(clf, test, test, resamples=10, seed=7)
        b = bootstrap_resample_eval(clf, test, test, resamples=10, seed=7)
        assert a.ca_values == b.ca_values

    def test_resample_count_validated(self):
        test = self._test_set()
        clf = FixedOutcomeClassifier(test.labels, wrong_rows=())
        with pytest.raises(ValueError, match="resamples"):
            bootstrap_resample_eval(clf, test, test, resamples=1)

    def test_real_classifier_report_fields(self, two_cluster_1d):
        train, test = two_cluster_1d
        clf = make_classifier("gwknnc", k=1)
        report = bootstrap_resample_eval(clf, train, test, resamples=4,
                                         seed=8, dataset_name="toy")
        assert report.dataset == "toy"
        assert report.classifier == "Gwk-NNC"
        assert report.selected_k == 1
        assert report.selected_r is None
        assert report.seed == 8


class TestRunComparison:
    def _write_dataset(self, tmp_path, name, n=24, seed=10):
        ds = cluster_dataset(n_per_class=n // 2, noise=0.5, seed=seed)
        path = tmp_path / f"{name}.csv"
        save_csv(ds, path)
        return path

    def test_empty_classifier_list(self, tmp_path):
        path = self._write_dataset(tmp_path, "toy")
        spec = DatasetSpec("toy", str(path), split_train=16)
        assert run_comparison([spec], classifiers=()) == []

    def test_full_pipeline_produces_one_report_per_pair(self, tmp_path):
        train = self._write_dataset(tmp_path, "train", seed=10)
        test = self._write_dataset(tmp_path, "test", seed=11)
        spec = DatasetSpec("toy", str(train), test_path=str(test))
        grid = CVGrid(k_candidates=(1, 3), r_candidates=(1, 2))
        reports = run_comparison([spec], grid=grid, resamples=4)
        assert [r.classifier for r in reports] == [
            "NNC", "k-NNC", "wk-NNC", "k-NNC(HBS)", "Gwk-NNC"]
        assert all(r.dataset == "toy" for r in reports)
        assert all(0.0 <= r.mean_ca <= 100.0 for r in reports)

    def test_failing_dataset_skipped_not_fatal(self, tmp_path, caplog):
        good = self._write_dataset(tmp_path, "good")
        specs = [DatasetSpec("bad", str(tmp_path / "missing.csv"),
                             split_train=5),
                 DatasetSpec("good", str(good), split_train=16)]
        grid = CVGrid(k_candidates=(1,), r_candidates=(1,))
        reports = run_comparison(specs, classifiers=("nnc",), grid=grid,
                                 resamples=3)
        assert [r.dataset for r in reports] == ["good"]
        assert any("bad" in rec.message for rec in caplog.records)

    def test_split_train_spec(self, tmp_path):
        path = self._write_dataset(tmp_path, "toy")
        spec = DatasetSpec("toy", str(path), split_train=16)
        grid = CVGrid(k_candidates=(1,), r_candidates=(1,))
        reports = run_comparison([spec], classifiers=("nnc", "gwknnc"),
                                 grid=grid, resamples=3)
        assert len(reports) == 2

    def test_invalid_normalization_mode(self, tmp_path):
        path = self._write_dataset(tmp_path, "toy")
        spec = DatasetSpec("toy", str(path), split_train=16)
        with pytest.raises(ValueError, match="normalization"):
            run_comparison([spec], normalization="zscore")

    def test_spec_requires_exactly_one_of_test_or_split(self):
        with pytest.raises(ValueError, match="exactly one"):
            DatasetSpec("x", "train.csv")
        with pytest.raises(ValueError, match="exactly one"):
            DatasetSpec("x", "train.csv", test_path="t.csv", split_train=5)


class TestReportRendering:
    def _reports(self, tmp_path):
        train = cluster_dataset(n_per_class=8, seed=20)
        path = tmp_path / "ds.csv"
        save_csv(train, path)
        spec = DatasetSpec("DS", str(path), split_train=10)
        grid = CVGrid(k_candidates=(1,), r_candidates=(1,))
        return run_comparison([spec], grid=grid, resamples=3)

    def test_json_is_deterministic_and_parseable(self, tmp_path):
        reports = self._reports(tmp_path)
        a = reports_to_json(reports, seed=42)
        b = reports_to_json(reports, seed=42)
        assert a == b
        payload = json.loads(a)
        assert payload["seed"] == 42
        assert len(payload["reports"]) == 5

    def test_table_layout(self, tmp_path):
        reports = self._reports(tmp_path)
        table = reports_to_table(reports)
        lines = table.splitlines()
        assert lines[0].startswith("Dataset")
        for column in ("NNC", "k-NNC", "wk-NNC", "k-NNC(HBS)", "Gwk-NNC"):
            assert column in lines[0]
        assert "DS" in lines[2]
        assert "±" in lines[2]
