"""Command-line driver for reproducible nearest-neighbor benchmarks.

Subcommands: evaluate (full benchmark of the classifier families on one
dataset), cross-validate (hyperparameter selection only), classify
(label query patterns), bootstrap (write a Hamamoto-bootstrapped copy
of a training set).  All randomness flows from --seed, so identical
invocations produce identical outputs.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from .bootstrap import hamamoto_bootstrap
from .classifiers import FAMILIES, class_scores, make_classifier, neighbor_weights
from .data import DataError, load_csv, save_csv
from .evaluation import (DEFAULT_SEED, CVGrid, DatasetSpec, cross_validate,
                         evaluate_dataset, reports_to_json, reports_to_table)
from .neighbors import knn_query


class _Parser(argparse.ArgumentParser):
    # argparse defaults to exit code 2 on usage problems; the contract
    # reserves 2 for data errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _label_col(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}") from None


def _add_csv_options(parser):
    parser.add_argument("--label-col", type=_label_col, default=-1,
                        help="label column index or header name (default: last)")
    parser.add_argument("--delimiter", default=",",
                        help="field delimiter (default: comma)")
    parser.add_argument("--header", action="store_true",
                        help="first row is a header")


def _parse_families(text: str) -> tuple[str, ...]:
    names = [part.strip() for part in text.split(",") if part.strip()]
    if "all" in names:
        return FAMILIES
    for name in names:
        if name not in FAMILIES:
            raise argparse.ArgumentTypeError(
                f"unknown classifier {name!r}; choose from "
                f"{', '.join(FAMILIES)} or all")
    return tuple(names)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gwknn",
                     description="Nearest-neighbor classification benchmarks "
                                 "with Gaussian-weighted voting")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    ev = sub.add_parser("evaluate",
                        help="benchmark classifier families on one dataset")
    ev.add_argument("--train", required=True, help="training CSV path")
    ev.add_argument("--test", help="test CSV path")
    ev.add_argument("--split-train", type=int, metavar="N",
                    help="no separate test file: hold out all but N random "
                         "training patterns for testing")
    ev.add_argument("--name", help="dataset display name (default: file stem)")
    _add_csv_options(ev)
    ev.add_argument("--classifiers", type=_parse_families, default=FAMILIES,
                    help="comma-separated subset of "
                         f"{{{','.join(FAMILIES)}}} or 'all' (default: all)")
    ev.add_argument("--grid-k", type=_int_list,
                    default=None, metavar="K1,K2,...",
                    help="k candidates for cross-validation "
                         "(default: 1,3,...,31)")
    ev.add_argument("--grid-r", type=_int_list,
                    default=None, metavar="R1,R2,...",
                    help="r candidates for k-NNC(HBS) (default: 1,2,3,5,7,10)")
    ev.add_argument("--sigma", type=float, default=1.0,
                    help="Gaussian kernel width (default: 1.0)")
    ev.add_argument("--resamples", type=int, default=10,
                    help="test resamples for the CA spread (default: 10)")
    ev.add_argument("--seed", type=int, default=DEFAULT_SEED,
                    help=f"random seed (default: {DEFAULT_SEED})")
    ev.add_argument("--norm", choices=("pooled", "train"), default="pooled",
                    help="normalization statistics over train+test pooled "
                         "or train only (default: pooled)")
    ev.add_argument("--include-self", action="store_true",
                    help="bootstrap neighborhoods may include the pattern "
                         "itself")
    ev.add_argument("--out-json", metavar="PATH",
                    help="write the full report as JSON")
    ev.add_argument("--out-table", metavar="PATH",
                    help="write the comparison table as text")
    ev.set_defaults(func=cmd_evaluate)

    cv = sub.add_parser("cross-validate",
                        help="select k (and r) for one classifier family")
    cv.add_argument("--train", required=True)
    _add_csv_options(cv)
    cv.add_argument("--classifier", choices=FAMILIES, default="gwknnc")
    cv.add_argument("--grid-k", type=_int_list, default=None)
    cv.add_argument("--grid-r", type=_int_list, default=None)
    cv.add_argument("--folds", type=int, default=3)
    cv.add_argument("--sigma", type=float, default=1.0)
    cv.add_argument("--seed", type=int, default=DEFAULT_SEED)
    cv.add_argument("--include-self", action="store_true")
    cv.set_defaults(func=cmd_cross_validate)

    cl = sub.add_parser("classify", help="label query patterns")
    cl.add_argument("--train", required=True, help="training CSV path")
    cl.add_argument("--queries", required=True,
                    help="CSV of query patterns, features only")
    _add_csv_options(cl)
    cl.add_argument("--classifier", choices=FAMILIES, default="gwknnc")
    cl.add_argument("--k", type=int, default=1)
    cl.add_argument("--r", type=int, help="bootstrap neighbors for knnc-hbs")
    cl.add_argument("--sigma", type=float, default=1.0)
    cl.add_argument("--include-self", action="store_true")
    cl.add_argument("--out", metavar="PATH",
                    help="predictions CSV (default: stdout)")
    cl.set_defaults(func=cmd_classify)

    bs = sub.add_parser("bootstrap",
                        help="write a Hamamoto-bootstrapped training set")
    bs.add_argument("--train", required=True)
    _add_csv_options(bs)
    bs.add_argument("--r", type=int, required=True,
                    help="same-class neighbors averaged per pattern")
    bs.add_argument("--include-self", action="store_true")
    bs.add_argument("--out", required=True, metavar="PATH",
                    help="output CSV path")
    bs.set_defaults(func=cmd_bootstrap)

    return parser


def _grid(args) -> CVGrid:
    kwargs = {}
    if args.grid_k is not None:
        kwargs["k_candidates"] = args.grid_k
    if args.grid_r is not None:
        kwargs["r_candidates"] = args.grid_r
    try:
        return CVGrid(**kwargs)
    except ValueError as exc:
        raise DataError(str(exc)) from None


def cmd_evaluate(args) -> int:
    if (args.test is None) == (args.split_train is None):
        print("gwknn evaluate: error: give exactly one of --test or "
              "--split-train", file=sys.stderr)
        return 1
    if args.split_train is not None and args.split_train < 1:
        print("gwknn evaluate: error: --split-train must be >= 1",
              file=sys.stderr)
        return 1
    from pathlib import Path
    spec = DatasetSpec(
        name=args.name or Path(args.train).stem,
        train_path=args.train, test_path=args.test,
        split_train=args.split_train, label_column=args.label_col,
        delimiter=args.delimiter, header=args.header)
    reports = evaluate_dataset(
        spec, classifiers=args.classifiers, grid=_grid(args),
        seed=args.seed, sigma=args.sigma, resamples=args.resamples,
        normalization=args.norm, include_self=args.include_self)
    table = reports_to_table(reports)
    sys.stdout.write(table)
    if args.out_table:
        with open(args.out_table, "w") as fh:
            fh.write(table)
    if args.out_json:
        with open(args.out_json, "w") as fh:
            fh.write(reports_to_json(
                reports, seed=args.seed, sigma=args.sigma,
                resamples=args.resamples, normalization=args.norm,
                grid_k=list(_grid(args).k_candidates),
                grid_r=list(_grid(args).r_candidates)))
    return 0


def cmd_cross_validate(args) -> int:
    train = load_csv(args.train, label_column=args.label_col,
                     delimiter=args.delimiter, header=args.header)
    k, r = cross_validate(train, _grid(args), args.classifier,
                          folds=args.folds, seed=args.seed, sigma=args.sigma,
                          include_self=args.include_self)
    if r is None:
        print(f"selected k={k}")
    else:
        print(f"selected k={k} r={r}")
    return 0


def _load_queries(path, delimiter) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh, delimiter=delimiter)
                if row and any(cell.strip() for cell in row)]
    if not rows:
        raise DataError(f"{path}: no query rows")
    width = len(rows[0])
    queries = np.empty((len(rows), width), dtype=np.float64)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise DataError(f"{path}: row {i + 1} has {len(row)} cells, "
                            f"expected {width}")
        try:
            queries[i] = [float(cell) for cell in row]
        except ValueError:
            raise DataError(f"{path}: cannot parse row {i + 1}") from None
    if not np.all(np.isfinite(queries)):
        raise DataError(f"{path}: non-finite query value")
    return queries


def cmd_classify(args) -> int:
    train = load_csv(args.train, label_column=args.label_col,
                     delimiter=args.delimiter, header=args.header)
    queries = _load_queries(args.queries, args.delimiter)
    if queries.shape[1] != train.dim:
        raise DataError(
            f"queries have {queries.shape[1]} features, training set "
            f"has {train.dim}")
    clf = make_classifier(args.classifier, k=args.k, r=args.r,
                          sigma=args.sigma, include_self=args.include_self)
    clf.fit(train)
    fitted = clf.train_
    dists, idx = knn_query(fitted.features, queries, clf.k)
    weights = neighbor_weights(clf.rule, dists, clf.sigma)
    scores = class_scores(fitted.labels[idx], weights, fitted.n_classes)
    predicted = scores.argmax(axis=1)

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["predicted"]
                        + [f"score_{name}" for name in train.class_names])
        for p, row in zip(predicted, scores):
            writer.writerow([train.class_names[p]]
                            + [repr(v) for v in row.tolist()])
    finally:
        if args.out:
            out.close()
    return 0


def cmd_bootstrap(args) -> int:
    if args.r < 1:
        print("gwknn bootstrap: error: --r must be >= 1", file=sys.stderr)
        return 1
    train = load_csv(args.train, label_column=args.label_col,
                     delimiter=args.delimiter, header=args.header)
    boot = hamamoto_bootstrap(train, args.r, include_self=args.include_self)
    save_csv(boot, args.out, delimiter=args.delimiter)
    counts = boot.class_counts()
    for name, count in zip(boot.class_names, counts):
        print(f"{name}: {count}")
    return 0


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataError, OSError) as exc:
        print(f"gwknn: data error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"gwknn: internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
