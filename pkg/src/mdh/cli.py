"""Command-line interface: clustering and semi-supervised runs with
machine-readable reports, plot-data export with rendered figures, and the
oracle-backed validation suites."""

from __future__ import annotations

import argparse
import csv
import os
import sys
import time

import numpy as np

from . import __version__
from .data_io import DataError, DegenerateDataError, load_csv, standardize
from .metrics import classification_error, success_ratio
from .optimizer import MdhConfig, mdp2_cluster, mdp2_ssc
from .report import SCHEMA_VERSION, dumps, render_figure, result_to_dict, \
    write_plot_data
from .validate import run_suites

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_LABELS = 4


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="mdh",
        description="Minimum density hyperplanes for clustering and "
                    "semi-supervised classification.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--input", required=True, help="input CSV path")
        p.add_argument("--has-header", action="store_true")
        p.add_argument("--label-col", default=None,
                       help="label column name (with header) or index")
        p.add_argument("--positive-label", default=None,
                       help="label symbol mapped to +1")
        p.add_argument("--h", type=float, default=None,
                       help="bandwidth override")
        p.add_argument("--alpha-max", type=float, default=0.9)
        p.add_argument("--eta", type=float, default=1e-2)
        p.add_argument("--m", type=int, default=256,
                       help="offset-search grid size")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--standardize", action="store_true",
                       help="scale features to unit variance before running")
        p.add_argument("--output", default=None,
                       help="report path (stdout when omitted)")
        p.add_argument("--plot-data", default=None,
                       help="write the projected-density curve CSV here "
                            "(a rendered PNG is placed alongside)")

    p_cluster = sub.add_parser("cluster", help="binary partition by minimum "
                                               "density hyperplane")
    common(p_cluster)

    p_ssc = sub.add_parser("ssc", help="semi-supervised classification")
    common(p_ssc)
    p_ssc.add_argument("--gamma-schedule", default="0.1,1,10",
                       help="comma-separated nondecreasing label-penalty "
                            "weights")
    p_ssc.add_argument("--truth-col", default=None,
                       help="column with full ground truth for evaluating "
                            "the unlabelled rows")

    p_val = sub.add_parser("validate", help="run oracle-backed validation "
                                            "suites")
    p_val.add_argument("--suite", default="all",
                       choices=["eq4", "lemma1", "prop1", "convergence",
                                "all"])
    p_val.add_argument("--seed", type=int, default=0)
    p_val.add_argument("--output", default=None)
    return parser


def _alpha_schedule(alpha_max: float):
    if alpha_max <= 0.01:
        return (alpha_max,)
    sched = [0.01]
    a = 0.1
    while a < alpha_max - 1e-12:
        sched.append(round(a, 10))
        a += 0.1
    sched.append(alpha_max)
    return tuple(sched)


def _read_raw_column(path, has_header, column):
    """Raw strings of one CSV column, used as ground-truth cluster ids."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    header = rows[0] if has_header else None
    body = rows[1:] if has_header else rows
    if isinstance(column, str) and not column.isdigit():
        if header is None:
            raise DataError("label column by name requires a header")
        idx = header.index(column)
    else:
        idx = int(column)
    return [r[idx].strip() for r in body]


def _emit(report: dict, output):
    text = dumps(report) + "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _thread_cap():
    # MDH_THREADS caps worker parallelism; the current implementation is
    # single-threaded, so the cap is recorded in the report only.
    raw = os.environ.get("MDH_THREADS")
    try:
        return max(1, int(raw)) if raw else os.cpu_count() or 1
    except ValueError:
        return os.cpu_count() or 1


def _run_partition_command(args, ssc: bool):
    if args.h is not None and args.h <= 0.0:
        raise DataError("bandwidth must be positive")
    label_col = args.label_col
    if ssc and label_col is None:
        raise DataError("ssc requires --label-col")
    ignore = ()
    if ssc and getattr(args, "truth_col", None) is not None:
        ignore = (args.truth_col,)
    ds, labeled = load_csv(args.input, has_header=args.has_header,
                           label_column=label_col,
                           positive_label=args.positive_label,
                           ignore_columns=ignore)
    scale_note = None
    if args.standardize:
        ds, _, _ = standardize(ds)
        scale_note = "features standardized to unit variance"

    gamma_schedule = (0.1, 1.0, 10.0)
    if ssc:
        if labeled is None:
            raise _LabelConfigError("no labelled rows in the label column")
        gamma_schedule = tuple(
            float(g) for g in args.gamma_schedule.split(","))
    cfg = MdhConfig(h=args.h, alpha_schedule=_alpha_schedule(args.alpha_max),
                    gamma_schedule=gamma_schedule, eta=args.eta, m=args.m,
                    seed=args.seed)
    t0 = time.perf_counter()
    if ssc:
        res = mdp2_ssc(ds, labeled, cfg)
    else:
        res = mdp2_cluster(ds, cfg)
    elapsed = time.perf_counter() - t0

    metrics = None
    notes = []
    if scale_note:
        notes.append(scale_note)
    if not ssc and label_col is not None:
        truth = _read_raw_column(args.input, args.has_header, label_col)
        pm = success_ratio(truth, res.partition)
        metrics = {
            "success_ratio": pm.success_ratio,
            "v_measure": pm.v_measure,
            "error_count": pm.error_count,
            "success_count": pm.success_count,
            "aggregate_map": {str(k): int(v)
                              for k, v in pm.aggregate_map.items()},
        }
    if ssc:
        metrics = {"labeled_training_error": res.labeled_error}
        if args.truth_col is not None:
            truth_sym = _read_raw_column(args.input, args.has_header,
                                         args.truth_col)
            symbols = sorted({s for s in truth_sym if s != ""})
            if len(symbols) != 2:
                raise DataError("truth column must contain exactly two "
                                f"symbols, found {symbols}")
            pos = args.positive_label if args.positive_label in symbols \
                else symbols[1]
            truth = np.array([1 if s == pos else -1 for s in truth_sym])
            unlabeled = [i for i in range(ds.n)
                         if i not in set(labeled.indices.tolist())]
            if unlabeled:
                err = classification_error(res.partition, truth,
                                           exclude=labeled.indices,
                                           allow_flip=False)
                metrics["unlabeled_error"] = err
            else:
                notes.append("all rows labelled; unlabelled evaluation set "
                             "is empty")
        if any(r.init_tag == "svm_fallback_pc1" for r in res.trace):
            notes.append("single-class labels: fell back to the first "
                         "principal component for initialisation")

    report = {
        "artifact_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "command": "ssc" if ssc else "cluster",
        "config": {
            "input": args.input,
            "has_header": bool(args.has_header),
            "label_col": label_col,
            "positive_label": args.positive_label,
            "h": cfg.h,
            "alpha_schedule": list(cfg.alpha_schedule),
            "gamma_schedule": list(cfg.gamma_schedule) if ssc else None,
            "eta": cfg.eta,
            "eps": cfg.eps,
            "m": cfg.m,
            "seed": cfg.seed,
            "standardize": bool(args.standardize),
            "thread_cap": _thread_cap(),
        },
        "result": result_to_dict(res),
        "metrics": metrics,
        "notes": notes,
        "timing": {"total_seconds": elapsed},
    }
    if args.plot_data:
        h_used = cfg.h
        if h_used is None:
            from .data_io import center, default_bandwidth
            ds_c, _ = center(ds)
            h_used = default_bandwidth(ds_c)
        rows = write_plot_data(args.plot_data, ds, res, h_used)
        fig_path = os.path.splitext(args.plot_data)[0] + ".png"
        render_figure(fig_path, rows)
        report["plot_data"] = args.plot_data
        report["figure"] = fig_path
    _emit(report, args.output)
    return EXIT_OK


class _LabelConfigError(ValueError):
    pass


def cmd_cluster(args) -> int:
    return _run_partition_command(args, ssc=False)


def cmd_ssc(args) -> int:
    return _run_partition_command(args, ssc=True)


def cmd_validate(args) -> int:
    results = run_suites(args.suite, seed=args.seed)
    report = {
        "artifact_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "command": "validate",
        "seed": args.seed,
        "suites": results,
        "all_passed": all(r["passed"] for r in results),
    }
    _emit(report, args.output)
    for r in results:
        status = "pass" if r["passed"] else "FAIL"
        sys.stderr.write(f"{r['suite']}: {status}\n")
    return EXIT_OK if report["all_passed"] else EXIT_VALIDATION


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "cluster":
            return cmd_cluster(args)
        if args.command == "ssc":
            return cmd_ssc(args)
        return cmd_validate(args)
    except _LabelConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_LABELS
    except DegenerateDataError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DEGENERATE
    except (DataError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
