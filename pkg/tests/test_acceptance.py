"""End-to-end acceptance checks.  Each test prints a single pass/fail line
so the whole battery can be read at a glance with ``pytest -v -s``."""

import json
import os
import re
import warnings

import numpy as np
import pytest

from mdh.cli import main
from mdh.data_io import Dataset
from mdh.kde1d import lipschitz_bound
from mdh.metrics import binary_v_measure, success_ratio
from mdh.objective import PenaltyParams, phi_value_and_gradient
from mdh.optimizer import MdhConfig, mdp2_cluster
from mdh.validate import gaussian_mixture, suite_convergence, suite_eq4, \
    suite_lemma1, suite_prop1, two_gaussians

BENCH_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "benchmarks")


def report(num, name, ok):
    print(f"\n[acceptance {num}] {name}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"acceptance criterion {num} ({name}) failed"


def test_01_density_integral_exactness():
    res = suite_eq4(seed=0)
    ok = res["passed"] and res["max_relative_gap"] < 1e-6
    report(1, "1-D reduction matches line quadrature", ok)


def test_02_level_set_bound():
    res = suite_lemma1(seed=0)
    ok = res["passed"] and res["violations"] == 0
    report(2, "level-set bound never violated", ok)


def test_03_gradient_matches_finite_differences():
    worst = 0.0
    checked = 0
    for d in (2, 3, 5, 10):
        rng = np.random.default_rng(100 + d)
        half = 30
        shift = np.zeros(d)
        shift[0] = 2.5
        rows = np.vstack([rng.normal(size=(half, d)) - shift,
                          rng.normal(size=(half, d)) + shift])
        ds = Dataset(rows - rows.mean(axis=0))
        h = 0.7
        for alpha in (0.05, 0.6):  # penalty active / inactive regimes
            pp = PenaltyParams(alpha=alpha, L=lipschitz_bound(h))
            trials = 0
            while trials < 13 and checked < 104:
                theta = rng.uniform(0.3, np.pi - 0.3, size=d - 1)
                value, grad, inner = phi_value_and_gradient(theta, ds, h, pp)
                if len(inner.minimizer_set) > 1:
                    continue  # nonsmooth point; only smooth angles count
                fd = np.empty(d - 1)
                step = 1e-6
                for k in range(d - 1):
                    e = np.zeros(d - 1)
                    e[k] = step
                    fp = phi_value_and_gradient(theta + e, ds, h, pp)[0]
                    fm = phi_value_and_gradient(theta - e, ds, h, pp)[0]
                    fd[k] = (fp - fm) / (2 * step)
                rel = np.linalg.norm(grad - fd) \
                    / max(np.linalg.norm(fd), 1e-12)
                worst = max(worst, rel)
                trials += 1
                checked += 1
    ok = checked >= 100 and worst < 1e-5
    print(f"\n  checked {checked} smooth angles, worst relative gap "
          f"{worst:.3e}")
    report(3, "analytic gradient within 1e-5 of central differences", ok)


def test_04_penalty_calibration():
    res = suite_prop1(seed=0)
    report(4, "penalised minimisers stay within eta of the feasible "
              "interval", res["passed"])


def test_05_bandwidth_convergence_to_max_margin():
    res = suite_convergence(seed=0)
    ok = res["passed"] and res["final_distance"] < 0.05
    report(5, "shrinking bandwidth converges to the max margin hyperplane",
           ok)


def test_06_mixture_recovery_100_random_restarts():
    ds, comp = gaussian_mixture(400, seed=123,
                                centers=[(0, 0), (6, 0), (0, 6), (6, 6)])
    depths_positive = 0
    sr_good = 0
    for seed in range(100):
        res = mdp2_cluster(ds, MdhConfig(seed=seed, inits=("random",)))
        if res.relative_depth > 0.0:
            depths_positive += 1
        if success_ratio(comp, res.partition).success_ratio >= 0.95:
            sr_good += 1
    ok = depths_positive == 100 and sr_good >= 95
    print(f"\n  positive depth in {depths_positive}/100 runs, "
          f"SR >= 0.95 in {sr_good}/100")
    report(6, "4-component mixture recovered from random starts", ok)


def _benchmark_sr(name):
    # last column is the class id; everything before it is numeric
    import csv
    path = os.path.join(BENCH_DIR, name)
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if any(not _numeric(tok) for tok in rows[0][:-1]):
        rows = rows[1:]
    features = np.array([[float(tok) for tok in r[:-1]] for r in rows])
    truth = [r[-1].strip() for r in rows]
    res = mdp2_cluster(Dataset(features), MdhConfig(seed=0))
    return success_ratio(truth, res.partition).success_ratio


def _numeric(tok):
    try:
        float(tok)
        return True
    except ValueError:
        return False


def test_07_benchmark_spot_checks():
    targets = [("br_cancer.csv", 0.85), ("seeds.csv", 0.80)]
    missing = [n for n, _ in targets
               if not os.path.exists(os.path.join(BENCH_DIR, n))]
    if missing:
        warnings.warn("benchmark CSVs not present, spot checks skipped: "
                      + ", ".join(missing))
        print("\n[acceptance 7] benchmark spot checks: SKIP "
              f"(missing {', '.join(missing)})")
        pytest.skip("benchmark data not available")
    ok = True
    for name, floor in targets:
        sr = _benchmark_sr(name)
        print(f"\n  {name}: SR = {sr:.3f} (floor {floor})")
        ok = ok and sr >= floor
    report(7, "benchmark success ratios meet their floors", ok)


def test_08_metric_exact_values():
    # hand-worked SR = 1/3 example
    truth = ["a", "a", "a", "b", "b"]
    part = [1, 1, -1, 1, -1]
    pm = success_ratio(truth, part)
    ok = pm.error_count == 2 and pm.success_count == 1 \
        and abs(pm.success_ratio - 1.0 / 3.0) < 1e-12
    # V-measure zero when each side reproduces the class mix
    ok = ok and abs(binary_v_measure(["a", "a", "b", "b"],
                                     [1, -1, 1, -1])) < 1e-12
    # perfect split scores 1 on both metrics
    perfect = success_ratio(["a"] * 5 + ["b"] * 5, [1] * 5 + [-1] * 5)
    ok = ok and perfect.success_ratio == 1.0 \
        and abs(perfect.v_measure - 1.0) < 1e-12
    report(8, "metric formulas reproduce hand-worked values", ok)


def test_09_cli_determinism(tmp_path):
    ds, labels = two_gaussians(120, seed=0)
    path = tmp_path / "data.csv"
    with open(path, "w") as fh:
        fh.write("x,y,cls\n")
        for row, lab in zip(ds.rows, labels):
            fh.write(f"{row[0]},{row[1]},{'neg' if lab == -1 else 'pos'}\n")
    outs = []
    for k in range(2):
        out = tmp_path / f"report{k}.json"
        code = main(["cluster", "--input", str(path), "--has-header",
                     "--label-col", "cls", "--seed", "0",
                     "--output", str(out)])
        assert code == 0
        outs.append(re.sub(r'"total_seconds": [^\n,}]+',
                           '"total_seconds": X', out.read_text()))
    ok = outs[0] == outs[1] and json.loads(
        outs[0].replace('"total_seconds": X', '"total_seconds": 0'))
    report(9, "repeated CLI runs are byte-identical apart from timing",
           bool(ok))
