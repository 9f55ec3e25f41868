"""End-to-end acceptance checks for the toolkit.

Each test exercises one published guarantee at its stated tolerance and
prints a single PASS/FAIL line so the suite doubles as a checklist:

1. imbalance-ratio accounting on the three reference partitions
2. exact cell balance after fair oversampling
3. fair-utility reference value and the |TNRD| = |FPRD| identity
4. interpolation geometry of synthetic rows
5. k-nearest-neighbor agreement with a full-sort oracle
6. analytic gradients versus central finite differences
7. directional fairness gain of fair oversampling over the baseline
8. robustness of fair oversampling under increasing scarcity
9. provenance audit: no validation instance leaks into fitting
"""

import time
import warnings

import numpy as np
import pytest

from fairbalance.data import (
    imbalance_ratios,
    ingest_csv,
    partition_subgroups,
)
from fairbalance.harness import ExperimentConfig, imbalance_sweep, run_experiment
from fairbalance.linear import loss_and_grad
from fairbalance.metrics import (
    Confusion,
    GroupConfusion,
    fair_utility,
    fairness_report,
)
from fairbalance.neighbors import NeighborQuery, knn
from fairbalance.oversample import fos, plan_fos, smote
from fairbalance.synth import (
    ADULT_CELLS,
    COMPAS_CELLS,
    GERMAN_CELLS,
    csv_schema_for,
    dataset_to_csv,
    make_biased_dataset,
)

from conftest import make_dataset

BIASED = {
    "kind": "synthetic",
    "cells": GERMAN_CELLS,
    "seed": 1,
    "class_sep": 4.0,
    "group_shift": 1.0,
    "disadvantage": 2.0,
}

REFERENCE_RATIOS = {
    "german": (GERMAN_CELLS, (2.33, 2.23, 2.48, 1.75)),
    "adult": (ADULT_CELLS, (3.18, 2.02, 1.58, 5.61)),
    "compas": (COMPAS_CELLS, (1.22, 4.17, 3.42, 5.53)),
}


@pytest.fixture
def verdict(capsys):
    def emit(num: int, name: str, ok: bool) -> None:
        with capsys.disabled():
            print(f"acceptance {num} [{name}]: {'PASS' if ok else 'FAIL'}")
        assert ok, f"acceptance criterion {num} ({name}) failed"

    return emit


def ratio_tuple(d):
    r = imbalance_ratios(partition_subgroups(d))
    return (
        r.class_ratio,
        r.protected_ratio,
        r.prmaj_to_upmaj_ratio,
        r.prmin_to_upmin_ratio,
    )


def test_1_imbalance_ratio_accounting(verdict, tmp_path):
    ok = True
    # round-trip the first partition through CSV ingestion
    german = make_biased_dataset(GERMAN_CELLS, seed=0)
    path = tmp_path / "german.csv"
    dataset_to_csv(german, path)
    ingested = ingest_csv(path, csv_schema_for(german))
    for got, want in zip(ratio_tuple(ingested), REFERENCE_RATIOS["german"][1]):
        ok = ok and abs(got - want) <= 0.005
    for cells, wanted in (REFERENCE_RATIOS["adult"], REFERENCE_RATIOS["compas"]):
        d = make_biased_dataset(cells, seed=0)
        for got, want in zip(ratio_tuple(d), wanted):
            ok = ok and abs(got - want) <= 0.005
    verdict(1, "imbalance ratio accounting", ok)


def test_2_cell_balance_contract(verdict):
    start = time.perf_counter()
    plan = plan_fos(partition_subgroups(make_biased_dataset(GERMAN_CELLS, seed=0)))
    ok = plan.S_pr == 308 and plan.S_up == 92
    for cells in (GERMAN_CELLS, ADULT_CELLS, COMPAS_CELLS):
        out = fos(make_biased_dataset(cells, seed=0), seed=0)
        n_prmaj, n_upmaj, n_prmin, n_upmin = partition_subgroups(out).counts
        ok = ok and n_prmin == n_prmaj and n_upmin == n_upmaj
    rng = np.random.default_rng(11)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # tiny cells fall back to duplication
        for trial in range(1000):
            prmaj, upmaj = (int(x) for x in rng.integers(5, 41, 2))
            cells = {
                "prmaj": prmaj,
                "upmaj": upmaj,
                "prmin": int(rng.integers(1, prmaj + 1)),
                "upmin": int(rng.integers(1, upmaj + 1)),
            }
            d = make_biased_dataset(cells, n_features=3, seed=trial)
            n_prmaj, n_upmaj, n_prmin, n_upmin = partition_subgroups(
                fos(d, seed=trial)
            ).counts
            ok = ok and n_prmin == n_prmaj and n_upmin == n_upmaj
    ok = ok and time.perf_counter() - start < 60.0
    verdict(2, "oversampling cell balance", ok)


def test_3_fair_utility_consistency(verdict):
    fu = fair_utility(0.7003, 0.0460, 0.0166)
    ok = abs(fu - 0.6784) <= 1e-3 and abs(fu - 0.6781) <= 1e-3
    rng = np.random.default_rng(12)
    violations = 0
    for _ in range(10_000):
        # positive counts keep every rate denominator nonzero
        gc = GroupConfusion(
            privileged=Confusion(*(int(x) for x in rng.integers(1, 30, 4))),
            unprivileged=Confusion(*(int(x) for x in rng.integers(1, 30, 4))),
        )
        r = fairness_report(gc)
        if abs(abs(r.tnrd) - abs(r.fprd)) > 1e-12:
            violations += 1
    verdict(3, "fair utility consistency", ok and violations == 0)


def test_4_interpolation_geometry(verdict):
    cells = {"prmaj": 600, "upmaj": 600, "prmin": 60, "upmin": 40}
    checked = 0
    violations = 0
    for seed in range(5):
        d = make_biased_dataset(cells, seed=seed)
        cont = np.array([c.kind == "continuous" for c in d.columns])
        for sampler in (fos, smote):
            out = sampler(d, seed=seed)
            for rec in out.records:
                base = d.features[rec.base_index][cont]
                neighbor = d.features[rec.neighbor_index][cont]
                expected = base + rec.r * (neighbor - base)
                residual = float(np.max(np.abs(rec.synthetic_row[cont] - expected)))
                if residual >= 1e-9 or not 0.0 <= rec.r <= 1.0:
                    violations += 1
                checked += 1
    verdict(4, "interpolation geometry", checked >= 10_000 and violations == 0)


def test_5_neighbor_oracle_equivalence(verdict):
    rng = np.random.default_rng(13)
    n, k = 300, 5
    X = rng.normal(size=(n, 5))
    d = make_dataset(X, rng.integers(0, 2, n), rng.integers(0, 2, n))
    pool = np.arange(n)
    ok = True
    for q in rng.choice(n, size=200, replace=False):
        d2 = np.sum((X - X[q]) ** 2, axis=1)
        d2[q] = np.inf
        oracle = np.lexsort((pool, d2))[:k].tolist()
        ok = ok and knn(d, NeighborQuery(pool=pool, query_index=int(q), k=k)) == oracle
    verdict(5, "neighbor oracle equivalence", ok)


def test_6_gradient_checks(verdict):
    rng = np.random.default_rng(14)
    eps = 1e-6
    ok = True

    def close(analytic, numeric):
        return abs(analytic - numeric) <= 1e-5 * max(abs(numeric), 1e-3)

    for _ in range(50):
        n, dim = int(rng.integers(3, 12)), int(rng.integers(1, 6))
        X = rng.normal(size=(n, dim))
        ys = rng.choice([-1.0, 1.0], n)
        sw = rng.uniform(0.5, 2.0, n)
        w = rng.normal(size=dim)
        b = float(rng.normal())
        for kind in ("logistic", "hinge"):
            _, gw, gb = loss_and_grad(w, b, X, ys, sw, kind, 1e-3)
            for j in range(dim):
                e = np.zeros(dim)
                e[j] = eps
                lp, _, _ = loss_and_grad(w + e, b, X, ys, sw, kind, 1e-3)
                lm, _, _ = loss_and_grad(w - e, b, X, ys, sw, kind, 1e-3)
                ok = ok and close(gw[j], (lp - lm) / (2 * eps))
            lp, _, _ = loss_and_grad(w, b + eps, X, ys, sw, kind, 1e-3)
            lm, _, _ = loss_and_grad(w, b - eps, X, ys, sw, kind, 1e-3)
            ok = ok and close(gb, (lp - lm) / (2 * eps))
    verdict(6, "gradient checks", ok)


def test_7_directional_fairness_gain(verdict):
    start = time.perf_counter()
    base = run_experiment(
        ExperimentConfig.from_dict(
            {"dataset": BIASED, "preprocessor": "none", "seed": 42}
        )
    )
    fair = run_experiment(
        ExperimentConfig.from_dict({"dataset": BIASED, "preprocessor": "fos", "seed": 42})
    )
    ok = (
        fair.means["aao"] < base.means["aao"]
        and fair.means["fair_utility"] > base.means["fair_utility"]
        and time.perf_counter() - start < 120.0
    )
    verdict(7, "directional fairness gain", ok)


def test_8_robustness_under_scarcity(verdict):
    start = time.perf_counter()
    sweeps = {}
    for prep in ("none", "fos"):
        cfg = ExperimentConfig.from_dict(
            {"dataset": BIASED, "preprocessor": prep, "seed": 42, "levels": [1, 2, 4]}
        )
        sweeps[prep] = {
            lv.level: lv.report.means for lv in imbalance_sweep(cfg).levels
        }
    base, fair = sweeps["none"], sweeps["fos"]
    base_drop = base[1.0]["fair_utility"] - base[4.0]["fair_utility"]
    fair_drop = fair[1.0]["fair_utility"] - fair[4.0]["fair_utility"]
    ok = (
        base[4.0]["recall"] < base[1.0]["recall"]
        and fair_drop < 0.5 * base_drop
        and time.perf_counter() - start < 120.0
    )
    verdict(8, "robustness under scarcity", ok)


def test_9_provenance_audit(verdict):
    violations = 0
    for prep in ("none", "smote", "fos", "ros", "reweigh"):
        report = run_experiment(
            ExperimentConfig.from_dict(
                {"dataset": BIASED, "preprocessor": prep, "seed": 42}
            )
        )
        for fold in report.folds:
            val = set(fold.val_ids)
            violations += len(val & set(fold.scaler_fit_ids))
            violations += len(val & set(fold.preprocess_input_ids))
            violations += len(val & set(fold.train_origin_ids))
    verdict(9, "provenance audit", violations == 0)
