"""Config-driven experiment runner.

Per fold: fit the scaler on the training split only, preprocess the
training split only, train, and evaluate on the untouched validation
fold. Reports carry provenance ids so leakage can be audited.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .data import (
    CsvSchema,
    Dataset,
    downsample_to_level,
    ingest_csv,
    partition_subgroups,
    standardize_apply,
    standardize_fit,
    stratified_kfold,
)
from .errors import DegenerateDownsampleError, ExperimentError, FairbalanceError
from .linear import Hyper, feature_importance, predict, train
from .metrics import FairnessReport, confusion_by_group, fairness_report, rates
from .oversample import fos, random_oversample, reweigh, smote
from .synth import make_biased_dataset

SCHEMA_VERSION = 1

PREPROCESSORS = ("none", "smote", "fos", "ros", "reweigh")

METRIC_FIELDS = (
    "ba",
    "aod",
    "aao",
    "eod",
    "tnrd",
    "tprd",
    "fprd",
    "fair_utility",
    "precision",
    "recall",
    "f1",
)


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: dict
    preprocessor: str = "none"
    classifier: str = "logistic"
    learning_rate: float = 0.1
    l2: float = 1e-3
    epochs: int = 500
    cv_k: int = 5
    seed: int = 0
    knn_k: int = 5
    levels: tuple[float, ...] = ()
    include_protected_in_distance: bool = False
    interpolate_protected: bool = False
    drop_protected_feature: bool = False
    sweep_removal_mode: str = "upmin"

    def __post_init__(self):
        if self.preprocessor not in PREPROCESSORS:
            raise ValueError(f"unknown preprocessor: {self.preprocessor}")
        if self.classifier not in ("logistic", "hinge"):
            raise ValueError(f"unknown classifier: {self.classifier}")
        levels = tuple(float(v) for v in self.levels)
        if levels and (
            any(v < 1 for v in levels)
            or any(b <= a for a, b in zip(levels, levels[1:]))
        ):
            raise ValueError("sweep levels must be >= 1 and strictly increasing")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        text = open(path, "rb").read()
        if str(path).endswith(".toml"):
            try:
                import tomllib
            except ModuleNotFoundError:
                import tomli as tomllib

            obj = tomllib.loads(text.decode())
        else:
            obj = json.loads(text)
        return cls.from_dict(obj)

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "preprocessor": self.preprocessor,
            "classifier": self.classifier,
            "learning_rate": self.learning_rate,
            "l2": self.l2,
            "epochs": self.epochs,
            "cv_k": self.cv_k,
            "seed": self.seed,
            "knn_k": self.knn_k,
            "levels": list(self.levels),
            "include_protected_in_distance": self.include_protected_in_distance,
            "interpolate_protected": self.interpolate_protected,
            "drop_protected_feature": self.drop_protected_feature,
            "sweep_removal_mode": self.sweep_removal_mode,
        }


def load_dataset(cfg: ExperimentConfig) -> Dataset:
    spec = dict(cfg.dataset)
    kind = spec.pop("kind")
    if kind == "csv":
        schema = spec["schema"]
        if isinstance(schema, str):
            schema = CsvSchema.from_file(schema)
        else:
            schema = CsvSchema.from_dict(schema)
        return ingest_csv(spec["path"], schema)
    if kind == "synthetic":
        return make_biased_dataset(**spec)
    raise ValueError(f"unknown dataset kind: {kind}")


def _without_protected_feature(d: Dataset) -> Dataset:
    if d.protected_column is None:
        return d
    cols = [i for i in range(d.d) if i != d.protected_column]
    return Dataset(
        features=d.features[:, cols],
        labels=d.labels,
        protected=d.protected,
        columns=tuple(c for i, c in enumerate(d.columns) if i != d.protected_column),
        weights=d.weights,
        protected_column=None,
        ids=d.ids,
        dropped_rows=d.dropped_rows,
    )


@dataclass(frozen=True)
class FoldResult:
    fold: int
    metrics: dict
    degenerate: bool
    counts_before: tuple[int, int, int, int]
    counts_after: tuple[int, int, int, int]
    val_ids: tuple[int, ...]
    scaler_fit_ids: tuple[int, ...]
    preprocess_input_ids: tuple[int, ...]
    train_origin_ids: tuple[int, ...]
    timing: dict = field(default_factory=dict)

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "fold": self.fold,
            "metrics": dict(self.metrics),
            "degenerate": self.degenerate,
            "counts_before": list(self.counts_before),
            "counts_after": list(self.counts_after),
            "val_ids": list(self.val_ids),
            "scaler_fit_ids": list(self.scaler_fit_ids),
            "preprocess_input_ids": list(self.preprocess_input_ids),
            "train_origin_ids": list(self.train_origin_ids),
        }
        if include_timing:
            out["timing"] = dict(self.timing)
        return out


@dataclass(frozen=True)
class RunReport:
    config: dict
    level: float
    folds: tuple[FoldResult, ...]
    means: dict

    def to_dict(self, include_timing: bool = False) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "level": self.level,
            "folds": [f.to_dict(include_timing) for f in self.folds],
            "means": dict(self.means),
        }


@dataclass(frozen=True)
class SweepLevelResult:
    level: float
    report: RunReport | None
    skipped: bool = False
    reason: str = ""


@dataclass(frozen=True)
class SweepReport:
    config: dict
    levels: tuple[SweepLevelResult, ...]

    def to_dict(self, include_timing: bool = False) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "levels": [
                {
                    "level": lv.level,
                    "skipped": lv.skipped,
                    "reason": lv.reason,
                    "report": None
                    if lv.report is None
                    else lv.report.to_dict(include_timing),
                }
                for lv in self.levels
            ],
        }


def _preprocess(d: Dataset, cfg: ExperimentConfig, seed: int) -> Dataset:
    if cfg.preprocessor == "none":
        return d
    if cfg.preprocessor == "smote":
        return smote(d, k=cfg.knn_k, seed=seed)
    if cfg.preprocessor == "fos":
        return fos(
            d,
            k=cfg.knn_k,
            seed=seed,
            include_protected=cfg.include_protected_in_distance,
            interpolate_protected=cfg.interpolate_protected,
        )
    if cfg.preprocessor == "ros":
        return random_oversample(d, seed=seed)
    return reweigh(d)


def _origin_ids(pre: Dataset) -> tuple[int, ...]:
    """Original-row ids that influenced training: surviving originals plus
    the bases and neighbors of every synthetic row."""
    ids = set(int(i) for i in pre.ids if i >= 0)
    for rec in pre.records:
        ids.add(int(pre.ids[rec.base_index]))
        ids.add(int(pre.ids[rec.neighbor_index]))
    return tuple(sorted(ids))


def run_experiment(
    cfg: ExperimentConfig, dataset: Dataset | None = None, level: float = 1.0
) -> RunReport:
    d = dataset if dataset is not None else load_dataset(cfg)
    if cfg.drop_protected_feature:
        d = _without_protected_feature(d)
    plan = stratified_kfold(d, cfg.cv_k, cfg.seed)
    fold_seeds = [
        int(ss.generate_state(1)[0])
        for ss in np.random.SeedSequence(cfg.seed).spawn(cfg.cv_k)
    ]
    folds: list[FoldResult] = []
    failures: list[str] = []
    for i, val_idx in enumerate(plan.folds):
        try:
            folds.append(_run_fold(cfg, d, plan.folds, i, fold_seeds[i], level))
        except FairbalanceError as exc:
            failures.append(f"fold {i}: {exc}")
    if failures:
        raise ExperimentError("; ".join(failures))
    means = {
        m: sum(f.metrics[m] for f in folds) / len(folds) for m in METRIC_FIELDS
    }
    return RunReport(
        config=cfg.to_dict(), level=level, folds=tuple(folds), means=means
    )


def _run_fold(cfg, d, all_folds, i, fold_seed, level) -> FoldResult:
    timing = {}
    val_idx = all_folds[i]
    train_idx = np.concatenate([f for j, f in enumerate(all_folds) if j != i])
    train_set = d.subset(np.sort(train_idx))
    val_set = d.subset(val_idx)

    t0 = time.perf_counter()
    if level != 1.0:
        train_set = downsample_to_level(
            train_set, level, seed=fold_seed, mode=cfg.sweep_removal_mode
        )
    timing["downsample"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    scaler = standardize_fit(train_set)
    train_s = standardize_apply(train_set, scaler)
    val_s = standardize_apply(val_set, scaler)
    timing["scale"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    pre = _preprocess(train_s, cfg, fold_seed)
    timing["preprocess"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    hyper = Hyper(
        learning_rate=cfg.learning_rate,
        l2=cfg.l2,
        epochs=cfg.epochs,
        seed=fold_seed,
    )
    model = train(pre, kind=cfg.classifier, hyper=hyper)
    timing["train"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    y_pred = predict(model, val_s.features)
    gc = confusion_by_group(val_s.labels, y_pred, val_s.protected)
    report = fairness_report(gc)
    pooled = rates(gc.pooled)
    timing["evaluate"] = time.perf_counter() - t0

    metrics = report.to_dict()
    metrics.pop("degenerate")
    metrics["precision"] = pooled.precision
    metrics["recall"] = pooled.recall
    metrics["f1"] = pooled.f1
    return FoldResult(
        fold=i,
        metrics=metrics,
        degenerate=report.degenerate,
        counts_before=partition_subgroups(train_s).counts,
        counts_after=partition_subgroups(pre).counts,
        val_ids=tuple(int(x) for x in val_set.ids),
        scaler_fit_ids=tuple(int(x) for x in train_set.ids),
        preprocess_input_ids=tuple(int(x) for x in train_s.ids),
        train_origin_ids=_origin_ids(pre),
        timing=timing,
    )


def imbalance_sweep(cfg: ExperimentConfig, dataset: Dataset | None = None) -> SweepReport:
    if not cfg.levels:
        raise ValueError("config has no sweep levels")
    d = dataset if dataset is not None else load_dataset(cfg)
    results = []
    for level in cfg.levels:
        try:
            results.append(
                SweepLevelResult(level=level, report=run_experiment(cfg, d, level))
            )
        except (DegenerateDownsampleError, ExperimentError) as exc:
            results.append(
                SweepLevelResult(level=level, report=None, skipped=True, reason=str(exc))
            )
    return SweepReport(config=cfg.to_dict(), levels=tuple(results))


CSV_HEADER = ["row", "level", "fold"] + list(METRIC_FIELDS) + ["degenerate"]


def _csv_rows(report) -> list[list]:
    rows = []
    if isinstance(report, SweepReport):
        for lv in report.levels:
            if lv.report is not None:
                rows.extend(_csv_rows(lv.report))
        return rows
    for f in report.folds:
        rows.append(
            ["fold", report.level, f.fold]
            + [f"{f.metrics[m]:.4f}" for m in METRIC_FIELDS]
            + [int(f.degenerate)]
        )
    rows.append(
        ["mean", report.level, ""]
        + [f"{report.means[m]:.4f}" for m in METRIC_FIELDS]
        + [""]
    )
    return rows


def emit_report(report, path, format: str = "json", include_timing: bool = False) -> None:
    """Write a RunReport or SweepReport; JSON keeps full float precision,
    CSV rounds to 4 decimals."""
    if format == "json":
        with open(path, "w") as fh:
            json.dump(report.to_dict(include_timing), fh, indent=2)
            fh.write("\n")
    elif format == "csv":
        import csv as _csv

        with open(path, "w", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(CSV_HEADER)
            writer.writerows(_csv_rows(report))
    else:
        raise ValueError(f"unknown report format: {format}")


def importance_report(cfg: ExperimentConfig, dataset: Dataset | None = None) -> dict:
    """Feature importances of the configured arm next to the baseline arm,
    trained on the full standardized dataset."""
    d = dataset if dataset is not None else load_dataset(cfg)
    if cfg.drop_protected_feature:
        d = _without_protected_feature(d)
    scaler = standardize_fit(d)
    ds = standardize_apply(d, scaler)
    hyper = Hyper(
        learning_rate=cfg.learning_rate, l2=cfg.l2, epochs=cfg.epochs, seed=cfg.seed
    )
    out = {"schema_version": SCHEMA_VERSION, "config": cfg.to_dict()}
    base_model = train(ds, kind=cfg.classifier, hyper=hyper)
    out["baseline"] = [
        {"feature": n, "importance": v}
        for n, v in feature_importance(base_model, ds.columns)
    ]
    pre = _preprocess(ds, cfg, cfg.seed)
    model = train(pre, kind=cfg.classifier, hyper=hyper)
    out[cfg.preprocessor] = [
        {"feature": n, "importance": v}
        for n, v in feature_importance(model, pre.columns)
    ]
    return out
