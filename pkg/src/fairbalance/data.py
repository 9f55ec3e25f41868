"""Tabular dataset handling: ingestion, subgroup accounting, scaling, folds.

The central type is :class:`Dataset`, an immutable bundle of a feature
matrix, binary labels, a binary protected-group column and per-instance
weights. Everything downstream (oversampling, metrics, the experiment
harness) operates on it.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateDownsampleError,
    DegenerateRatioError,
    EmptyDatasetError,
    IngestionError,
    SchemaError,
    StratificationError,
)

MISSING_TOKENS = {"", "?", "NA", "na", "NaN", "nan"}

CELL_NAMES = ("prmaj", "upmaj", "prmin", "upmin")


@dataclass(frozen=True)
class ColumnMeta:
    """Name and kind of one feature column.

    kind is one of "continuous", "binary" or "onehot"; one-hot columns
    carry the name of the categorical column they expand in ``group``.
    """

    name: str
    kind: str
    group: str | None = None


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    labels: np.ndarray
    protected: np.ndarray
    columns: tuple[ColumnMeta, ...]
    weights: np.ndarray | None = None
    protected_column: int | None = None
    ids: np.ndarray | None = None
    dropped_rows: int = 0
    records: tuple = ()

    def __post_init__(self):
        X = np.ascontiguousarray(np.asarray(self.features, dtype=np.float64))
        y = np.asarray(self.labels, dtype=np.int64)
        p = np.asarray(self.protected, dtype=np.int64)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError("features must be a non-empty 2-D matrix")
        if not np.all(np.isfinite(X)):
            raise ValueError("features contain NaN/Inf")
        if y.shape != (X.shape[0],) or p.shape != (X.shape[0],):
            raise ValueError("labels/protected length must match features")
        if not np.isin(y, (0, 1)).all() or not np.isin(p, (0, 1)).all():
            raise ValueError("labels and protected must be 0/1")
        if len(self.columns) != X.shape[1]:
            raise ValueError("column metadata arity mismatch")
        w = self.weights
        if w is not None:
            w = np.asarray(w, dtype=np.float64)
            if w.shape != (X.shape[0],):
                raise ValueError("weights length mismatch")
            if not np.all(np.isfinite(w)) or not np.all(w > 0):
                raise ValueError("weights must be strictly positive and finite")
            w.setflags(write=False)
        ids = self.ids
        if ids is None:
            ids = np.arange(X.shape[0], dtype=np.int64)
        else:
            ids = np.asarray(ids, dtype=np.int64)
            if ids.shape != (X.shape[0],):
                raise ValueError("ids length mismatch")
        for arr in (X, y, p, ids):
            arr.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "protected", p)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "ids", ids)
        object.__setattr__(self, "columns", tuple(self.columns))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def effective_weights(self) -> np.ndarray:
        if self.weights is None:
            return np.ones(self.n, dtype=np.float64)
        return self.weights

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            features=self.features[idx],
            labels=self.labels[idx],
            protected=self.protected[idx],
            columns=self.columns,
            weights=None if self.weights is None else self.weights[idx],
            protected_column=self.protected_column,
            ids=self.ids[idx],
            dropped_rows=self.dropped_rows,
        )


@dataclass(frozen=True)
class SubgroupPartition:
    """Index sets for the four class x protected-group cells."""

    idx_prmaj: np.ndarray
    idx_upmaj: np.ndarray
    idx_prmin: np.ndarray
    idx_upmin: np.ndarray
    minority_label: int

    @property
    def counts(self) -> tuple[int, int, int, int]:
        return (
            len(self.idx_prmaj),
            len(self.idx_upmaj),
            len(self.idx_prmin),
            len(self.idx_upmin),
        )

    def cell(self, name: str) -> np.ndarray:
        return getattr(self, f"idx_{name}")


@dataclass(frozen=True)
class RatioReport:
    class_ratio: float
    protected_ratio: float
    prmaj_to_upmaj_ratio: float
    prmin_to_upmin_ratio: float
    counts: tuple[int, int, int, int]


@dataclass(frozen=True)
class FoldPlan:
    k: int
    folds: tuple[np.ndarray, ...]
    seed: int


def partition_subgroups(d: Dataset) -> SubgroupPartition:
    """Split row indices into the four protected-group x class cells.

    The minority label is the strictly less frequent class; on a tie,
    label 1 is treated as the minority.
    """
    n_pos = int(d.labels.sum())
    n_neg = d.n - n_pos
    minority = 0 if n_neg < n_pos else 1
    majority = 1 - minority
    idx = np.arange(d.n)
    maj = d.labels == majority
    pr = d.protected == 1
    return SubgroupPartition(
        idx_prmaj=idx[maj & pr],
        idx_upmaj=idx[maj & ~pr],
        idx_prmin=idx[~maj & pr],
        idx_upmin=idx[~maj & ~pr],
        minority_label=minority,
    )


def _ratio(a: int, b: int, name: str) -> float:
    if a == 0 or b == 0:
        raise DegenerateRatioError(f"zero count in cell for ratio '{name}'")
    return max(a, b) / min(a, b)


def imbalance_ratios(p: SubgroupPartition) -> RatioReport:
    """Larger/smaller count ratios between classes, groups and cells."""
    n_prmaj, n_upmaj, n_prmin, n_upmin = p.counts
    n_maj = n_prmaj + n_upmaj
    n_min = n_prmin + n_upmin
    n_pr = n_prmaj + n_prmin
    n_up = n_upmaj + n_upmin
    return RatioReport(
        class_ratio=_ratio(n_maj, n_min, "class"),
        protected_ratio=_ratio(n_pr, n_up, "protected"),
        prmaj_to_upmaj_ratio=_ratio(n_prmaj, n_upmaj, "prmaj/upmaj"),
        prmin_to_upmin_ratio=_ratio(n_prmin, n_upmin, "prmin/upmin"),
        counts=p.counts,
    )


@dataclass(frozen=True)
class ScalerParams:
    """Per-column standardization parameters (continuous columns only)."""

    column_indices: tuple[int, ...]
    means: tuple[float, ...]
    stds: tuple[float, ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "column_indices": list(self.column_indices),
                "means": list(self.means),
                "stds": list(self.stds),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "ScalerParams":
        obj = json.loads(text)
        return cls(
            column_indices=tuple(obj["column_indices"]),
            means=tuple(obj["means"]),
            stds=tuple(obj["stds"]),
        )


def standardize_fit(d: Dataset, columns=None) -> ScalerParams:
    """Fit z-score parameters on the continuous columns of ``d``.

    ``columns`` defaults to every column whose kind is "continuous".
    Zero-variance columns get std 0 and are mapped to 0 on apply.
    """
    if columns is None:
        columns = [i for i, c in enumerate(d.columns) if c.kind == "continuous"]
    cols = tuple(int(c) for c in columns)
    means, stds = [], []
    for c in cols:
        x = d.features[:, c]
        means.append(float(x.mean()))
        stds.append(float(x.std()))
    return ScalerParams(column_indices=cols, means=tuple(means), stds=tuple(stds))


def standardize_apply(d: Dataset, params: ScalerParams) -> Dataset:
    X = d.features.copy()
    for c, mu, sd in zip(params.column_indices, params.means, params.stds):
        if sd == 0.0:
            X[:, c] = 0.0
        else:
            X[:, c] = (X[:, c] - mu) / sd
    return Dataset(
        features=X,
        labels=d.labels,
        protected=d.protected,
        columns=d.columns,
        weights=d.weights,
        protected_column=d.protected_column,
        ids=d.ids,
        dropped_rows=d.dropped_rows,
    )


def stratified_kfold(d: Dataset, k: int, seed: int) -> FoldPlan:
    """Deterministic stratified folds.

    Strata are the four class x group cells, shuffled within each cell
    and dealt round-robin with the two cells of a class kept adjacent,
    so both per-class and per-cell fold counts stay within 1 of perfect
    proportionality.
    """
    if k < 2:
        raise StratificationError("k must be >= 2")
    rng = np.random.default_rng(seed)
    folds: list[list[int]] = [[] for _ in range(k)]
    cursor = 0
    for label in (0, 1):
        cls = np.flatnonzero(d.labels == label)
        if len(cls) < k:
            raise StratificationError(
                f"class {label} has {len(cls)} members, fewer than k={k}"
            )
        for group in (1, 0):
            cell = cls[d.protected[cls] == group]
            for i in rng.permutation(cell):
                folds[cursor % k].append(int(i))
                cursor += 1
    return FoldPlan(
        k=k,
        folds=tuple(np.array(sorted(f), dtype=np.int64) for f in folds),
        seed=seed,
    )


def downsample_to_level(
    d: Dataset, level: float, seed: int, mode: str = "upmin"
) -> Dataset:
    """Induce controlled scarcity by removing rows at imbalance level ``level``.

    mode "upmin" removes only from the unprivileged-minority cell, leaving
    its count at floor(N_upmin / level). mode "proportional" additionally
    shrinks the unprivileged-majority cell by the same divisor.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    if mode not in ("upmin", "proportional"):
        raise ValueError(f"unknown removal mode: {mode}")
    if level == 1:
        return d
    part = partition_subgroups(d)
    rng = np.random.default_rng(seed)
    keep = np.ones(d.n, dtype=bool)
    targets = ["upmin"] if mode == "upmin" else ["upmin", "upmaj"]
    for cell in targets:
        idx = part.cell(cell)
        target = math.floor(len(idx) / level)
        if target == 0:
            raise DegenerateDownsampleError(
                f"level {level} would empty cell '{cell}' ({len(idx)} members)"
            )
        kept = rng.choice(idx, size=target, replace=False)
        drop = np.setdiff1d(idx, kept)
        keep[drop] = False
    return d.subset(np.flatnonzero(keep))


@dataclass(frozen=True)
class CsvSchema:
    """Maps raw CSV columns onto a Dataset.

    ``columns`` lists every feature column with its kind: "continuous",
    "binary" (already 0/1) or "categorical" (one-hot encoded). The label
    and protected columns are mapped to 1 when equal to the positive /
    privileged value; an explicit negative / unprivileged value makes any
    other observed value an ingestion error.
    """

    label_column: str
    positive_value: str
    protected_column: str
    privileged_value: str
    columns: dict[str, str] = field(default_factory=dict)
    negative_value: str | None = None
    unprivileged_value: str | None = None
    include_protected_feature: bool = True

    @classmethod
    def from_dict(cls, obj: dict) -> "CsvSchema":
        try:
            return cls(
                label_column=obj["label"]["column"],
                positive_value=str(obj["label"]["positive"]),
                negative_value=(
                    None
                    if "negative" not in obj["label"]
                    else str(obj["label"]["negative"])
                ),
                protected_column=obj["protected"]["column"],
                privileged_value=str(obj["protected"]["privileged"]),
                unprivileged_value=(
                    None
                    if "unprivileged" not in obj["protected"]
                    else str(obj["protected"]["unprivileged"])
                ),
                columns=dict(obj.get("columns", {})),
                include_protected_feature=bool(
                    obj.get("include_protected_feature", True)
                ),
            )
        except KeyError as exc:
            raise SchemaError(f"schema missing required key: {exc}") from exc

    @classmethod
    def from_file(cls, path) -> "CsvSchema":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def _map_binary(value, positive, negative, what, row):
    if value == positive:
        return 1
    if negative is None or value == negative:
        return 0
    raise IngestionError(f"row {row}: unmappable {what} value {value!r}")


def ingest_csv(path, schema: CsvSchema) -> Dataset:
    """Read an RFC-4180 CSV with a header row into a Dataset.

    Rows with missing cells are dropped and counted; categorical columns
    are one-hot encoded over their observed values (sorted).
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDatasetError(f"{path}: empty file")
        rows = list(reader)

    col_pos = {name: i for i, name in enumerate(header)}
    for required in (schema.label_column, schema.protected_column):
        if required not in col_pos:
            raise SchemaError(f"column {required!r} not present in {path}")
    feature_names = [
        c for c in header if c not in (schema.label_column, schema.protected_column)
    ]
    for name in feature_names:
        if name not in schema.columns:
            raise SchemaError(f"column {name!r} has no kind in the schema")
        if schema.columns[name] not in ("continuous", "binary", "categorical"):
            raise SchemaError(
                f"column {name!r}: unknown kind {schema.columns[name]!r}"
            )
    for name in schema.columns:
        if name not in col_pos:
            raise SchemaError(f"schema column {name!r} not present in {path}")

    arity = len(header)
    kept: list[list[str]] = []
    labels: list[int] = []
    protected: list[int] = []
    dropped = 0
    for r, row in enumerate(rows, start=2):
        if len(row) != arity:
            raise IngestionError(f"row {r}: expected {arity} cells, got {len(row)}")
        if any(cell.strip() in MISSING_TOKENS for cell in row):
            dropped += 1
            continue
        labels.append(
            _map_binary(
                row[col_pos[schema.label_column]].strip(),
                schema.positive_value,
                schema.negative_value,
                "label",
                r,
            )
        )
        protected.append(
            _map_binary(
                row[col_pos[schema.protected_column]].strip(),
                schema.privileged_value,
                schema.unprivileged_value,
                "protected",
                r,
            )
        )
        kept.append(row)
    if not kept:
        raise EmptyDatasetError(f"{path}: no usable rows")

    columns: list[ColumnMeta] = []
    blocks: list[np.ndarray] = []
    for name in feature_names:
        kind = schema.columns[name]
        raw = [row[col_pos[name]].strip() for row in kept]
        if kind == "categorical":
            values = sorted(set(raw))
            for v in values:
                columns.append(ColumnMeta(name=f"{name}={v}", kind="onehot", group=name))
                blocks.append(np.array([1.0 if x == v else 0.0 for x in raw]))
        else:
            try:
                col = np.array([float(x) for x in raw])
            except ValueError:
                bad = next(i for i, x in enumerate(raw) if not _is_float(x))
                raise IngestionError(
                    f"row {bad + 2}: non-numeric value in column {name!r}"
                )
            if kind == "binary" and not np.isin(col, (0.0, 1.0)).all():
                raise IngestionError(f"column {name!r}: binary column has non-0/1 values")
            columns.append(ColumnMeta(name=name, kind=kind))
            blocks.append(col)

    protected_column = None
    if schema.include_protected_feature:
        protected_column = len(columns)
        columns.append(ColumnMeta(name=schema.protected_column, kind="binary"))
        blocks.append(np.array(protected, dtype=np.float64))

    X = np.column_stack(blocks)
    return Dataset(
        features=X,
        labels=np.array(labels),
        protected=np.array(protected),
        columns=tuple(columns),
        protected_column=protected_column,
        dropped_rows=dropped,
    )


def _is_float(x: str) -> bool:
    try:
        float(x)
        return True
    except ValueError:
        return False
