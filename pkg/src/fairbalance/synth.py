"""Synthetic biased tabular fixtures with controllable cell counts.

Two Gaussian blobs per class; unprivileged instances are shifted and
their positives pulled toward the negative class so a classifier trained
on the raw data shows a group TPR/FPR gap. Used by the sweep experiment
and the tests, since real benchmark CSVs ship separately.
"""

from __future__ import annotations

import csv

import numpy as np

from .data import ColumnMeta, CsvSchema, Dataset

# Table-style cell counts (prmaj, upmaj, prmin, upmin) of the three
# benchmark datasets, for desk-scale mirrors.
GERMAN_CELLS = {"prmaj": 499, "upmaj": 201, "prmin": 191, "upmin": 109}
ADULT_CELLS = {"prmaj": 22732, "upmaj": 14423, "prmin": 9918, "upmin": 1769}
COMPAS_CELLS = {"prmaj": 3066, "upmaj": 897, "prmin": 2753, "upmin": 498}


def make_biased_dataset(
    cells: dict[str, int],
    n_features: int = 5,
    class_sep: float = 2.0,
    group_shift: float = 1.0,
    disadvantage: float = 1.0,
    seed: int = 0,
) -> Dataset:
    """Gaussian blobs with the requested class x group cell counts.

    The minority class is labeled 1 (favorable); privileged is 1. The
    unprivileged blobs are offset on axis 1 and unprivileged positives
    are shifted by ``disadvantage`` toward the negative class on axis 0.
    """
    rng = np.random.default_rng(seed)
    spec = [
        ("prmaj", 0, 1),
        ("upmaj", 0, 0),
        ("prmin", 1, 1),
        ("upmin", 1, 0),
    ]
    blocks, labels, protected = [], [], []
    for cell, label, priv in spec:
        count = int(cells[cell])
        if count == 0:
            continue
        mean = np.zeros(n_features)
        mean[0] = class_sep / 2 if label == 1 else -class_sep / 2
        if priv == 0:
            mean[1] += group_shift
            if label == 1:
                mean[0] -= disadvantage
        blocks.append(rng.normal(loc=mean, scale=1.0, size=(count, n_features)))
        labels.extend([label] * count)
        protected.extend([priv] * count)
    X = np.vstack(blocks)
    columns = [ColumnMeta(name=f"x{i}", kind="continuous") for i in range(n_features)]
    columns.append(ColumnMeta(name="group", kind="binary"))
    X = np.column_stack([X, np.array(protected, dtype=np.float64)])
    return Dataset(
        features=X,
        labels=np.array(labels),
        protected=np.array(protected),
        columns=tuple(columns),
        protected_column=n_features,
    )


def dataset_to_csv(d: Dataset, path) -> None:
    """Write a Dataset back out as a CSV readable by :func:`ingest_csv`.

    The protected feature column (when present) is emitted once, as the
    protected column, with values priv/unpriv; labels as pos/neg.
    """
    feature_cols = [
        (i, c) for i, c in enumerate(d.columns) if i != d.protected_column
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([c.name for _, c in feature_cols] + ["group", "outcome"])
        for r in range(d.n):
            row = [f"{d.features[r, i]:.17g}" for i, _ in feature_cols]
            row.append("priv" if d.protected[r] == 1 else "unpriv")
            row.append("pos" if d.labels[r] == 1 else "neg")
            writer.writerow(row)


def csv_schema_for(d: Dataset) -> CsvSchema:
    """Schema matching :func:`dataset_to_csv` output."""
    columns = {
        c.name: ("continuous" if c.kind == "continuous" else "binary")
        for i, c in enumerate(d.columns)
        if i != d.protected_column
    }
    return CsvSchema(
        label_column="outcome",
        positive_value="pos",
        negative_value="neg",
        protected_column="group",
        privileged_value="priv",
        unprivileged_value="unpriv",
        columns=columns,
    )
